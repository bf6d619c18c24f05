// Present value of future losses, the DICE discount correction, the
// sign-of-risk algebra for gains and losses, and crisis spending stats.
//
// ```bash
// cargo run --example bond_discounting
// ```

use std::path::PathBuf;

use heatcost::discount::{
    corrected_dice_rate, dice_risk_factor, load_crisis_events, pv_fl, risk_adjustment_fit, verify_stream_equalization,
    wtp_stats, DiscountSpec, LossStreamParams, BOND_MEAN_RATE, DICE_RATE,
};

pub fn run_example() -> heatcost::Result<()> {
    let damages = |year: i32| 1e9 * (0.03 * (year - 2025) as f64).exp();
    let spec = DiscountSpec::default();
    for d in [spec.lower(), spec.base_rate, spec.upper()] {
        let v = pv_fl(damages, d, 2025, 300, |_| 1.0)?;
        println!("PV of 300 years at {:>6.3}%: {:.3e} $", d * 100.0, v);
    }

    println!(
        "DICE risk factor {:.4}, corrected rate {:.4}%",
        dice_risk_factor(DICE_RATE, BOND_MEAN_RATE)?,
        corrected_dice_rate(DICE_RATE, BOND_MEAN_RATE)? * 100.0
    );

    let gains = LossStreamParams {
        initial: 100.0,
        g_expected: 0.04,
        g_actual: 0.025,
        d_tvm: 0.0157,
    };
    let losses = LossStreamParams {
        initial: -100.0,
        g_expected: 0.02,
        g_actual: 0.035,
        d_tvm: 0.0157,
    };
    for (label, p) in [("gains", gains), ("losses", losses)] {
        println!(
            "{label}: d_rarF = {:+.3}  streams equalise: {}",
            risk_adjustment_fit(p.g_expected, p.g_actual),
            verify_stream_equalization(&p, 500)
        );
    }

    let events = load_crisis_events(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/crisis_events.csv"))?;
    let s = wtp_stats(&events)?;
    println!(
        "crisis spending, share of GDP: mean {:.2}% median {:.2}% max {:.2}% min {:.2}% sigma {:.2}%",
        s.mean * 100.0,
        s.median * 100.0,
        s.max * 100.0,
        s.min * 100.0,
        s.sigma * 100.0
    );
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
