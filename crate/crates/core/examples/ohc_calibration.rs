// Tune the feedback parameter and ocean uptake fraction against an
// observed ocean heat series. The "observations" here are generated from
// known parameters so the recovery can be checked.
//
// ```bash
// cargo run --example ohc_calibration
// ```

use heatcost::climate::{calibrate_to_ohc, run_climate, ForcingParams};
use heatcost::emissions::gas_trajectories;
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let scenario = Catalog::shipped().preset("baseline-central")?;
    let trajectories = gas_trajectories(&scenario)?;
    let truth = ForcingParams {
        feedback_lambda: 1.25,
        ocean_uptake_fraction: 0.8,
        ..ForcingParams::default()
    };
    let series = run_climate(&scenario, &trajectories, &truth)?;
    let observed: Vec<(i32, f64)> = (1960..=2020)
        .step_by(5)
        .map(|y| (y, series.ohc(y).expect("in range") + 3e22))
        .collect();

    let start = ForcingParams::default();
    let fit = calibrate_to_ohc(&scenario, &trajectories, &start, &observed)?;
    println!(
        "start   lambda {:.3}  uptake {:.3}",
        start.feedback_lambda, start.ocean_uptake_fraction
    );
    println!(
        "fitted  lambda {:.3}  uptake {:.3}  rms {:.2e} J  converged {}",
        fit.params.feedback_lambda, fit.params.ocean_uptake_fraction, fit.rms_joules, fit.converged
    );
    println!(
        "truth   lambda {:.3}  uptake {:.3}",
        truth.feedback_lambda, truth.ocean_uptake_fraction
    );
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
