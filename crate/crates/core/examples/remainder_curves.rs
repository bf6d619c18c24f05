// Fit multi-exponential CO₂ remainder curves to the shipped anchor points
// and compare them with the curves in the catalog.
//
// ```bash
// cargo run --example remainder_curves
// ```

use heatcost::remainder::{fit_remainder, remainder_fraction, RemainderId};
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let catalog = Catalog::shipped();
    for id in [RemainderId::Low, RemainderId::Central, RemainderId::High] {
        let anchors = &catalog.remainder_anchors[&id];
        let fit = fit_remainder(id, anchors, 3)?;
        println!("{id}: rms {:.2e}", fit.rms);
        println!("{}", serde_json::to_string(&fit.curve)?);
        let shipped = &catalog.remainder_curves[&id];
        for &(t, target) in anchors {
            println!(
                "  t={t:>6}  anchor {target:.4}  fitted {:.4}  shipped {:.4}",
                remainder_fraction(&fit.curve, t)?,
                remainder_fraction(shipped, t)?
            );
        }
    }
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
