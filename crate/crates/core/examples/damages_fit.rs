// Fit an exponential to weather damages, scale a scenario's ocean heat
// curve onto it, and fit the spread of damages above the trend.
//
// ```bash
// cargo run --example damages_fit
// ```

use std::path::PathBuf;

use heatcost::climate::ForcingParams;
use heatcost::damages::{fit_exponential, residual_sigma_curve, scale_heat_curve, DamagesTarget};
use heatcost::ingest::{load_damages, DamagesSeries};
use heatcost::model::simulate;
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/demo/damages_synthetic.csv");
    let damages = load_damages(path, 2021)?;
    let window = (1980, 2021);
    let points = damages.window(window.0, window.1);

    let wde = fit_exponential(&points, window.0)?;
    println!(
        "trend: {:.3e} * exp({:.4} (y - {}))  R2 {:.3}",
        wde.curve.amplitude, wde.curve.rate, wde.curve.ref_year, wde.r_squared
    );

    let run = simulate(&Catalog::shipped().preset("baseline-low")?, &ForcingParams::default(), &[])?;
    let on_trend = scale_heat_curve(&run.climate, DamagesTarget::Fitted(&wde.curve), window)?;
    let on_data = scale_heat_curve(&run.climate, DamagesTarget::Observed(&damages), window)?;
    println!("OHC scaled onto trend: {:.4e} $/J  R2 {:.4}", on_trend.scalar, on_trend.r_squared);
    println!("OHC scaled onto data:  {:.4e} $/J  R2 {:.4}", on_data.scalar, on_data.r_squared);
    for year in [2021, 2050, 2100] {
        println!("  projected damages {year}: {:.3e} $", on_trend.at(year).unwrap_or(f64::NAN));
    }

    let sigma = residual_sigma_curve(&DamagesSeries::new(points, damages.base_year)?, &wde.curve)?;
    println!("spread above trend: {:.3e} * exp({:.4} (y - {}))", sigma.amplitude, sigma.rate, sigma.ref_year);
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
