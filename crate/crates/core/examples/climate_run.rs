// Integrate the pseudo-surface ocean model for a few presets and express
// ocean heat in megatons of TNT.
//
// ```bash
// cargo run --example climate_run
// ```

use heatcost::climate::{joules_to_megatons, ForcingParams};
use heatcost::model::simulate_all;
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let catalog = Catalog::shipped();
    let params = ForcingParams::default();
    println!(
        "lambda {} W/m2/C, equilibrium warming per CO2 doubling {:.2} C",
        params.feedback_lambda,
        params.climate_sensitivity()
    );
    let names = ["baseline-low", "s-aerosol-high-permafrost", "dice-central"];
    let scenarios = names.iter().map(|n| catalog.preset(n)).collect::<heatcost::Result<Vec<_>>>()?;
    for run in simulate_all(&scenarios, &params)? {
        let c = &run.climate;
        println!("{}", c.scenario_name);
        for year in [2021, 2100, 2300] {
            if let Some(s) = c.state(year) {
                println!(
                    "  {year}: F {:6.2} W/m2  EEI {:5.2}  dT {:6.2} C  OHC {:.3e} J ({:.3e} MtT)",
                    s.forcing,
                    s.eei,
                    s.delta_t,
                    s.ohc,
                    joules_to_megatons(s.ohc.max(0.0))?
                );
            }
        }
        if let Some(y) = c.first_year_above(18.0) {
            println!("  +18 C first exceeded in {y}");
        }
    }
    println!("5e21 J = {:.4e} MtT", joules_to_megatons(5e21)?);
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
