// Chebyshev σ multipliers, tail-risk damage curves and the chance of at
// least one extreme year over a span.
//
// ```bash
// cargo run --example risk_curves
// ```

use std::path::PathBuf;

use heatcost::climate::ForcingParams;
use heatcost::damages::{fit_exponential, residual_sigma_curve, scale_heat_curve, DamagesTarget};
use heatcost::ingest::{load_damages, DamagesSeries};
use heatcost::model::simulate;
use heatcost::risk::{chebyshev_multiplier, risk_curve};
use heatcost::runner::{risk_span_table, table_report, ReportFormat, TABLE_SPANS};
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let levels = [0.1, 0.01, 0.001];
    for r in levels {
        println!("1:{:.0} year  k = {:.3}", 1.0 / r, chebyshev_multiplier(r)?);
    }

    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/demo/damages_synthetic.csv");
    let damages = load_damages(path, 2021)?;
    let points = damages.window(1980, 2021);
    let wde = fit_exponential(&points, 1980)?.curve;
    let sigma = residual_sigma_curve(&DamagesSeries::new(points, 2021)?, &wde)?;
    let run = simulate(&Catalog::shipped().preset("baseline-low")?, &ForcingParams::default(), &[])?;
    let base = scale_heat_curve(&run.climate, DamagesTarget::Fitted(&wde), (1980, 2021))?;

    for r in levels {
        let curve = risk_curve(&base, &sigma, r)?;
        println!(
            "risk {:>5}: 2030 {:.3e} $   2050 {:.3e} $",
            r,
            curve.at(2030).unwrap_or(f64::NAN),
            curve.at(2050).unwrap_or(f64::NAN)
        );
    }

    print!("{}", table_report(&risk_span_table(&levels, &TABLE_SPANS)?, ReportFormat::Markdown)?);
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
