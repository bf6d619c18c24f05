// Load the demo damages, CPI and yield files, deflate damages to 2021
// dollars and summarise the bond yields.
//
// ```bash
// cargo run --example ingest_series
// ```

use std::path::PathBuf;

use heatcost::ingest::{cpi_adjust, load_damages, load_macro, load_yields, write_series, yield_stats, Series};

fn demo(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/demo").join(name)
}

pub fn run_example() -> heatcost::Result<()> {
    let nominal = load_damages(demo("damages_synthetic.csv"), 2021)?;
    let cpi = load_macro(demo("cpi_synthetic.csv"))?;
    let real = cpi_adjust(&nominal, &cpi, 2021)?;
    println!("{} damages years, {}..={}", real.len(), real.points[0].0, real.points[real.len() - 1].0);
    for ((y, n), (_, r)) in nominal.points.iter().zip(&real.points).step_by(10) {
        println!("  {y}: nominal {n:.3e}  2021 dollars {r:.3e}");
    }

    let yields = load_yields(demo("yields_synthetic.csv"), 30)?;
    let (mean, sigma) = yield_stats(&yields)?;
    println!("30y real yield: mean {:.3}%  sigma {:.3}%", mean * 100.0, sigma * 100.0);

    let mut csv = Vec::new();
    write_series(&mut csv, &Series::Damages(real))?;
    println!("normalised CSV is {} bytes", csv.len());
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
