// Emissions and concentrations of the four gases for one preset, the
// e-fold decay law, and the trajectory CSV export.
//
// ```bash
// cargo run --example gas_trajectories
// ```

use heatcost::emissions::{efold_decay, gas_trajectories, write_trajectories_csv, Gas};
use heatcost::scenario::Catalog;

pub fn run_example() -> heatcost::Result<()> {
    let scenario = Catalog::shipped().preset("s-aerosol-high-permafrost")?;
    let trajectories = gas_trajectories(&scenario)?;
    for gas in [Gas::Co2, Gas::Ch4, Gas::N2o, Gas::Fgas] {
        let t = &trajectories[gas.index()];
        print!("{:>4}:", gas.code());
        for year in [1900, 2000, 2025, 2100, 2500] {
            print!("  {year} {:.1} {}", t.concentration_at(year).unwrap_or(f64::NAN), gas.unit());
        }
        println!();
    }

    let stock = 100.0;
    println!(
        "CH4 stock 100 after one 11.8-year lifetime: {:.3}",
        efold_decay(stock, 11.8, 11.8)?
    );

    let mut csv = Vec::new();
    write_trajectories_csv(&mut csv, &trajectories)?;
    let text = String::from_utf8_lossy(&csv);
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
