// Social cost of each gas emitted in 2025 over a discount × span grid,
// with the scenario envelope, exported as CSV plus JSON sidecar.
//
// ```bash
// cargo run --release --example scghg_surface
// ```

use heatcost::climate::ForcingParams;
use heatcost::discount::DiscountSpec;
use heatcost::emissions::Gas;
use heatcost::scenario::Catalog;
use heatcost::surface::{export_surface, sc_ghg_surfaces, SurfaceAnnotations, SurfaceContext, SurfaceOptions};

pub fn run_example() -> heatcost::Result<()> {
    let catalog = Catalog::shipped();
    let low = catalog.preset("baseline-low")?;
    let high = catalog.preset("s-aerosol-high-permafrost")?;
    let ctx = SurfaceContext {
        params: ForcingParams::default(),
        dollars_per_joule: 5e-13,
        spec: DiscountSpec::default(),
        options: SurfaceOptions {
            discount_points: 5,
            spans: vec![10, 100, 300, 1500],
            ..SurfaceOptions::default()
        },
    };
    let gases = [Gas::Co2, Gas::Ch4, Gas::N2o, Gas::Fgas];
    let grids = sc_ghg_surfaces(&gases, &low, &high, 2025, &ctx)?;
    for g in &grids {
        println!("{} ({}), rows = discount, columns = spans {:?}", g.label, g.unit, g.span_axis);
        for (i, d) in g.discount_axis.iter().enumerate() {
            let cells: Vec<String> = (0..g.span_axis.len())
                .map(|j| {
                    let (lo, hi) = g.cell(i, j);
                    format!("{lo:>10.3e}..{hi:<10.3e}")
                })
                .collect();
            println!("  {:>6.2}%  {}", d * 100.0, cells.join(" "));
        }
    }

    let dir = std::env::temp_dir().join(format!("heatcost-surface-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| heatcost::Error::Io { path: dir.clone(), source: e })?;
    for p in export_surface(&grids[0], &SurfaceAnnotations::default(), &dir.join("sc_co2.csv"))? {
        println!("wrote {}", p.display());
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
