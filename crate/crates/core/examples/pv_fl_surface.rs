// Present value of all future weather damages from 2025 over the ±2σ
// discount band and spans up to 1500 years, against 2025 GDP.
//
// ```bash
// cargo run --example pv_fl_surface
// ```

use heatcost::climate::ForcingParams;
use heatcost::discount::DiscountSpec;
use heatcost::scenario::Catalog;
use heatcost::surface::{total_pvfl_surface, SurfaceContext, SurfaceOptions, GDP_2025};

pub fn run_example() -> heatcost::Result<()> {
    let scenario = Catalog::shipped().preset("baseline-low")?;
    let ctx = SurfaceContext {
        params: ForcingParams::default(),
        dollars_per_joule: 5e-13,
        spec: DiscountSpec::default(),
        options: SurfaceOptions {
            discount_points: 9,
            spans: vec![10, 30, 100, 300, 1000, 1500],
            ..SurfaceOptions::default()
        },
    };
    let grid = total_pvfl_surface(&scenario, 2025, &ctx)?;
    println!("span:    {:?}", grid.span_axis);
    for (i, d) in grid.discount_axis.iter().enumerate() {
        let row: Vec<String> = grid.values_low[i].iter().map(|v| format!("{:8.2}", v / GDP_2025)).collect();
        println!("{:>6.2}%  {}  (× 2025 GDP)", d * 100.0, row.join(" "));
    }
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
