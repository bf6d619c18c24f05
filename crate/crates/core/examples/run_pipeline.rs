// Drive the whole pipeline from a config and inspect the manifest.
//
// ```bash
// cargo run --release --example run_pipeline
// ```

use std::path::PathBuf;

use heatcost::runner::{run, RunConfig, SurfaceStage};
use heatcost::surface::SurfaceOptions;

pub fn run_example() -> heatcost::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out = std::env::temp_dir().join(format!("heatcost-run-{}", std::process::id()));
    let config = RunConfig {
        damages: Some(data.join("demo/damages_synthetic.csv")),
        crisis_events: Some(data.join("crisis_events.csv")),
        presets: vec!["baseline-low".into(), "s-aerosol-high-permafrost".into()],
        surfaces: Some(SurfaceStage {
            options: SurfaceOptions::with_grid(5, 6),
            ..SurfaceStage::default()
        }),
        output_dir: out.clone(),
        ..RunConfig::default()
    };
    let manifest = run(&config)?;
    for a in &manifest.artifacts {
        println!("{:<44} {:>9} bytes  {}", a.path, a.bytes, &a.sha256[..16]);
    }
    if let Some(fit) = &manifest.fit {
        println!("damages scalar {:.4e} $/J, R2 {:.4}", fit.dollars_per_joule, fit.r_squared);
    }
    if let Some(d) = &manifest.dice_target {
        println!("DICE check: {}", d.note);
    }
    for n in &manifest.notes {
        println!("note: {n}");
    }
    let _ = std::fs::remove_dir_all(&out);
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
