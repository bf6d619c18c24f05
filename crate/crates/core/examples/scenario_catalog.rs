// Browse the shipped scenario catalog and build a custom scenario from
// explicit axes.
//
// ```bash
// cargo run --example scenario_catalog
// ```

use heatcost::scenario::{build_scenario, Catalog, Family};

pub fn run_example() -> heatcost::Result<()> {
    let catalog = Catalog::shipped();
    for family in [Family::Primary, Family::Dice] {
        let names = catalog.preset_names(Some(family));
        println!("{family:?}: {} presets", names.len());
        for name in names {
            let s = catalog.preset(name)?;
            println!(
                "  {name:<36} {:?} {} {:?} {:?} to {}",
                s.carbon_supply,
                s.remainder.id,
                s.aerosol_option,
                s.permafrost_option,
                s.end_year()
            );
        }
    }

    let custom = build_scenario(&serde_json::json!({
        "name": "high-supply-weak-sink",
        "carbon_supply": "high",
        "remainder_curve": "C_RH",
        "aerosol_option": "none",
        "permafrost_option": "on",
        "horizon_years": 500
    }))?;
    println!("custom: {} runs {}..={}", custom.name, custom.start_year(), custom.end_year());
    Ok(())
}

fn main() -> heatcost::Result<()> {
    run_example()
}
