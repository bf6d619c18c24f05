//! Every cargo example must run to completion.

#[allow(dead_code)]
mod bond_discounting {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bond_discounting.rs"));
}

#[test]
fn example_bond_discounting() {
    bond_discounting::run_example().expect("bond_discounting");
}

#[allow(dead_code)]
mod climate_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/climate_run.rs"));
}

#[test]
fn example_climate_run() {
    climate_run::run_example().expect("climate_run");
}

#[allow(dead_code)]
mod damages_fit {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/damages_fit.rs"));
}

#[test]
fn example_damages_fit() {
    damages_fit::run_example().expect("damages_fit");
}

#[allow(dead_code)]
mod gas_trajectories {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gas_trajectories.rs"));
}

#[test]
fn example_gas_trajectories() {
    gas_trajectories::run_example().expect("gas_trajectories");
}

#[allow(dead_code)]
mod ingest_series {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ingest_series.rs"));
}

#[test]
fn example_ingest_series() {
    ingest_series::run_example().expect("ingest_series");
}

#[allow(dead_code)]
mod ohc_calibration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ohc_calibration.rs"));
}

#[test]
fn example_ohc_calibration() {
    ohc_calibration::run_example().expect("ohc_calibration");
}

#[allow(dead_code)]
mod pv_fl_surface {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pv_fl_surface.rs"));
}

#[test]
fn example_pv_fl_surface() {
    pv_fl_surface::run_example().expect("pv_fl_surface");
}

#[allow(dead_code)]
mod remainder_curves {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/remainder_curves.rs"));
}

#[test]
fn example_remainder_curves() {
    remainder_curves::run_example().expect("remainder_curves");
}

#[allow(dead_code)]
mod risk_curves {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/risk_curves.rs"));
}

#[test]
fn example_risk_curves() {
    risk_curves::run_example().expect("risk_curves");
}

#[allow(dead_code)]
mod run_pipeline {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/run_pipeline.rs"));
}

#[test]
fn example_run_pipeline() {
    run_pipeline::run_example().expect("run_pipeline");
}

#[allow(dead_code)]
mod scenario_catalog {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenario_catalog.rs"));
}

#[test]
fn example_scenario_catalog() {
    scenario_catalog::run_example().expect("scenario_catalog");
}

#[allow(dead_code)]
mod scghg_surface {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scghg_surface.rs"));
}

#[test]
fn example_scghg_surface() {
    scghg_surface::run_example().expect("scghg_surface");
}
