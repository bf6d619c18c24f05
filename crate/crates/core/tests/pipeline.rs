use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use heatcost::runner::{run, RunConfig, SurfaceStage};
use heatcost::scenario::Catalog;
use heatcost::surface::SurfaceOptions;
use heatcost::Error;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn small_config(out: &Path) -> RunConfig {
    RunConfig {
        damages: Some(data("demo/damages_synthetic.csv")),
        crisis_events: Some(data("crisis_events.csv")),
        presets: vec!["baseline-low".into()],
        risk_levels: vec![0.01],
        surfaces: Some(SurfaceStage {
            gases: vec![heatcost::emissions::Gas::Co2],
            options: SurfaceOptions {
                discount_points: 3,
                spans: vec![10, 100, 1000],
                ..SurfaceOptions::default()
            },
            ..SurfaceStage::default()
        }),
        output_dir: out.to_path_buf(),
        ..RunConfig::default()
    }
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = std::fs::read_dir(dir) {
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(files_under(&p));
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn minimal_config_writes_expected_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(&small_config(tmp.path())).unwrap();
    for name in [
        "climate/baseline-low.csv",
        "trajectories/baseline-low.csv",
        "damages/risk_curves.csv",
        "damages/fit.json",
        "tables/risk_span.md",
        "tables/wtp.md",
        "surfaces/sc_co2.csv",
        "surfaces/sc_co2.json",
        "surfaces/pv_fl.csv",
    ] {
        let a = m.artifact(name).unwrap_or_else(|| panic!("missing {name}"));
        assert_eq!(a.sha256.len(), 64);
        assert!(tmp.path().join(name).is_file());
    }
    assert!(tmp.path().join("manifest.json").is_file());
    let header = std::fs::read_to_string(tmp.path().join("damages/risk_curves.csv")).unwrap();
    assert!(header.starts_with("year,fwd_m,wde,e_sigma,risk1\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = run(&small_config(a.path())).unwrap();
    let mb = run(&small_config(b.path())).unwrap();
    let hashes = |m: &heatcost::runner::Manifest| m.artifacts.iter().map(|x| (x.path.clone(), x.sha256.clone())).collect::<Vec<_>>();
    assert_eq!(hashes(&ma), hashes(&mb));
}

#[test]
fn every_preset_gets_a_climate_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        surfaces: None,
        output_dir: tmp.path().to_path_buf(),
        ..RunConfig::default()
    };
    let m = run(&cfg).unwrap();
    let names = Catalog::shipped().preset_names(None).len();
    assert_eq!(names, 21);
    let climate = m.artifacts.iter().filter(|a| a.path.starts_with("climate/")).count();
    assert_eq!(climate, 21);
}

#[test]
fn stages_without_inputs_are_skipped() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        presets: vec!["dice-low".into()],
        surfaces: None,
        output_dir: tmp.path().to_path_buf(),
        ..RunConfig::default()
    };
    let m = run(&cfg).unwrap();
    assert!(m.artifact("climate/dice-low.csv").is_some());
    assert!(m.artifact("tables/risk_span.md").is_some());
    assert!(m.artifacts.iter().all(|a| !a.path.starts_with("surfaces/") && !a.path.starts_with("damages/")));
}

#[test]
fn failed_run_leaves_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let mut cfg = small_config(&out);
    cfg.surfaces.as_mut().unwrap().scenario_high = "dice-high".into();
    cfg.surfaces.as_mut().unwrap().options.spans = vec![10, 1500];
    let err = run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    assert!(files_under(&out).is_empty(), "{:?}", files_under(&out));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(tmp.path());
    cfg.presets = vec!["no-such-preset".into()];
    let err = run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn config_file_paths_resolve_against_its_directory() {
    let cfg = RunConfig::load(data("demo/run_demo.json")).unwrap();
    assert_eq!(cfg.damages.as_deref(), Some(data("demo/damages_synthetic.csv").as_path()));
    assert!(cfg.crisis_events.unwrap().ends_with("demo/../crisis_events.csv"));
    let missing = RunConfig::load(data("demo/none.json")).unwrap_err();
    assert!(matches!(missing, Error::Config(_)));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heatcost"))
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |cmd: &mut Command| cmd.env("HEATCOST_OUTPUT_DIR", tmp.path()).output().unwrap().status.code();

    assert_eq!(code(cli().args(["wtp", "--events"]).arg(data("crisis_events.csv"))), Some(0));
    assert_eq!(code(cli().args(["run-all", "--config", "/nonexistent/cfg.json"])), Some(2));
    assert_eq!(code(cli().arg("no-such-command")), Some(2));

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "year,value\n1980,abc\n").unwrap();
    assert_eq!(code(cli().args(["ingest", "--kind", "damages"]).arg(&bad)), Some(3));

    assert_eq!(
        code(cli().args(["surface", "--low", "dice-low", "--high", "dice-high", "--grid", "3x3", "--dollars-per-joule", "1e-12"])),
        Some(4)
    );
}

#[test]
fn cli_output_dir_comes_from_env() {
    let tmp = tempfile::tempdir().unwrap();
    let status = cli()
        .args(["simulate", "--preset", "baseline-low"])
        .env("HEATCOST_OUTPUT_DIR", tmp.path())
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("climate/baseline-low.csv").is_file());

    let flag = tmp.path().join("flag");
    let status = cli()
        .args(["simulate", "--preset", "baseline-low", "--out"])
        .arg(&flag)
        .env("HEATCOST_OUTPUT_DIR", tmp.path().join("ignored"))
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(flag.join("climate/baseline-low.csv").is_file());
}
