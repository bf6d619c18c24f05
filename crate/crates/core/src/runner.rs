//! Config-driven batch run: ingest, scenarios, climate, damages, risk,
//! tables and surfaces, with a hashed manifest of every artifact written.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::climate::ForcingParams;
use crate::damages::{fit_exponential, residual_sigma_curve, scale_heat_curve, DamagesTarget, ExpCurve};
use crate::discount::{load_crisis_events, wtp_stats, CrisisEvent, DiscountSpec, WtpStats};
use crate::emissions::{write_trajectories_csv, Gas};
use crate::error::{Error, Result};
use crate::ingest::{cpi_adjust, load_damages, load_macro, load_yields, DamagesSeries};
use crate::model::{simulate, simulate_all, SimulationRun};
use crate::risk::{risk_over_span, write_risk_csv};
use crate::scenario::{CarbonSupply, Catalog, Scenario};
use crate::surface::{sc_ghg_surfaces, total_pvfl_surface, export_surface, SurfaceAnnotations, SurfaceContext, SurfaceOptions};

pub const TABLE_SPANS: [u32; 8] = [10, 30, 50, 100, 300, 500, 1000, 1500];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// Scale OHC onto the exponential fitted to the damages.
    #[default]
    Fitted,
    /// Scale OHC onto the damages observations themselves.
    Observed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceStage {
    pub gases: Vec<Gas>,
    pub emission_year: i32,
    pub scenario_low: String,
    pub scenario_high: String,
    /// Scenario for the whole-path PV surface; none skips it.
    pub total_scenario: Option<String>,
    pub options: SurfaceOptions,
    /// Overrides the scalar from the damages fit.
    pub dollars_per_joule: Option<f64>,
}

impl Default for SurfaceStage {
    fn default() -> Self {
        SurfaceStage {
            gases: vec![Gas::Co2, Gas::Ch4, Gas::N2o, Gas::Fgas],
            emission_year: 2025,
            scenario_low: "baseline-low".into(),
            scenario_high: "s-aerosol-high-permafrost".into(),
            total_scenario: Some("baseline-low".into()),
            options: SurfaceOptions::default(),
            dollars_per_joule: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub damages: Option<PathBuf>,
    pub damages_base_year: i32,
    pub cpi: Option<PathBuf>,
    pub cpi_target_year: Option<i32>,
    pub yields: Option<PathBuf>,
    pub yield_tenor_years: u32,
    pub crisis_events: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub forcing: ForcingParams,
    /// Empty means every preset in the catalog.
    pub presets: Vec<String>,
    pub fit_scenario: Option<String>,
    pub fit_target: FitTarget,
    pub window: (i32, i32),
    pub risk_levels: Vec<f64>,
    pub risk_years: (i32, i32),
    pub discount: DiscountSpec,
    /// Replace the discount base rate and σ with the yield history's.
    pub discount_from_yields: bool,
    pub table_spans: Vec<u32>,
    pub surfaces: Option<SurfaceStage>,
    pub output_dir: PathBuf,
    pub report_format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            damages: None,
            damages_base_year: 2021,
            cpi: None,
            cpi_target_year: None,
            yields: None,
            yield_tenor_years: 30,
            crisis_events: None,
            catalog: None,
            forcing: ForcingParams::default(),
            presets: Vec::new(),
            fit_scenario: None,
            fit_target: FitTarget::Fitted,
            window: (1980, 2021),
            risk_levels: vec![0.1, 0.01, 0.001],
            risk_years: (1980, 2100),
            discount: DiscountSpec::default(),
            discount_from_yields: false,
            table_spans: TABLE_SPANS.to_vec(),
            surfaces: Some(SurfaceStage::default()),
            output_dir: PathBuf::from("out"),
            report_format: ReportFormat::Markdown,
        }
    }
}

impl RunConfig {
    /// Read a JSON config; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut self.damages, &mut self.cpi, &mut self.yields, &mut self.crisis_events, &mut self.catalog]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        let known = |name: &str| -> Result<()> {
            if catalog.has_preset(name) {
                Ok(())
            } else {
                Err(Error::Config(format!("unknown preset '{name}'")))
            }
        };
        for p in &self.presets {
            known(p)?;
        }
        if let Some(f) = &self.fit_scenario {
            known(f)?;
        }
        if let Some(s) = &self.surfaces {
            known(&s.scenario_low)?;
            known(&s.scenario_high)?;
            if let Some(t) = &s.total_scenario {
                known(t)?;
            }
            s.options.validate()?;
            if s.dollars_per_joule.is_none() && self.damages.is_none() {
                return Err(Error::Config("surfaces need either a damages file or dollars_per_joule".into()));
            }
        }
        if self.cpi.is_some() != self.cpi_target_year.is_some() {
            return Err(Error::Config("cpi and cpi_target_year go together".into()));
        }
        if self.discount_from_yields && self.yields.is_none() {
            return Err(Error::Config("discount_from_yields needs a yields file".into()));
        }
        if self.window.1 < self.window.0 || self.risk_years.1 < self.risk_years.0 {
            return Err(Error::Config("year ranges must be ordered start:end".into()));
        }
        if self.risk_levels.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::Config("risk levels must lie in (0, 1)".into()));
        }
        self.discount.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub scenario: String,
    pub target: FitTarget,
    pub window: (i32, i32),
    pub wde: ExpCurve,
    pub wde_r_squared: f64,
    pub e_sigma: Option<ExpCurve>,
    pub dollars_per_joule: f64,
    pub r_squared: f64,
}

/// Check of the DICE comparison target: first year above +18 °C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiceCheck {
    pub preset: String,
    pub threshold_c: f64,
    pub target_year: i32,
    pub tolerance_years: i32,
    pub first_year_above: Option<i32>,
    pub within_tolerance: bool,
    pub feedback_lambda: f64,
    pub ocean_coupling: f64,
    pub emissions_growth: Option<f64>,
    pub note: String,
}

pub fn dice_check(catalog: &Catalog, params: &ForcingParams) -> Result<Option<DiceCheck>> {
    let name = "dice-central";
    if !catalog.has_preset(name) {
        return Ok(None);
    }
    let s = catalog.preset(name)?;
    let run = simulate(&s, params, &[])?;
    let first = run.climate.first_year_above(18.0);
    let (target, tol) = (2210, 30);
    let within = first.is_some_and(|y| (y - target).abs() <= tol);
    let growth = match s.supply {
        CarbonSupply::Exponential { growth, .. } => Some(growth),
        CarbonSupply::Logistic(_) => None,
    };
    let note = match first {
        Some(y) if within => format!("+18 °C first exceeded in {y}, {} years from the {target} target", y - target),
        Some(y) => format!("+18 °C first exceeded in {y}; misses the {target} target by more than {tol} years under this calibration"),
        None => format!("+18 °C never exceeded within the horizon; misses the {target} target under this calibration"),
    };
    Ok(Some(DiceCheck {
        preset: name.into(),
        threshold_c: 18.0,
        target_year: target,
        tolerance_years: tol,
        first_year_above: first,
        within_tolerance: within,
        feedback_lambda: params.feedback_lambda,
        ocean_coupling: params.ocean_coupling,
        emissions_growth: growth,
        note,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifacts: Vec<Artifact>,
    pub presets: Vec<String>,
    pub discount: DiscountSpec,
    pub fit: Option<FitSummary>,
    pub wtp: Option<WtpStats>,
    pub dice_target: Option<DiceCheck>,
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn artifact(&self, path: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.path == path)
    }
}

/// Writes files under one root and removes them all on failure.
struct Outputs {
    root: PathBuf,
    written: Vec<PathBuf>,
    created_dirs: Vec<PathBuf>,
    artifacts: BTreeMap<String, Artifact>,
}

impl Outputs {
    fn new(root: &Path) -> Self {
        Outputs {
            root: root.to_path_buf(),
            written: Vec::new(),
            created_dirs: Vec::new(),
            artifacts: BTreeMap::new(),
        }
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<()> {
        let mut missing = Vec::new();
        let mut cur = Some(dir);
        while let Some(d) = cur {
            if d.as_os_str().is_empty() || d.exists() {
                break;
            }
            missing.push(d.to_path_buf());
            cur = d.parent();
        }
        for d in missing.into_iter().rev() {
            std::fs::create_dir(&d).map_err(|e| Error::io(&d, e))?;
            self.created_dirs.push(d);
        }
        Ok(())
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            self.ensure_dir(parent)?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        self.record(rel, bytes);
        Ok(())
    }

    fn record(&mut self, rel: &str, bytes: &[u8]) {
        self.artifacts.insert(
            rel.to_string(),
            Artifact {
                path: rel.to_string(),
                sha256: hex::encode(Sha256::digest(bytes)),
                bytes: bytes.len() as u64,
            },
        );
    }

    /// Register files written by someone else under the root.
    fn adopt(&mut self, paths: &[PathBuf]) -> Result<()> {
        for p in paths {
            self.written.push(p.clone());
            let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
            let rel = p
                .strip_prefix(&self.root)
                .unwrap_or(p)
                .to_string_lossy()
                .replace('\\', "/");
            self.record(&rel, &bytes);
        }
        Ok(())
    }

    fn rollback(&mut self) {
        for p in self.written.drain(..) {
            let _ = std::fs::remove_file(p);
        }
        for d in self.created_dirs.drain(..).rev() {
            let _ = std::fs::remove_dir(d);
        }
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage {
            stage: name,
            source: Box::new(other),
        },
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Execute the configured stages, writing into `config.output_dir`.
/// On any error every file this run wrote is removed again.
pub fn run(config: &RunConfig) -> Result<Manifest> {
    let mut out = Outputs::new(&config.output_dir);
    match run_stages(config, &mut out) {
        Ok(m) => Ok(m),
        Err(e) => {
            out.rollback();
            Err(e)
        }
    }
}

struct Loaded {
    damages: Option<DamagesSeries>,
    events: Option<Vec<CrisisEvent>>,
    discount: DiscountSpec,
}

fn ingest_stage(config: &RunConfig) -> Result<Loaded> {
    let damages = match &config.damages {
        None => None,
        Some(p) => {
            let d = load_damages(p, config.damages_base_year)?;
            match (&config.cpi, config.cpi_target_year) {
                (Some(c), Some(y)) => Some(cpi_adjust(&d, &load_macro(c)?, y)?),
                _ => Some(d),
            }
        }
    };
    let events = config.crisis_events.as_ref().map(load_crisis_events).transpose()?;
    let discount = match (&config.yields, config.discount_from_yields) {
        (Some(p), true) => DiscountSpec::from_yields(&load_yields(p, config.yield_tenor_years)?, config.discount.band)?,
        (Some(p), false) => {
            load_yields(p, config.yield_tenor_years)?;
            config.discount
        }
        (None, _) => config.discount,
    };
    Ok(Loaded {
        damages,
        events,
        discount,
    })
}

fn run_stages(config: &RunConfig, out: &mut Outputs) -> Result<Manifest> {
    let catalog = stage(
        "scenarios",
        match &config.catalog {
            Some(p) => Catalog::load(p),
            None => Ok(Catalog::shipped()),
        },
    )?;
    stage("config", config.validate(&catalog))?;
    let loaded = stage("ingest", ingest_stage(config))?;
    let mut notes = Vec::new();

    let names: Vec<String> = if config.presets.is_empty() {
        catalog.preset_names(None).into_iter().map(String::from).collect()
    } else {
        config.presets.clone()
    };
    let scenarios = stage(
        "scenarios",
        names.iter().map(|n| catalog.preset(n)).collect::<Result<Vec<Scenario>>>(),
    )?;

    let runs = stage("climate", simulate_all(&scenarios, &config.forcing))?;
    let mut by_name: BTreeMap<&str, &SimulationRun> = BTreeMap::new();
    for (s, r) in scenarios.iter().zip(&runs) {
        let climate = stage("climate", csv_bytes(|b| r.climate.write_csv(b)))?;
        stage("climate", out.write(&format!("climate/{}.csv", s.name), &climate))?;
        let traj = stage("scenarios", csv_bytes(|b| write_trajectories_csv(b, &r.trajectories)))?;
        stage("scenarios", out.write(&format!("trajectories/{}.csv", s.name), &traj))?;
        by_name.insert(&s.name, r);
    }
    let dice = stage("climate", dice_check(&catalog, &config.forcing))?;
    if let Some(d) = &dice {
        if !d.within_tolerance {
            notes.push(d.note.clone());
        }
    }

    let extra_run = |name: &str| -> Result<SimulationRun> { simulate(&catalog.preset(name)?, &config.forcing, &[]) };

    let mut fit = None;
    if let Some(damages) = &loaded.damages {
        let fit_name = config.fit_scenario.clone().unwrap_or_else(|| names[0].clone());
        let owned;
        let run = match by_name.get(fit_name.as_str()) {
            Some(r) => *r,
            None => {
                owned = stage("damages", extra_run(&fit_name))?;
                &owned
            }
        };
        let summary = stage("damages", damages_stage(config, damages, run, &fit_name, out))?;
        fit = Some(summary);
    }

    let wtp = match &loaded.events {
        Some(ev) => Some(stage("report", wtp_stats(ev))?),
        None => None,
    };
    stage("report", write_tables(config, loaded.events.as_deref(), wtp.as_ref(), out))?;

    if let Some(surf) = &config.surfaces {
        let scalar = surf
            .dollars_per_joule
            .or(fit.as_ref().map(|f| f.dollars_per_joule))
            .expect("validated");
        let swapped = stage("surfaces", surfaces_stage(config, &catalog, surf, loaded.discount, scalar, out))?;
        notes.extend(swapped);
    }

    let manifest = Manifest {
        artifacts: out.artifacts.values().cloned().collect(),
        presets: names,
        discount: loaded.discount,
        fit,
        wtp,
        dice_target: dice,
        notes,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    let path = out.root.join("manifest.json");
    stage("report", std::fs::write(&path, text).map_err(|e| Error::io(&path, e)))?;
    out.written.push(path);
    Ok(manifest)
}

fn damages_stage(
    config: &RunConfig,
    damages: &DamagesSeries,
    run: &SimulationRun,
    scenario: &str,
    out: &mut Outputs,
) -> Result<FitSummary> {
    let (start, end) = config.window;
    let window_points = damages.window(start, end);
    let wde = fit_exponential(&window_points, start)?;
    let target = match config.fit_target {
        FitTarget::Fitted => DamagesTarget::Fitted(&wde.curve),
        FitTarget::Observed => DamagesTarget::Observed(damages),
    };
    let scaled = scale_heat_curve(&run.climate, target, config.window)?;
    let windowed = DamagesSeries::new(window_points, damages.base_year)?;
    let sigma = residual_sigma_curve(&windowed, &wde.curve)?;

    let mut bytes = Vec::new();
    write_risk_csv(&mut bytes, &scaled, &wde.curve, &sigma, &config.risk_levels, config.risk_years)?;
    out.write("damages/risk_curves.csv", &bytes)?;

    let summary = FitSummary {
        scenario: scenario.to_string(),
        target: config.fit_target,
        window: config.window,
        wde: wde.curve,
        wde_r_squared: wde.r_squared,
        e_sigma: Some(sigma),
        dollars_per_joule: scaled.scalar,
        r_squared: scaled.r_squared,
    };
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    out.write("damages/fit.json", text.as_bytes())?;
    Ok(summary)
}

fn write_tables(config: &RunConfig, events: Option<&[CrisisEvent]>, wtp: Option<&WtpStats>, out: &mut Outputs) -> Result<()> {
    let fmt = config.report_format;
    let table = risk_span_table(&config.risk_levels, &config.table_spans)?;
    out.write(&format!("tables/risk_span.{}", fmt.extension()), table_report(&table, fmt)?.as_bytes())?;
    if let (Some(ev), Some(stats)) = (events, wtp) {
        let table = wtp_table(ev, stats);
        out.write(&format!("tables/wtp.{}", fmt.extension()), table_report(&table, fmt)?.as_bytes())?;
    }
    Ok(())
}

fn surfaces_stage(
    config: &RunConfig,
    catalog: &Catalog,
    surf: &SurfaceStage,
    spec: DiscountSpec,
    scalar: f64,
    out: &mut Outputs,
) -> Result<Vec<String>> {
    let ctx = SurfaceContext {
        params: config.forcing,
        dollars_per_joule: scalar,
        spec,
        options: surf.options.clone(),
    };
    let annotations = SurfaceAnnotations::default();
    let low = catalog.preset(&surf.scenario_low)?;
    let high = catalog.preset(&surf.scenario_high)?;
    let dir = out.root.join("surfaces");
    out.ensure_dir(&dir)?;
    let mut notes = Vec::new();
    for grid in sc_ghg_surfaces(&surf.gases, &low, &high, surf.emission_year, &ctx)? {
        if grid.swapped_cells > 0 {
            notes.push(format!(
                "{}: {} cells where '{}' priced below '{}'; envelope taken cellwise",
                grid.label, grid.swapped_cells, grid.scenario_high, grid.scenario_low
            ));
        }
        let file = dir.join(format!("{}.csv", grid.label.to_ascii_lowercase().replace('-', "_")));
        let written = export_surface(&grid, &annotations, &file)?;
        out.adopt(&written)?;
    }
    if let Some(name) = &surf.total_scenario {
        let grid = total_pvfl_surface(&catalog.preset(name)?, surf.emission_year, &ctx)?;
        let written = export_surface(&grid, &annotations, &dir.join("pv_fl.csv"))?;
        out.adopt(&written)?;
    }
    Ok(notes)
}

/// A rendered-agnostic table: title, header and string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn pct(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

/// Chance of at least one extreme year, risk level × span, in percent.
pub fn risk_span_table(levels: &[f64], spans: &[u32]) -> Result<Table> {
    let mut header = vec!["r".to_string()];
    header.extend(spans.iter().map(|s| s.to_string()));
    let rows = levels
        .iter()
        .map(|&r| {
            let mut row = vec![format!("{:.1}%", r * 100.0)];
            for &s in spans {
                row.push(pct(risk_over_span(r, s)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        title: "Risk of at least one extreme year over a span".into(),
        header,
        rows,
    })
}

pub fn wtp_table(events: &[CrisisEvent], stats: &WtpStats) -> Table {
    let mut rows: Vec<Vec<String>> = events
        .iter()
        .map(|e| vec![e.name.clone(), pct(e.pct_change_from_baseline), pct(e.pct_of_gdp)])
        .collect();
    for (label, v) in [
        ("Mean", stats.mean),
        ("Median", stats.median),
        ("Maximum", stats.max),
        ("Minimum", stats.min),
        ("σ", stats.sigma),
    ] {
        rows.push(vec![label.into(), String::new(), pct(v)]);
    }
    Table {
        title: "Size of monetary response to crises".into(),
        header: vec!["event".into(), "change from baseline".into(), "share of GDP".into()],
        rows,
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_markdown(self))
    }
}

fn render_markdown(t: &Table) -> String {
    let mut s = format!("## {}\n\n", t.title);
    s += &format!("| {} |\n", t.header.join(" | "));
    s += &format!("|{}\n", "---|".repeat(t.header.len()));
    for r in &t.rows {
        s += &format!("| {} |\n", r.join(" | "));
    }
    s
}

/// Render a table as markdown or CSV. Empty tables are refused.
pub fn table_report(table: &Table, format: ReportFormat) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InsufficientData(format!("table '{}' has no rows", table.title)));
    }
    match format {
        ReportFormat::Markdown => Ok(render_markdown(table)),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header)?;
            for r in &table.rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::io("<table>", e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 cells"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_cells() {
        let t = risk_span_table(&[0.1, 0.01, 0.001], &TABLE_SPANS).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1][4], "63.40%");
        assert_eq!(t.rows[2][8], "77.70%");
        assert_eq!(t.rows[0][1], "65.13%");
    }

    #[test]
    fn formats_agree() {
        let t = risk_span_table(&[0.01], &[10, 100]).unwrap();
        let md = table_report(&t, ReportFormat::Markdown).unwrap();
        let csv = table_report(&t, ReportFormat::Csv).unwrap();
        let nums = |s: &str| -> Vec<String> {
            s.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '%'))
                .filter(|w| w.ends_with('%'))
                .map(String::from)
                .collect()
        };
        assert_eq!(nums(&md), nums(&csv));
        assert!("pdf".parse::<ReportFormat>().is_err());
    }

    #[test]
    fn empty_table_refused() {
        let t = risk_span_table(&[], &[10]).unwrap();
        assert!(matches!(table_report(&t, ReportFormat::Csv), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn unknown_preset_is_config_error() {
        let cfg = RunConfig {
            presets: vec!["nope".into()],
            ..RunConfig::default()
        };
        let err = cfg.validate(&Catalog::shipped()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dice_check_reports() {
        let d = dice_check(&Catalog::shipped(), &ForcingParams::default()).unwrap().unwrap();
        assert!(d.first_year_above.is_some());
    }
}
