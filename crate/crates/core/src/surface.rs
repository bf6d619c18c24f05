//! Social-cost surfaces over (discount rate × span of years).
//!
//! Per-gas surfaces price the extra damages caused by a pulse of the gas in
//! the emission year; the total surface prices the whole damages path.
//! Damages are `dollars_per_joule × OHC`, the heat-conjecture scaling.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::climate::ForcingParams;
use crate::discount::{pv_partial_sums, DiscountSpec, BOND_MEAN_RATE};
use crate::emissions::{Gas, Pulse};
use crate::error::{Error, Result};
use crate::ingest::fmt_f64;
use crate::model::{simulate, SimulationRun};
use crate::scenario::Scenario;

/// Projected 2025 gross domestic product, USD.
pub const GDP_2025: f64 = 24.7e12;

/// Tonnage weight `G(i)` applied to each year's marginal damages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TonnageMode {
    /// `G ≡ 1`: dollars per tonne.
    #[default]
    Unit,
    /// Scenario emissions of the gas in year `i`.
    PerYear,
    /// Scenario emissions of the gas in the emission year, held constant.
    ConstantAtStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceOptions {
    pub discount_points: usize,
    pub spans: Vec<u32>,
    pub pulse_tonnes: f64,
    pub tonnage: TonnageMode,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions {
            discount_points: 41,
            spans: log_spans(30, 10, 1500),
            pulse_tonnes: 1e6,
            tonnage: TonnageMode::Unit,
        }
    }
}

impl SurfaceOptions {
    pub fn with_grid(discount_points: usize, span_points: usize) -> Self {
        SurfaceOptions {
            discount_points,
            spans: log_spans(span_points, 10, 1500),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.discount_points < 2 {
            return Err(Error::Config("discount axis needs at least 2 points".into()));
        }
        if self.spans.is_empty() || self.spans.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("spans must be non-empty and strictly increasing".into()));
        }
        if !(self.pulse_tonnes > 0.0) || !self.pulse_tonnes.is_finite() {
            return Err(Error::Config(format!("pulse size must be positive, got {}", self.pulse_tonnes)));
        }
        Ok(())
    }
}

/// `count` log-spaced integer spans from `min` to `max`, duplicates dropped.
pub fn log_spans(count: usize, min: u32, max: u32) -> Vec<u32> {
    if count <= 1 {
        return vec![max];
    }
    let (a, b) = ((min as f64).ln(), (max as f64).ln());
    let mut spans: Vec<u32> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u32)
        .collect();
    spans.dedup();
    spans
}

/// Everything a surface needs beyond the scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceContext {
    pub params: ForcingParams,
    pub dollars_per_joule: f64,
    pub spec: DiscountSpec,
    pub options: SurfaceOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub label: String,
    pub unit: String,
    pub emission_year: i32,
    pub scenario_low: String,
    pub scenario_high: String,
    pub discount_axis: Vec<f64>,
    pub span_axis: Vec<u32>,
    /// `values_low[i][j]` at `discount_axis[i]`, `span_axis[j]`.
    pub values_low: Vec<Vec<f64>>,
    pub values_high: Vec<Vec<f64>>,
    /// Cells where the scenario named high priced below the one named low.
    pub swapped_cells: usize,
}

impl SurfaceGrid {
    pub fn validate(&self) -> Result<()> {
        if self.discount_axis.windows(2).any(|w| w[1] <= w[0]) || self.span_axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("surface axes must be strictly increasing".into()));
        }
        let shape_ok = |v: &Vec<Vec<f64>>| {
            v.len() == self.discount_axis.len() && v.iter().all(|r| r.len() == self.span_axis.len())
        };
        if !shape_ok(&self.values_low) || !shape_ok(&self.values_high) {
            return Err(Error::Validation("surface values do not match the axes".into()));
        }
        for (lo, hi) in self.values_low.iter().flatten().zip(self.values_high.iter().flatten()) {
            if hi < lo {
                return Err(Error::Validation("envelope high lies below low".into()));
            }
        }
        Ok(())
    }

    pub fn cell(&self, discount_index: usize, span_index: usize) -> (f64, f64) {
        (
            self.values_low[discount_index][span_index],
            self.values_high[discount_index][span_index],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceAnnotations {
    pub tab_a: f64,
    pub tab_b: f64,
    pub tab_c: u32,
    pub reference_contours: Vec<(String, f64)>,
}

impl Default for SurfaceAnnotations {
    fn default() -> Self {
        SurfaceAnnotations {
            tab_a: BOND_MEAN_RATE,
            tab_b: 0.00483,
            tab_c: 300,
            reference_contours: vec![("GDP 2025".into(), GDP_2025)],
        }
    }
}

/// Per-tonne marginal damages from a pulse in `emission_year`, one entry
/// per year from the emission year to the end of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDamages {
    pub emission_year: i32,
    pub per_tonne: Vec<f64>,
    /// Scenario emissions of the pulsed gas over the same years.
    pub emissions: Vec<f64>,
}

impl MarginalDamages {
    pub fn weighted(&self, mode: TonnageMode) -> Vec<f64> {
        match mode {
            TonnageMode::Unit => self.per_tonne.clone(),
            TonnageMode::PerYear => self.per_tonne.iter().zip(&self.emissions).map(|(m, g)| m * g).collect(),
            TonnageMode::ConstantAtStart => {
                let g = self.emissions[0];
                self.per_tonne.iter().map(|m| m * g).collect()
            }
        }
    }
}

fn check_emission_year(scenario: &Scenario, emission_year: i32, max_span: u32) -> Result<()> {
    if emission_year < scenario.start_year() {
        return Err(Error::Range(format!(
            "emission year {emission_year} precedes scenario start {}",
            scenario.start_year()
        )));
    }
    let last = emission_year as i64 + max_span as i64;
    if last > scenario.end_year() as i64 {
        return Err(Error::Range(format!(
            "span {max_span} from {emission_year} runs to {last}, past the '{}' horizon {}",
            scenario.name,
            scenario.end_year()
        )));
    }
    Ok(())
}

/// Marginal damages against an already simulated base run.
pub fn marginal_damages_from(
    scenario: &Scenario,
    base: &SimulationRun,
    gas: Gas,
    emission_year: i32,
    dollars_per_joule: f64,
    params: &ForcingParams,
    pulse_tonnes: f64,
) -> Result<MarginalDamages> {
    let pulse = Pulse {
        gas,
        year: emission_year,
        tonnes: pulse_tonnes,
    };
    let pulsed = simulate(scenario, params, &[pulse])?;
    let offset = (emission_year - base.climate.start_year()) as usize;
    let per_tonne = base.climate.states[offset..]
        .iter()
        .zip(&pulsed.climate.states[offset..])
        .map(|(b, p)| dollars_per_joule * (p.ohc - b.ohc) / pulse_tonnes)
        .collect();
    let emissions = base.trajectories[gas.index()].emissions[offset..].to_vec();
    Ok(MarginalDamages {
        emission_year,
        per_tonne,
        emissions,
    })
}

pub fn marginal_damages(
    scenario: &Scenario,
    gas: Gas,
    emission_year: i32,
    dollars_per_joule: f64,
    params: &ForcingParams,
    pulse_tonnes: f64,
) -> Result<MarginalDamages> {
    let base = simulate(scenario, params, &[])?;
    marginal_damages_from(scenario, &base, gas, emission_year, dollars_per_joule, params, pulse_tonnes)
}

fn discount_grid(flows: &[f64], rates: &[f64], spans: &[u32]) -> Result<Vec<Vec<f64>>> {
    rates.par_iter().map(|&d| pv_partial_sums(flows, d, spans)).collect()
}

fn envelope(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, usize) {
    let mut swapped = 0;
    let mut low = a;
    let mut high = b;
    for (lr, hr) in low.iter_mut().zip(high.iter_mut()) {
        for (l, h) in lr.iter_mut().zip(hr.iter_mut()) {
            if *h < *l {
                std::mem::swap(l, h);
                swapped += 1;
            }
        }
    }
    (low, high, swapped)
}

fn surface_preamble(scenarios: &[&Scenario], ctx: &SurfaceContext, emission_year: i32) -> Result<Vec<f64>> {
    ctx.options.validate()?;
    let max_span = *ctx.options.spans.last().expect("validated");
    for s in scenarios {
        check_emission_year(s, emission_year, max_span)?;
    }
    ctx.spec.rates(ctx.options.discount_points)
}

/// Social cost of one gas: the cellwise envelope of the two scenarios'
/// discounted per-tonne marginal damages.
pub fn sc_ghg_surface(
    gas: Gas,
    scenario_low: &Scenario,
    scenario_high: &Scenario,
    emission_year: i32,
    ctx: &SurfaceContext,
) -> Result<SurfaceGrid> {
    let rates = surface_preamble(&[scenario_low, scenario_high], ctx, emission_year)?;
    let spans = &ctx.options.spans;
    let grids = [scenario_low, scenario_high]
        .par_iter()
        .map(|s| {
            let m = marginal_damages(s, gas, emission_year, ctx.dollars_per_joule, &ctx.params, ctx.options.pulse_tonnes)?;
            discount_grid(&m.weighted(ctx.options.tonnage), &rates, spans)
        })
        .collect::<Result<Vec<_>>>()?;
    let [a, b]: [Vec<Vec<f64>>; 2] = grids.try_into().expect("two scenarios");
    let (values_low, values_high, swapped_cells) = envelope(a, b);
    let unit = match ctx.options.tonnage {
        TonnageMode::Unit => "USD per tonne",
        _ => "USD",
    };
    Ok(SurfaceGrid {
        label: format!("SC-{}", gas.code()),
        unit: unit.into(),
        emission_year,
        scenario_low: scenario_low.name.clone(),
        scenario_high: scenario_high.name.clone(),
        discount_axis: rates,
        span_axis: spans.clone(),
        values_low,
        values_high,
        swapped_cells,
    })
}

/// Per-gas surfaces sharing one base run per scenario.
pub fn sc_ghg_surfaces(
    gases: &[Gas],
    scenario_low: &Scenario,
    scenario_high: &Scenario,
    emission_year: i32,
    ctx: &SurfaceContext,
) -> Result<Vec<SurfaceGrid>> {
    let rates = surface_preamble(&[scenario_low, scenario_high], ctx, emission_year)?;
    let scenarios = [scenario_low, scenario_high];
    let bases = scenarios
        .par_iter()
        .map(|s| simulate(s, &ctx.params, &[]))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..gases.len()).flat_map(|g| [(g, 0), (g, 1)]).collect();
    let mut grids = jobs
        .par_iter()
        .map(|&(g, s)| {
            let m = marginal_damages_from(
                scenarios[s],
                &bases[s],
                gases[g],
                emission_year,
                ctx.dollars_per_joule,
                &ctx.params,
                ctx.options.pulse_tonnes,
            )?;
            discount_grid(&m.weighted(ctx.options.tonnage), &rates, &ctx.options.spans)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let unit = match ctx.options.tonnage {
        TonnageMode::Unit => "USD per tonne",
        _ => "USD",
    };
    Ok(gases
        .iter()
        .map(|gas| {
            let a = grids.next().expect("job per scenario");
            let b = grids.next().expect("job per scenario");
            let (values_low, values_high, swapped_cells) = envelope(a, b);
            SurfaceGrid {
                label: format!("SC-{}", gas.code()),
                unit: unit.into(),
                emission_year,
                scenario_low: scenario_low.name.clone(),
                scenario_high: scenario_high.name.clone(),
                discount_axis: rates.clone(),
                span_axis: ctx.options.spans.clone(),
                values_low,
                values_high,
                swapped_cells,
            }
        })
        .collect())
}

/// Present value of the whole damages path from `start_year`.
pub fn total_pvfl_surface(scenario: &Scenario, start_year: i32, ctx: &SurfaceContext) -> Result<SurfaceGrid> {
    let rates = surface_preamble(&[scenario], ctx, start_year)?;
    let run = simulate(scenario, &ctx.params, &[])?;
    let offset = (start_year - run.climate.start_year()) as usize;
    let flows: Vec<f64> = run.climate.states[offset..]
        .iter()
        .map(|s| ctx.dollars_per_joule * s.ohc)
        .collect();
    let values = discount_grid(&flows, &rates, &ctx.options.spans)?;
    Ok(SurfaceGrid {
        label: "PV_FL".into(),
        unit: "USD".into(),
        emission_year: start_year,
        scenario_low: scenario.name.clone(),
        scenario_high: scenario.name.clone(),
        discount_axis: rates,
        span_axis: ctx.options.spans.clone(),
        values_low: values.clone(),
        values_high: values,
        swapped_cells: 0,
    })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    label: &'a str,
    unit: &'a str,
    dollars: &'static str,
    coverage: &'static str,
    emission_year: i32,
    scenario_low: &'a str,
    scenario_high: &'a str,
    swapped_cells: usize,
    discount_axis: &'a [f64],
    span_axis: &'a [u32],
    annotations: &'a SurfaceAnnotations,
    tabs_inside_axes: TabsInside,
    csv: String,
}

#[derive(Serialize)]
struct TabsInside {
    tab_a: bool,
    tab_b: bool,
    tab_c: bool,
}

/// Long-form CSV `discount,span,value_low,value_high` at `path` plus a JSON
/// sidecar beside it. Returns both paths.
pub fn export_surface(grid: &SurfaceGrid, annotations: &SurfaceAnnotations, path: &Path) -> Result<Vec<PathBuf>> {
    grid.validate()?;
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("{other:?}")),
    })?;
    w.write_record(["discount", "span", "value_low", "value_high"])?;
    for (i, d) in grid.discount_axis.iter().enumerate() {
        for (j, n) in grid.span_axis.iter().enumerate() {
            let (lo, hi) = grid.cell(i, j);
            w.write_record([fmt_f64(*d), n.to_string(), fmt_f64(lo), fmt_f64(hi)])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let inside = |x: f64| {
        grid.discount_axis.first().is_some_and(|&a| a <= x) && grid.discount_axis.last().is_some_and(|&b| x <= b)
    };
    let sidecar = Sidecar {
        label: &grid.label,
        unit: &grid.unit,
        dollars: "real dollars of the emission year",
        coverage: "damages scaled on US data",
        emission_year: grid.emission_year,
        scenario_low: &grid.scenario_low,
        scenario_high: &grid.scenario_high,
        swapped_cells: grid.swapped_cells,
        discount_axis: &grid.discount_axis,
        span_axis: &grid.span_axis,
        annotations,
        tabs_inside_axes: TabsInside {
            tab_a: inside(annotations.tab_a),
            tab_b: inside(annotations.tab_b),
            tab_c: grid.span_axis.first().is_some_and(|&a| a <= annotations.tab_c)
                && grid.span_axis.last().is_some_and(|&b| annotations.tab_c <= b),
        },
        csv: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    let json_path = path.with_extension("json");
    let text = serde_json::to_string_pretty(&sidecar)? + "\n";
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(vec![path.to_path_buf(), json_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Catalog;

    #[test]
    fn default_spans_shape() {
        let s = log_spans(30, 10, 1500);
        assert_eq!(s.len(), 30);
        assert_eq!((s[0], s[29]), (10, 1500));
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    fn small_ctx(params: ForcingParams) -> SurfaceContext {
        SurfaceContext {
            params,
            dollars_per_joule: 1e-12,
            spec: DiscountSpec::default(),
            options: SurfaceOptions {
                discount_points: 3,
                spans: vec![10, 100, 300],
                ..SurfaceOptions::default()
            },
        }
    }

    #[test]
    fn zero_sensitivity_is_zero() {
        let c = Catalog::shipped();
        let low = c.preset("baseline-low").unwrap();
        let high = c.preset("s-aerosol-high-permafrost").unwrap();
        let params = ForcingParams {
            co2_coeff: 0.0,
            ch4_coeff: 0.0,
            n2o_coeff: 0.0,
            fgas_coeff: 0.0,
            ..ForcingParams::default()
        };
        let g = sc_ghg_surface(Gas::Ch4, &low, &high, 2025, &small_ctx(params)).unwrap();
        assert!(g.values_low.iter().chain(&g.values_high).flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn span_past_horizon() {
        let c = Catalog::shipped();
        let s = c.preset("dice-central").unwrap();
        let err = total_pvfl_surface(&s, 2025, &small_ctx(ForcingParams::default()));
        assert!(matches!(err, Err(Error::Range(_))));
    }

    #[test]
    fn huge_rate_keeps_first_term() {
        let c = Catalog::shipped();
        let s = c.preset("baseline-central").unwrap();
        let mut ctx = small_ctx(ForcingParams::default());
        ctx.spec = DiscountSpec {
            base_rate: 1e12,
            sigma: 1.0,
            band: 1,
        };
        let g = total_pvfl_surface(&s, 2025, &ctx).unwrap();
        let run = simulate(&s, &ctx.params, &[]).unwrap();
        let first = ctx.dollars_per_joule * run.climate.ohc(2025).unwrap();
        for row in &g.values_low {
            for v in row {
                assert!((v - first).abs() <= 1e-9 * first);
            }
        }
    }

    #[test]
    fn envelope_swaps_and_counts() {
        let (lo, hi, n) = envelope(vec![vec![1.0, 5.0]], vec![vec![2.0, 3.0]]);
        assert_eq!(lo, vec![vec![1.0, 3.0]]);
        assert_eq!(hi, vec![vec![2.0, 5.0]]);
        assert_eq!(n, 1);
    }

    #[test]
    fn export_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let grid = SurfaceGrid {
            label: "t".into(),
            unit: "USD".into(),
            emission_year: 2025,
            scenario_low: "a".into(),
            scenario_high: "b".into(),
            discount_axis: vec![0.0, 0.01],
            span_axis: vec![10, 20],
            values_low: vec![vec![1.0, 2.0], vec![0.5, 1.5]],
            values_high: vec![vec![1.5, 2.5], vec![0.75, 2.0]],
            swapped_cells: 0,
        };
        let ann = SurfaceAnnotations::default();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        export_surface(&grid, &ann, &p1).unwrap();
        export_surface(&grid, &ann, &p2).unwrap();
        let a = std::fs::read_to_string(&p1).unwrap();
        assert_eq!(a.lines().count(), 5);
        assert_eq!(a, std::fs::read_to_string(&p2).unwrap());
        let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p1.with_extension("json")).unwrap()).unwrap();
        assert_eq!(side["annotations"]["tab_a"], 0.0157);
        assert_eq!(side["tabs_inside_axes"]["tab_a"], false);
    }
}
