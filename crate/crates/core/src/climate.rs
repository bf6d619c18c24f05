//! Single-cell energy balance: concentrations → radiative forcing → Earth
//! energy imbalance → ocean heat content and surface warming.
//!
//! The surface is a pseudo-surface without heat storage. Its anomaly `ΔT`
//! balances forcing against the feedback `λ·ΔT` and the exchange with the
//! upper ocean `κ·(ΔT − T_ocean)`:
//!
//! ```text
//! ΔT      = (F + κ·Q/C_ocean) / (λ + κ)
//! EEI     = F − λ·ΔT
//! dQ/dt   = u · A · s · EEI
//! ```
//!
//! `Q` is the ocean heat anomaly in joules, `u` the share of the imbalance
//! taken up by the ocean, `A` the planetary surface area and `s` seconds per
//! year. With forcing held constant over a step the equation for `Q` is
//! linear, and [`step_climate`] integrates it in closed form, so splitting a
//! step changes nothing but rounding.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emissions::{Concentrations, Gas, GasTrajectory};
use crate::error::{Error, Result};
use crate::ingest::fmt_f64;
use crate::lsq::{levenberg_marquardt, LeastSquares};
use crate::scenario::{AerosolOption, Scenario};

/// Planetary surface area, m².
pub const EARTH_SURFACE_M2: f64 = 5.1e14;

/// Julian year in seconds.
pub const SECONDS_PER_YEAR: f64 = 3.15576e7;

/// Energy of one megaton of TNT, joules.
pub const JOULES_PER_MEGATON: f64 = 4.18e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForcingParams {
    /// W·m⁻² per unit of ln(C/C₀).
    pub co2_coeff: f64,
    pub co2_reference_ppm: f64,
    /// W·m⁻² per ppb above reference.
    pub ch4_coeff: f64,
    pub ch4_reference_ppb: f64,
    pub n2o_coeff: f64,
    pub n2o_reference_ppb: f64,
    pub fgas_coeff: f64,
    pub fgas_reference_ppb: f64,
    /// Constant forcing added everywhere, W·m⁻².
    pub aerosol_offset: f64,
    pub ocean_uptake_fraction: f64,
    /// J·°C⁻¹.
    pub upper_ocean_heat_capacity: f64,
    /// J·°C⁻¹. Only used for energy-scale conversions; the pseudo-surface
    /// stores no heat in the integrator.
    pub atm_heat_capacity: f64,
    /// W·m⁻²·°C⁻¹.
    pub feedback_lambda: f64,
    /// Surface to upper-ocean exchange coefficient, W·m⁻²·°C⁻¹.
    pub ocean_coupling: f64,
}

impl Default for ForcingParams {
    fn default() -> Self {
        ForcingParams {
            co2_coeff: 5.35,
            co2_reference_ppm: 280.0,
            ch4_coeff: 4.0e-4,
            ch4_reference_ppb: 722.0,
            n2o_coeff: 3.4e-3,
            n2o_reference_ppb: 270.0,
            fgas_coeff: 0.25,
            fgas_reference_ppb: 0.04,
            aerosol_offset: 0.0,
            ocean_uptake_fraction: 0.89,
            upper_ocean_heat_capacity: 5.0e23,
            atm_heat_capacity: 5.0e21,
            feedback_lambda: 1.4,
            ocean_coupling: 0.8,
        }
    }
}

impl ForcingParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("upper_ocean_heat_capacity", self.upper_ocean_heat_capacity),
            ("atm_heat_capacity", self.atm_heat_capacity),
            ("feedback_lambda", self.feedback_lambda),
            ("ocean_coupling", self.ocean_coupling),
            ("co2_reference_ppm", self.co2_reference_ppm),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.ocean_uptake_fraction > 0.0 && self.ocean_uptake_fraction <= 1.0) {
            return Err(Error::Validation(format!(
                "ocean_uptake_fraction must be in (0, 1], got {}",
                self.ocean_uptake_fraction
            )));
        }
        for v in [self.co2_coeff, self.ch4_coeff, self.n2o_coeff, self.fgas_coeff, self.aerosol_offset] {
            if !v.is_finite() {
                return Err(Error::Validation("forcing coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: ForcingParams = serde_json::from_str(&text)?;
        p.validate()?;
        Ok(p)
    }

    /// Joules taken up by the ocean per year per W·m⁻² of imbalance.
    pub fn uptake_joules_per_wm2_year(&self) -> f64 {
        self.ocean_uptake_fraction * EARTH_SURFACE_M2 * SECONDS_PER_YEAR
    }

    /// A copy with every forcing coefficient of `gas` set to zero.
    pub fn without_gas(&self, gas: Gas) -> Self {
        let mut p = *self;
        match gas {
            Gas::Co2 => p.co2_coeff = 0.0,
            Gas::Ch4 => p.ch4_coeff = 0.0,
            Gas::N2o => p.n2o_coeff = 0.0,
            Gas::Fgas => p.fgas_coeff = 0.0,
        }
        p
    }

    /// Equilibrium surface warming for doubled CO₂, °C.
    pub fn climate_sensitivity(&self) -> f64 {
        self.co2_coeff * std::f64::consts::LN_2 / self.feedback_lambda
    }
}

/// Forcing from the four gases plus the constant offset, W·m⁻².
pub fn radiative_forcing(concentrations: &Concentrations, params: &ForcingParams) -> Result<f64> {
    if let Some(g) = Gas::ALL.iter().find(|g| !(concentrations[g.index()] > 0.0)) {
        return Err(Error::Domain(format!(
            "{} concentration must be positive, got {}",
            g,
            concentrations[g.index()]
        )));
    }
    let [co2, ch4, n2o, fgas] = *concentrations;
    Ok(params.co2_coeff * (co2 / params.co2_reference_ppm).ln()
        + params.ch4_coeff * (ch4 - params.ch4_reference_ppb)
        + params.n2o_coeff * (n2o - params.n2o_reference_ppb)
        + params.fgas_coeff * (fgas - params.fgas_reference_ppb)
        + params.aerosol_offset)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimateState {
    pub year: i32,
    /// Surface warming above baseline, °C.
    pub delta_t: f64,
    /// Ocean heat content above baseline, J.
    pub ohc: f64,
    /// Earth energy imbalance, W·m⁻².
    pub eei: f64,
    /// Forcing that produced this state, W·m⁻².
    pub forcing: f64,
    /// Ocean heat gained during the step ending here, J.
    pub dohc: f64,
}

impl ClimateState {
    /// Baseline state at `year` under forcing `forcing` with no ocean anomaly.
    pub fn baseline(year: i32, forcing: f64, params: &ForcingParams) -> Self {
        let delta_t = surface_warming(forcing, 0.0, params);
        ClimateState {
            year,
            delta_t,
            ohc: 0.0,
            eei: forcing - params.feedback_lambda * delta_t,
            forcing,
            dohc: 0.0,
        }
    }
}

fn surface_warming(forcing: f64, ohc: f64, p: &ForcingParams) -> f64 {
    (forcing + p.ocean_coupling * ohc / p.upper_ocean_heat_capacity) / (p.feedback_lambda + p.ocean_coupling)
}

/// Advance `dt` years with forcing held constant. `year` advances by
/// `dt` rounded to whole years.
pub fn step_climate(state: &ClimateState, forcing: f64, params: &ForcingParams, dt: f64) -> Result<ClimateState> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be > 0, got {dt}")));
    }
    if !forcing.is_finite() {
        return Err(Error::Domain(format!("forcing must be finite, got {forcing}")));
    }
    let p = params;
    let lambda = p.feedback_lambda;
    let kappa = p.ocean_coupling;
    let cap = p.upper_ocean_heat_capacity;
    // dQ/dt = a·(F − λ·Q/C)
    let a = p.uptake_joules_per_wm2_year() * kappa / (lambda + kappa);
    let rate = a * lambda / cap;
    let q_eq = cap * forcing / lambda;
    let ohc = q_eq + (state.ohc - q_eq) * (-rate * dt).exp();
    let delta_t = surface_warming(forcing, ohc, p);
    Ok(ClimateState {
        year: state.year + dt.round() as i32,
        delta_t,
        ohc,
        eei: forcing - lambda * delta_t,
        forcing,
        dohc: ohc - state.ohc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimateSeries {
    pub scenario_name: String,
    pub states: Vec<ClimateState>,
}

impl ClimateSeries {
    pub fn start_year(&self) -> i32 {
        self.states[0].year
    }

    pub fn end_year(&self) -> i32 {
        self.states[self.states.len() - 1].year
    }

    pub fn state(&self, year: i32) -> Option<&ClimateState> {
        let i = year - self.start_year();
        (i >= 0).then(|| self.states.get(i as usize)).flatten()
    }

    pub fn ohc(&self, year: i32) -> Option<f64> {
        self.state(year).map(|s| s.ohc)
    }

    /// First year whose warming exceeds `threshold`, if any.
    pub fn first_year_above(&self, threshold: f64) -> Option<i32> {
        self.states.iter().find(|s| s.delta_t > threshold).map(|s| s.year)
    }

    /// CSV: `year,forcing_wm2,eei_wm2,delta_t_c,ohc_j,dohc_j`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["year", "forcing_wm2", "eei_wm2", "delta_t_c", "ohc_j", "dohc_j"])?;
        for s in &self.states {
            w.write_record([
                s.year.to_string(),
                fmt_f64(s.forcing),
                fmt_f64(s.eei),
                fmt_f64(s.delta_t),
                fmt_f64(s.ohc),
                fmt_f64(s.dohc),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<climate>", e))?;
        Ok(())
    }
}

/// Scenario-specific forcing added on top of the gases in `year`.
pub fn scenario_offset(scenario: &Scenario, year: i32) -> f64 {
    match scenario.aerosol_option {
        AerosolOption::SAerosol if year >= scenario.world.aerosol.start_year => scenario.world.aerosol.offset_wm2,
        _ => 0.0,
    }
}

/// Integrate the energy balance year by year over prescribed concentrations.
pub fn run_climate(scenario: &Scenario, trajectories: &[GasTrajectory], params: &ForcingParams) -> Result<ClimateSeries> {
    params.validate()?;
    let start = scenario.start_year();
    let n = scenario.years();
    let mut by_gas: [Option<&GasTrajectory>; 4] = [None; 4];
    for t in trajectories {
        by_gas[t.gas.index()] = Some(t);
    }
    let mut series = Vec::with_capacity(n);
    for gas in Gas::ALL {
        let t = by_gas[gas.index()]
            .ok_or_else(|| Error::Range(format!("{}: no {gas} trajectory", scenario.name)))?;
        if t.start_year != start || t.concentration.len() < n {
            return Err(Error::Range(format!(
                "{}: {gas} trajectory covers {}..={} but the horizon needs {start}..={}",
                scenario.name,
                t.start_year,
                t.end_year(),
                scenario.end_year()
            )));
        }
        series.push(&t.concentration);
    }

    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let year = start + i as i32;
        let conc = [series[0][i], series[1][i], series[2][i], series[3][i]];
        let forcing = radiative_forcing(&conc, params)? + scenario_offset(scenario, year);
        let state = match states.last() {
            None => ClimateState::baseline(year, forcing, params),
            Some(prev) => step_climate(prev, forcing, params, 1.0)?,
        };
        states.push(state);
    }
    Ok(ClimateSeries {
        scenario_name: scenario.name.clone(),
        states,
    })
}

pub fn joules_to_megatons(energy: f64) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(Error::Domain(format!("energy must be >= 0, got {energy}")));
    }
    Ok(energy / JOULES_PER_MEGATON)
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub params: ForcingParams,
    pub rms_joules: f64,
    pub converged: bool,
}

struct OhcMisfit<'a> {
    scenario: &'a Scenario,
    trajectories: &'a [GasTrajectory],
    base: ForcingParams,
    observed: &'a [(i32, f64)],
}

impl OhcMisfit<'_> {
    fn params(&self, x: &[f64]) -> ForcingParams {
        let mut p = self.base;
        p.feedback_lambda = x[0].exp();
        p.ocean_uptake_fraction = 1.0 / (1.0 + (-x[1]).exp());
        p
    }
}

impl LeastSquares for OhcMisfit<'_> {
    fn residual_count(&self) -> usize {
        self.observed.len()
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let p = self.params(x);
        let Ok(series) = run_climate(self.scenario, self.trajectories, &p) else {
            out.iter_mut().for_each(|v| *v = f64::INFINITY);
            return;
        };
        // observations are anomalies against their own first year
        let anchor_obs = self.observed[0].1;
        let anchor_model = series.ohc(self.observed[0].0).unwrap_or(f64::NAN);
        for (o, &(year, v)) in out.iter_mut().zip(self.observed) {
            let m = series.ohc(year).unwrap_or(f64::NAN) - anchor_model;
            *o = (m - (v - anchor_obs)) / 1e22;
        }
    }
}

/// Least-squares tune of `feedback_lambda` and `ocean_uptake_fraction`
/// against an observed OHC series (joules, any common baseline).
pub fn calibrate_to_ohc(
    scenario: &Scenario,
    trajectories: &[GasTrajectory],
    initial: &ForcingParams,
    observed: &[(i32, f64)],
) -> Result<Calibration> {
    if observed.len() < 3 {
        return Err(Error::InsufficientData("calibration needs at least 3 OHC observations".into()));
    }
    let misfit = OhcMisfit {
        scenario,
        trajectories,
        base: *initial,
        observed,
    };
    let u = initial.ocean_uptake_fraction.clamp(1e-6, 1.0 - 1e-6);
    let x0 = [initial.feedback_lambda.ln(), (u / (1.0 - u)).ln()];
    let out = levenberg_marquardt(&misfit, &x0, 200);
    if !out.sse.is_finite() {
        return Err(Error::Fit("OHC calibration diverged".into()));
    }
    Ok(Calibration {
        params: misfit.params(&out.params),
        rms_joules: (out.sse / observed.len() as f64).sqrt() * 1e22,
        converged: out.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_conc(p: &ForcingParams) -> Concentrations {
        [p.co2_reference_ppm, p.ch4_reference_ppb, p.n2o_reference_ppb, p.fgas_reference_ppb]
    }

    #[test]
    fn baseline_forcing_is_zero() {
        let p = ForcingParams::default();
        assert_eq!(radiative_forcing(&base_conc(&p), &p).unwrap(), 0.0);
    }

    #[test]
    fn doubled_co2() {
        let p = ForcingParams::default();
        let mut c = base_conc(&p);
        c[0] *= 2.0;
        let f = radiative_forcing(&c, &p).unwrap();
        assert!((f - 5.35 * 2f64.ln()).abs() < 1e-12);
        assert!((f - 3.708).abs() < 1e-3);
    }

    #[test]
    fn aerosol_offset_is_additive() {
        let p = ForcingParams::default();
        let mut c = base_conc(&p);
        c[0] = 410.0;
        c[1] = 1900.0;
        let f0 = radiative_forcing(&c, &p).unwrap();
        let shifted = ForcingParams { aerosol_offset: -0.5, ..p };
        let f1 = radiative_forcing(&c, &shifted).unwrap();
        assert!((f1 - f0 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_positive_concentration() {
        let p = ForcingParams::default();
        let mut c = base_conc(&p);
        c[2] = 0.0;
        assert!(matches!(radiative_forcing(&c, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn equilibrium_step_is_stationary() {
        let p = ForcingParams::default();
        let state = ClimateState {
            year: 2000,
            delta_t: 1.0,
            ohc: p.upper_ocean_heat_capacity,
            eei: 0.0,
            forcing: p.feedback_lambda,
            dohc: 0.0,
        };
        let next = step_climate(&state, p.feedback_lambda, &p, 1.0).unwrap();
        assert!(next.eei.abs() < 1e-12);
        assert!(next.dohc.abs() <= 1e-15 * p.upper_ocean_heat_capacity);
        assert!((next.delta_t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_wm2_for_a_year() {
        let p = ForcingParams::default();
        // forcing chosen so the imbalance starts at exactly 1 W·m⁻²
        let forcing = (p.feedback_lambda + p.ocean_coupling) / p.ocean_coupling;
        let start = ClimateState::baseline(2000, forcing, &p);
        assert!((start.eei - 1.0).abs() < 1e-12);
        let next = step_climate(&start, forcing, &p, 1.0).unwrap();
        let hand = 0.89 * 5.1e14 * 3.156e7;
        assert!((next.dohc / hand - 1.0).abs() < 0.02, "{} vs {hand}", next.dohc);
        assert!((hand - 1.43e22).abs() / 1.43e22 < 0.01);
    }

    #[test]
    fn half_steps_match_full_step() {
        let p = ForcingParams::default();
        let s0 = ClimateState::baseline(2000, 2.0, &p);
        let full = step_climate(&s0, 2.5, &p, 1.0).unwrap();
        let half = step_climate(&step_climate(&s0, 2.5, &p, 0.5).unwrap(), 2.5, &p, 0.5).unwrap();
        assert!((half.ohc / full.ohc - 1.0).abs() < 1e-6);
        assert!((half.ohc / full.ohc - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bad_step() {
        let p = ForcingParams::default();
        let s0 = ClimateState::baseline(2000, 0.0, &p);
        assert!(step_climate(&s0, 1.0, &p, 0.0).is_err());
    }

    #[test]
    fn megatons() {
        assert!((joules_to_megatons(4.18e15).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(joules_to_megatons(0.0).unwrap(), 0.0);
        let mt = joules_to_megatons(5e21).unwrap();
        assert!((mt / 1.196e6 - 1.0).abs() < 1e-3);
        assert!(joules_to_megatons(-1.0).is_err());
    }

    #[test]
    fn params_validation() {
        let p = ForcingParams {
            feedback_lambda: 0.0,
            ..ForcingParams::default()
        };
        assert!(p.validate().is_err());
        let p = ForcingParams {
            ocean_uptake_fraction: 1.5,
            ..ForcingParams::default()
        };
        assert!(p.validate().is_err());
    }
}
