//! Per-gas emission and concentration trajectories.
//!
//! CO₂ concentration is a convolution of every year's emissions with the
//! scenario's remainder curve. CH₄, N₂O and the aggregate F-gas decay with
//! first-order e-fold lifetimes; decayed CH₄ carbon re-enters the CO₂
//! budget as CO₂ in the year it decays.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{PermafrostOption, Scenario};

/// CO₂ mass produced per unit mass of CH₄ oxidised.
pub const CO2_PER_CH4: f64 = 44.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gas {
    #[serde(rename = "CO2")]
    Co2,
    #[serde(rename = "CH4")]
    Ch4,
    #[serde(rename = "N2O")]
    N2o,
    #[serde(rename = "Fgas")]
    Fgas,
}

impl Gas {
    pub const ALL: [Gas; 4] = [Gas::Co2, Gas::Ch4, Gas::N2o, Gas::Fgas];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Gas::Co2 => "CO2",
            Gas::Ch4 => "CH4",
            Gas::N2o => "N2O",
            Gas::Fgas => "Fgas",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Gas::Co2 => "ppm",
            _ => "ppb",
        }
    }
}

impl fmt::Display for Gas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Gas {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "co2" => Ok(Gas::Co2),
            "ch4" => Ok(Gas::Ch4),
            "n2o" => Ok(Gas::N2o),
            "fgas" | "f-gas" => Ok(Gas::Fgas),
            other => Err(Error::Config(format!("unknown gas `{other}`"))),
        }
    }
}

/// Concentrations of the four gases in one year: CO₂ in ppm, the rest in ppb.
pub type Concentrations = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasTrajectory {
    pub gas: Gas,
    pub start_year: i32,
    /// Tonnes emitted per year. For CO₂ this includes CO₂ from oxidised CH₄.
    pub emissions: Vec<f64>,
    pub concentration: Vec<f64>,
}

impl GasTrajectory {
    pub fn end_year(&self) -> i32 {
        self.start_year + self.concentration.len() as i32 - 1
    }

    pub fn concentration_at(&self, year: i32) -> Option<f64> {
        let i = year - self.start_year;
        (i >= 0).then(|| self.concentration.get(i as usize).copied()).flatten()
    }

    pub fn emissions_at(&self, year: i32) -> Option<f64> {
        let i = year - self.start_year;
        (i >= 0).then(|| self.emissions.get(i as usize).copied()).flatten()
    }
}

/// First-order decay of a stock over `dt` years.
pub fn efold_decay(stock: f64, lifetime: f64, dt: f64) -> Result<f64> {
    if !(lifetime > 0.0) {
        return Err(Error::Domain(format!("e-fold lifetime must be > 0, got {lifetime}")));
    }
    if !(dt >= 0.0) {
        return Err(Error::Domain(format!("decay interval must be >= 0, got {dt}")));
    }
    Ok(stock * (-dt / lifetime).exp())
}

/// Extra emissions injected into one year, in tonnes of the named gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub gas: Gas,
    pub year: i32,
    pub tonnes: f64,
}

/// Year-by-year emissions state. Advancing needs last year's ΔT because the
/// permafrost CH₄ source responds to warming.
#[derive(Debug, Clone)]
pub struct GasEngine {
    scenario: Scenario,
    remainder_table: Vec<f64>,
    co2_emissions: Vec<f64>,
    emissions: [Vec<f64>; 4],
    concentration: [Vec<f64>; 4],
    /// Anomaly stocks above the natural baseline, tonnes.
    ch4_stock: f64,
    n2o_stock: f64,
    fgas_stock: f64,
    ch4_decay: f64,
    n2o_decay: f64,
    fgas_decay: f64,
    ch4_emitted_total: f64,
    ch4_decayed_total: f64,
    pulses: Vec<Pulse>,
}

impl GasEngine {
    pub fn new(scenario: &Scenario, pulses: &[Pulse]) -> Result<Self> {
        scenario.validate()?;
        let n = scenario.years();
        let remainder_table = (0..n).map(|t| scenario.remainder.value(t as f64)).collect();
        let w = &scenario.world;
        Ok(GasEngine {
            scenario: scenario.clone(),
            remainder_table,
            co2_emissions: Vec::with_capacity(n),
            emissions: Default::default(),
            concentration: Default::default(),
            ch4_stock: 0.0,
            n2o_stock: 0.0,
            fgas_stock: 0.0,
            ch4_decay: efold_decay(1.0, w.ch4.lifetime_years, 1.0)?,
            n2o_decay: efold_decay(1.0, w.n2o.lifetime_years, 1.0)?,
            fgas_decay: efold_decay(1.0, w.fgas.lifetime_years, 1.0)?,
            ch4_emitted_total: 0.0,
            ch4_decayed_total: 0.0,
            pulses: pulses.to_vec(),
        })
    }

    fn pulse(&self, gas: Gas, year: i32) -> f64 {
        self.pulses
            .iter()
            .filter(|p| p.gas == gas && p.year == year)
            .map(|p| p.tonnes)
            .sum()
    }

    pub fn next_year(&self) -> i32 {
        self.scenario.start_year() + self.co2_emissions.len() as i32
    }

    pub fn is_done(&self) -> bool {
        self.co2_emissions.len() >= self.scenario.years()
    }

    /// Emit and decay one year. `prev_delta_t` is the warming at the end of
    /// the previous year.
    pub fn advance(&mut self, prev_delta_t: f64) -> Concentrations {
        let year = self.next_year();
        let w = &self.scenario.world;

        let fossil = self.scenario.supply.emissions(year) + self.pulse(Gas::Co2, year);

        let permafrost = if self.scenario.permafrost_option == PermafrostOption::On {
            w.ch4.permafrost_slope_t_per_degc * (prev_delta_t - w.ch4.permafrost_threshold_degc).max(0.0)
        } else {
            0.0
        };
        let ch4_emit = w.ch4.fraction_of_co2 * self.scenario.supply.emissions(year)
            + permafrost
            + self.pulse(Gas::Ch4, year);
        let ch4_decayed = self.ch4_stock * (1.0 - self.ch4_decay);
        self.ch4_stock = self.ch4_stock * self.ch4_decay + ch4_emit;
        self.ch4_emitted_total += ch4_emit;
        self.ch4_decayed_total += ch4_decayed;

        let co2_total = fossil + CO2_PER_CH4 * ch4_decayed;
        self.co2_emissions.push(co2_total);

        let n2o_emit = w.n2o.emissions(year) + self.pulse(Gas::N2o, year);
        self.n2o_stock = self.n2o_stock * self.n2o_decay + n2o_emit;

        let fgas_emit = w.fgas.emissions.at(year as f64) + self.pulse(Gas::Fgas, year);
        self.fgas_stock = self.fgas_stock * self.fgas_decay + fgas_emit;

        let i = self.co2_emissions.len() - 1;
        let airborne: f64 = self.co2_emissions[..=i]
            .iter()
            .zip(self.remainder_table[..=i].iter().rev())
            .map(|(e, r)| e * r)
            .sum();
        let co2_ppm = w.co2.preindustrial_ppm + airborne / w.co2.tonnes_per_ppm;

        let conc = [
            co2_ppm,
            w.ch4.baseline_ppb + self.ch4_stock / w.ch4.tonnes_per_ppb,
            w.n2o.baseline_ppb + self.n2o_stock / w.n2o.tonnes_per_ppb,
            w.fgas.baseline_ppb + self.fgas_stock / w.fgas.tonnes_per_ppb,
        ];
        let emits = [co2_total, ch4_emit, n2o_emit, fgas_emit];
        for g in 0..4 {
            self.emissions[g].push(emits[g]);
            self.concentration[g].push(conc[g]);
        }
        conc
    }

    /// Cumulative CH₄ emitted, decayed and still airborne (anomaly), tonnes.
    pub fn ch4_budget(&self) -> (f64, f64, f64) {
        (self.ch4_emitted_total, self.ch4_decayed_total, self.ch4_stock)
    }

    pub fn into_trajectories(self) -> Vec<GasTrajectory> {
        let start_year = self.scenario.start_year();
        let [e0, e1, e2, e3] = self.emissions;
        let [c0, c1, c2, c3] = self.concentration;
        Gas::ALL
            .iter()
            .zip([(e0, c0), (e1, c1), (e2, c2), (e3, c3)])
            .map(|(&gas, (emissions, concentration))| GasTrajectory {
                gas,
                start_year,
                emissions,
                concentration,
            })
            .collect()
    }
}

/// Annual emissions and concentrations of all four gases over the
/// scenario horizon, using the default climate calibration for the
/// permafrost feedback.
pub fn gas_trajectories(scenario: &Scenario) -> Result<Vec<GasTrajectory>> {
    if scenario.horizon_years > crate::scenario::MAX_HORIZON_YEARS {
        return Err(Error::Range(format!(
            "horizon {} exceeds {} years",
            scenario.horizon_years,
            crate::scenario::MAX_HORIZON_YEARS
        )));
    }
    let run = crate::model::simulate(scenario, &crate::climate::ForcingParams::default(), &[])?;
    Ok(run.trajectories)
}

/// Trajectory CSV: `year,gas,emissions_t,concentration`.
pub fn write_trajectories_csv<W: std::io::Write>(writer: W, trajectories: &[GasTrajectory]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["year", "gas", "emissions_t", "concentration"])?;
    for t in trajectories {
        for (i, (e, c)) in t.emissions.iter().zip(&t.concentration).enumerate() {
            w.write_record([
                (t.start_year + i as i32).to_string(),
                t.gas.code().to_string(),
                crate::ingest::fmt_f64(*e),
                crate::ingest::fmt_f64(*c),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<trajectories>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Catalog;

    #[test]
    fn decay_examples() {
        assert_eq!(efold_decay(5.0, 11.8, 0.0).unwrap(), 5.0);
        let one = efold_decay(5.0, 11.8, 11.8).unwrap();
        assert!((one / (5.0 / std::f64::consts::E) - 1.0).abs() < 1e-12);
        let half = efold_decay(efold_decay(5.0, 11.8, 0.5).unwrap(), 11.8, 0.5).unwrap();
        let full = efold_decay(5.0, 11.8, 1.0).unwrap();
        assert!((half / full - 1.0).abs() < 1e-12);
        assert!(matches!(efold_decay(1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(efold_decay(1.0, -2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_emissions_stay_flat() {
        let s = Catalog::shipped().preset("baseline-central").unwrap().without_emissions();
        let traj = gas_trajectories(&s).unwrap();
        let w = &s.world;
        let base = [w.co2.preindustrial_ppm, w.ch4.baseline_ppb, w.n2o.baseline_ppb, w.fgas.baseline_ppb];
        for t in &traj {
            for &c in &t.concentration {
                assert_eq!(c, base[t.gas.index()]);
            }
        }
    }

    #[test]
    fn single_pulse_follows_remainder_curve() {
        let s = Catalog::shipped().preset("baseline-low").unwrap().without_emissions();
        let year = 1900;
        let tonnes = 7.81e11;
        let mut engine = GasEngine::new(&s, &[Pulse { gas: Gas::Co2, year, tonnes }]).unwrap();
        while !engine.is_done() {
            engine.advance(0.0);
        }
        let traj = engine.into_trajectories();
        let co2 = &traj[0];
        for y in [year, year + 1, year + 37, year + 400, s.end_year()] {
            let anomaly = co2.concentration_at(y).unwrap() - s.world.co2.preindustrial_ppm;
            let want = tonnes / s.world.co2.tonnes_per_ppm
                * crate::remainder::remainder_fraction(&s.remainder, (y - year) as f64).unwrap();
            assert!((anomaly - want).abs() <= 1e-12 * want.abs().max(1.0), "{y}: {anomaly} vs {want}");
        }
    }

    #[test]
    fn trajectories_cover_horizon() {
        let s = Catalog::shipped().preset("baseline-high").unwrap();
        let traj = gas_trajectories(&s).unwrap();
        assert_eq!(traj.len(), 4);
        for t in &traj {
            assert_eq!(t.end_year(), s.end_year());
            assert!(t.concentration.iter().all(|&c| c > 0.0));
        }
        assert!(traj[0]
            .concentration
            .iter()
            .all(|&c| c >= s.world.co2.preindustrial_ppm));
    }
}
