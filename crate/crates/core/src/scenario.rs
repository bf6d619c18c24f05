//! Scenario tree: the shipped catalog of presets and the physical settings
//! (carbon supply curves, remainder curves, minor-gas drivers) they resolve to.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::remainder::{RemainderCurve, RemainderId};

/// The shipped catalog document.
pub const CATALOG_JSON: &str = include_str!("../data/scenarios.json");

/// Longest projection horizon after the projection year.
pub const MAX_HORIZON_YEARS: u32 = 1500;

/// Longest horizon accepted for the unconstrained exponential-growth supply.
pub const DICE_MAX_HORIZON_YEARS: u32 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarbonSupplyId {
    Low,
    Central,
    High,
    DiceUnconstrained,
}

impl CarbonSupplyId {
    pub fn code(self) -> &'static str {
        match self {
            CarbonSupplyId::Low => "low",
            CarbonSupplyId::Central => "central",
            CarbonSupplyId::High => "high",
            CarbonSupplyId::DiceUnconstrained => "dice_unconstrained",
        }
    }
}

impl fmt::Display for CarbonSupplyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for CarbonSupplyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.trim().to_ascii_lowercase()))
            .map_err(|_| Error::Config(format!("unknown carbon supply `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AerosolOption {
    None,
    SAerosol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermafrostOption {
    Off,
    On,
}

/// Hubbert-style extraction: cumulative extraction follows a logistic in
/// time, annual emissions are its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticSupply {
    /// Ultimately recoverable total, tonnes CO₂.
    pub urr_t: f64,
    pub rate: f64,
    pub peak_year: f64,
}

impl LogisticSupply {
    pub fn emissions(&self, year: f64) -> f64 {
        let x = (-self.rate * (year - self.peak_year)).exp();
        if !x.is_finite() {
            return 0.0;
        }
        self.urr_t * self.rate * x / ((1.0 + x) * (1.0 + x))
    }

    pub fn cumulative(&self, year: f64) -> f64 {
        self.urr_t / (1.0 + (-self.rate * (year - self.peak_year)).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CarbonSupply {
    Logistic(LogisticSupply),
    /// History follows `history` up to `start_year`, then emissions grow as
    /// `history(start_year) · exp(growth · (year − start_year))`.
    Exponential {
        history: LogisticSupply,
        start_year: i32,
        growth: f64,
    },
}

impl CarbonSupply {
    /// Fossil CO₂ emissions in tonnes for `year`.
    pub fn emissions(&self, year: i32) -> f64 {
        match *self {
            CarbonSupply::Logistic(l) => l.emissions(year as f64),
            CarbonSupply::Exponential {
                history,
                start_year,
                growth,
            } => {
                if year <= start_year {
                    history.emissions(year as f64)
                } else {
                    history.emissions(start_year as f64) * (growth * (year - start_year) as f64).exp()
                }
            }
        }
    }
}

/// Logistic ramp `plateau / (1 + exp(−rate·(year − mid_year)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticRamp {
    pub plateau: f64,
    pub rate: f64,
    pub mid_year: f64,
}

impl LogisticRamp {
    pub fn at(&self, year: f64) -> f64 {
        self.plateau / (1.0 + (-self.rate * (year - self.mid_year)).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ch4Settings {
    pub baseline_ppb: f64,
    pub lifetime_years: f64,
    pub tonnes_per_ppb: f64,
    /// Anthropogenic CH₄ emitted per tonne of fossil CO₂.
    pub fraction_of_co2: f64,
    /// Permafrost source, tonnes CH₄ per year per °C above the threshold.
    pub permafrost_slope_t_per_degc: f64,
    pub permafrost_threshold_degc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct N2oSettings {
    pub baseline_ppb: f64,
    pub lifetime_years: f64,
    pub tonnes_per_ppb: f64,
    /// Tonnes N₂O per person per year at the reference output level.
    pub per_capita_t: f64,
    pub population: LogisticRamp,
    /// Gross world product per capita, as an index equal to 1 in `gwp_reference_year`.
    pub gwp_per_capita: LogisticRamp,
    pub gwp_reference_year: f64,
    pub gwp_elasticity: f64,
}

impl N2oSettings {
    pub fn emissions(&self, year: i32) -> f64 {
        let y = year as f64;
        let gwp_index = self.gwp_per_capita.at(y) / self.gwp_per_capita.at(self.gwp_reference_year);
        self.per_capita_t * self.population.at(y) * gwp_index.powf(self.gwp_elasticity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgasSettings {
    pub baseline_ppb: f64,
    pub lifetime_years: f64,
    pub tonnes_per_ppb: f64,
    pub emissions: LogisticRamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Co2Settings {
    /// Pre-industrial concentration and lower bound, ppm.
    pub preindustrial_ppm: f64,
    /// Tonnes of CO₂ per ppm of atmospheric concentration.
    pub tonnes_per_ppm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AerosolSettings {
    /// Forcing added from `start_year` on, W·m⁻² (negative cools).
    pub offset_wm2: f64,
    pub start_year: i32,
}

/// Calendar anchors shared by every scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    /// Simulation start; all anomalies are zero here.
    pub start_year: i32,
    /// Horizons are counted from this year.
    pub projection_year: i32,
}

/// Physical settings common to all presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSettings {
    pub timeline: Timeline,
    pub co2: Co2Settings,
    pub ch4: Ch4Settings,
    pub n2o: N2oSettings,
    pub fgas: FgasSettings,
    pub aerosol: AerosolSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Primary,
    Dice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetEntry {
    pub name: String,
    pub family: Family,
    pub carbon_supply: CarbonSupplyId,
    pub remainder_curve: RemainderId,
    pub aerosol_option: AerosolOption,
    pub permafrost_option: PermafrostOption,
    pub horizon_years: u32,
}

/// On-disk catalog layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub world: WorldSettings,
    pub carbon_supply: BTreeMap<CarbonSupplyId, CarbonSupply>,
    pub remainder_curves: BTreeMap<RemainderId, RemainderCurve>,
    /// Calibration points the remainder curves were fitted to.
    pub remainder_anchors: BTreeMap<RemainderId, Vec<(f64, f64)>>,
    pub presets: Vec<PresetEntry>,
}

/// A fully resolved scenario: the axis choices plus the physics they select.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub carbon_supply: CarbonSupplyId,
    pub remainder_curve: RemainderId,
    pub aerosol_option: AerosolOption,
    pub permafrost_option: PermafrostOption,
    pub horizon_years: u32,
    pub supply: CarbonSupply,
    pub remainder: RemainderCurve,
    pub world: WorldSettings,
}

impl Scenario {
    pub fn start_year(&self) -> i32 {
        self.world.timeline.start_year
    }

    /// Last simulated calendar year (inclusive).
    pub fn end_year(&self) -> i32 {
        self.world.timeline.projection_year + self.horizon_years as i32
    }

    pub fn years(&self) -> usize {
        (self.end_year() - self.start_year() + 1) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon_years > MAX_HORIZON_YEARS {
            return Err(Error::Range(format!(
                "{}: horizon {} exceeds {MAX_HORIZON_YEARS} years",
                self.name, self.horizon_years
            )));
        }
        if self.carbon_supply == CarbonSupplyId::DiceUnconstrained
            && self.horizon_years > DICE_MAX_HORIZON_YEARS
        {
            return Err(Error::Config(format!(
                "{}: dice_unconstrained supply is only defined up to {DICE_MAX_HORIZON_YEARS} years, got {}",
                self.name, self.horizon_years
            )));
        }
        if self.remainder.id != self.remainder_curve {
            return Err(Error::Config(format!(
                "{}: remainder curve {} does not match axis {}",
                self.name, self.remainder.id, self.remainder_curve
            )));
        }
        self.remainder.validate()?;
        if self.world.timeline.projection_year < self.world.timeline.start_year {
            return Err(Error::Config("projection year precedes start year".into()));
        }
        Ok(())
    }

    /// A copy of this scenario with every anthropogenic source switched off.
    pub fn without_emissions(&self) -> Scenario {
        let mut s = self.clone();
        s.name = format!("{}-zero", self.name);
        s.supply = CarbonSupply::Logistic(LogisticSupply {
            urr_t: 0.0,
            rate: 1.0,
            peak_year: 0.0,
        });
        s.world.ch4.fraction_of_co2 = 0.0;
        s.world.ch4.permafrost_slope_t_per_degc = 0.0;
        s.world.n2o.per_capita_t = 0.0;
        s.world.fgas.emissions.plateau = 0.0;
        s.aerosol_option = AerosolOption::None;
        s.permafrost_option = PermafrostOption::Off;
        s
    }
}

/// Axis values a config document may set directly.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    preset: Option<String>,
    name: Option<String>,
    carbon_supply: Option<CarbonSupplyId>,
    remainder_curve: Option<RemainderId>,
    aerosol_option: Option<AerosolOption>,
    permafrost_option: Option<PermafrostOption>,
    horizon_years: Option<u32>,
}

impl Catalog {
    pub fn shipped() -> Catalog {
        Catalog::from_json(CATALOG_JSON).expect("shipped catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let c: Catalog = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Catalog> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Catalog::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (id, curve) in &self.remainder_curves {
            if curve.id != *id {
                return Err(Error::Config(format!("remainder curve keyed {id} has id {}", curve.id)));
            }
            curve.validate()?;
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.presets {
            if !seen.insert(p.name.as_str()) {
                return Err(Error::Config(format!("duplicate preset `{}`", p.name)));
            }
            self.resolve(p)?;
        }
        Ok(())
    }

    pub fn preset_names(&self, family: Option<Family>) -> Vec<&str> {
        self.presets
            .iter()
            .filter(|p| family.is_none_or(|f| p.family == f))
            .map(|p| p.name.as_str())
            .collect()
    }

    pub fn has_preset(&self, name: &str) -> bool {
        self.presets.iter().any(|p| p.name == name)
    }

    pub fn preset(&self, name: &str) -> Result<Scenario> {
        let entry = self
            .presets
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
        self.resolve(entry)
    }

    pub fn scenarios(&self, family: Option<Family>) -> Result<Vec<Scenario>> {
        self.presets
            .iter()
            .filter(|p| family.is_none_or(|f| p.family == f))
            .map(|p| self.resolve(p))
            .collect()
    }

    fn resolve(&self, p: &PresetEntry) -> Result<Scenario> {
        let supply = *self
            .carbon_supply
            .get(&p.carbon_supply)
            .ok_or_else(|| Error::Config(format!("{}: no carbon supply `{}`", p.name, p.carbon_supply)))?;
        let remainder = self
            .remainder_curves
            .get(&p.remainder_curve)
            .ok_or_else(|| Error::Config(format!("{}: no remainder curve {}", p.name, p.remainder_curve)))?
            .clone();
        let s = Scenario {
            name: p.name.clone(),
            carbon_supply: p.carbon_supply,
            remainder_curve: p.remainder_curve,
            aerosol_option: p.aerosol_option,
            permafrost_option: p.permafrost_option,
            horizon_years: p.horizon_years,
            supply,
            remainder,
            world: self.world.clone(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Build a scenario from a key-value document: either `{"preset": name}`
    /// (optionally overriding axes) or a full set of axes.
    pub fn build_scenario(&self, config: &Value) -> Result<Scenario> {
        let cfg: ScenarioConfig = serde_json::from_value(config.clone())
            .map_err(|e| Error::Config(format!("scenario config: {e}")))?;
        let mut entry = match &cfg.preset {
            Some(name) => self
                .presets
                .iter()
                .find(|p| &p.name == name)
                .cloned()
                .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?,
            None => {
                let missing = |what: &str| Error::Config(format!("scenario config lacks `{what}` and names no preset"));
                PresetEntry {
                    name: cfg.name.clone().ok_or_else(|| missing("name"))?,
                    family: Family::Primary,
                    carbon_supply: cfg.carbon_supply.ok_or_else(|| missing("carbon_supply"))?,
                    remainder_curve: cfg.remainder_curve.ok_or_else(|| missing("remainder_curve"))?,
                    aerosol_option: cfg.aerosol_option.ok_or_else(|| missing("aerosol_option"))?,
                    permafrost_option: cfg.permafrost_option.ok_or_else(|| missing("permafrost_option"))?,
                    horizon_years: cfg.horizon_years.ok_or_else(|| missing("horizon_years"))?,
                }
            }
        };
        if cfg.preset.is_some() {
            if let Some(v) = &cfg.name {
                entry.name = v.clone();
            }
            if let Some(v) = cfg.carbon_supply {
                entry.carbon_supply = v;
            }
            if let Some(v) = cfg.remainder_curve {
                entry.remainder_curve = v;
            }
            if let Some(v) = cfg.aerosol_option {
                entry.aerosol_option = v;
            }
            if let Some(v) = cfg.permafrost_option {
                entry.permafrost_option = v;
            }
            if let Some(v) = cfg.horizon_years {
                entry.horizon_years = v;
            }
        }
        self.resolve(&entry)
    }
}

/// Build a scenario against the shipped catalog.
pub fn build_scenario(config: &Value) -> Result<Scenario> {
    Catalog::shipped().build_scenario(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn baseline_low_axes() {
        let s = build_scenario(&json!({"preset": "baseline-low"})).unwrap();
        assert_eq!(s.carbon_supply, CarbonSupplyId::Low);
        assert_eq!(s.remainder_curve, RemainderId::Low);
        assert_eq!(s.aerosol_option, AerosolOption::None);
        assert_eq!(s.permafrost_option, PermafrostOption::Off);
    }

    #[test]
    fn aerosol_high_permafrost_axes() {
        let s = build_scenario(&json!({"preset": "s-aerosol-high-permafrost"})).unwrap();
        assert_eq!(s.carbon_supply, CarbonSupplyId::High);
        assert_eq!(s.remainder_curve, RemainderId::High);
        assert_eq!(s.aerosol_option, AerosolOption::SAerosol);
        assert_eq!(s.permafrost_option, PermafrostOption::On);
    }

    #[test]
    fn catalog_counts() {
        let c = Catalog::shipped();
        assert_eq!(c.preset_names(Some(Family::Primary)).len(), 18);
        assert_eq!(c.preset_names(Some(Family::Dice)).len(), 3);
        assert_eq!(c.presets.len(), 21);
    }

    #[test]
    fn primary_presets_are_the_cross_product() {
        let c = Catalog::shipped();
        let mut combos = std::collections::BTreeSet::new();
        for s in c.scenarios(Some(Family::Primary)).unwrap() {
            assert_ne!(s.carbon_supply, CarbonSupplyId::DiceUnconstrained);
            // the two option axes move together
            assert_eq!(
                s.aerosol_option == AerosolOption::SAerosol,
                s.permafrost_option == PermafrostOption::On
            );
            combos.insert((s.carbon_supply.code(), s.remainder_curve.code(), s.aerosol_option == AerosolOption::SAerosol));
        }
        assert_eq!(combos.len(), 18);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(build_scenario(&json!({"preset": "nope"})), Err(Error::Config(_))));
    }

    #[test]
    fn dice_horizon_limited() {
        let err = build_scenario(&json!({"preset": "dice-central", "horizon_years": 1000})).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn horizon_limit() {
        let err = build_scenario(&json!({"preset": "baseline-low", "horizon_years": 1501})).unwrap_err();
        assert!(matches!(err, Error::Range(_)));
    }

    #[test]
    fn explicit_axes() {
        let s = build_scenario(&json!({
            "name": "custom",
            "carbon_supply": "central",
            "remainder_curve": "C_RH",
            "aerosol_option": "none",
            "permafrost_option": "on",
            "horizon_years": 200
        }))
        .unwrap();
        assert_eq!(s.end_year(), s.world.timeline.projection_year + 200);
        assert!(build_scenario(&json!({"name": "x", "carbon_supply": "low"})).is_err());
    }

    #[test]
    fn dice_supply_is_exponential_after_start() {
        let s = Catalog::shipped().preset("dice-central").unwrap();
        match s.supply {
            CarbonSupply::Exponential { start_year, growth, .. } => {
                let e0 = s.supply.emissions(start_year);
                for k in [1, 50, 275] {
                    let e = s.supply.emissions(start_year + k);
                    let want = e0 * (growth * k as f64).exp();
                    assert!(((e - want) / want).abs() < 1e-12);
                }
            }
            _ => panic!("dice preset should grow exponentially"),
        }
    }
}
