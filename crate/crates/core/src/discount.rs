//! Carbon-bond discounting: present value of future losses, the DICE
//! discount correction, the sign-of-risk algebra and crisis spending
//! statistics used as willingness to pay.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{yield_stats, YieldSeries};
use crate::stats;

/// Mean real yield of the long treasury bond.
pub const BOND_MEAN_RATE: f64 = 0.0157;
/// σ for which `base − 2σ` lands on −2.2 %.
pub const SIGMA_LOWER_EDGE: f64 = 0.01885;
/// σ for which `base + 2σ` reaches the DICE 5.1 %.
pub const SIGMA_DICE_REACH: f64 = 0.01765;
pub const DICE_RATE: f64 = 0.051;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountSpec {
    pub base_rate: f64,
    pub sigma: f64,
    pub band: u32,
}

impl Default for DiscountSpec {
    fn default() -> Self {
        DiscountSpec {
            base_rate: BOND_MEAN_RATE,
            sigma: SIGMA_LOWER_EDGE,
            band: 2,
        }
    }
}

impl DiscountSpec {
    /// Preset whose upper band edge reaches the DICE rate.
    pub fn dice_reach() -> Self {
        DiscountSpec {
            sigma: SIGMA_DICE_REACH,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "lower-edge" | "default" => Ok(Self::default()),
            "dice-reach" => Ok(Self::dice_reach()),
            other => Err(Error::Config(format!("unknown discount preset '{other}'"))),
        }
    }

    /// Mean and sample σ of a real-yield history.
    pub fn from_yields(series: &YieldSeries, band: u32) -> Result<Self> {
        let (base_rate, sigma) = yield_stats(series)?;
        let spec = DiscountSpec { base_rate, sigma, band };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.band < 1 {
            return Err(Error::Config("band must be at least 1 σ".into()));
        }
        if !(self.sigma > 0.0) || !self.base_rate.is_finite() {
            return Err(Error::Config(format!(
                "discount spec needs finite base rate and σ > 0 (got {}, {})",
                self.base_rate, self.sigma
            )));
        }
        if self.lower() <= -1.0 {
            return Err(Error::Config(format!("lower band edge {} is not above −1", self.lower())));
        }
        Ok(())
    }

    pub fn lower(&self) -> f64 {
        self.base_rate - self.band as f64 * self.sigma
    }

    pub fn upper(&self) -> f64 {
        self.base_rate + self.band as f64 * self.sigma
    }

    /// `points` evenly spaced rates across the band, edges included.
    pub fn rates(&self, points: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if points < 2 {
            return Err(Error::Config("discount axis needs at least 2 points".into()));
        }
        let (lo, hi) = (self.lower(), self.upper());
        Ok((0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect())
    }
}

/// `Σ_{i=k}^{k+n} damages(i) · tonnes(i) / (1+d)^{i−k}`: n + 1 terms.
pub fn pv_fl(damages: impl Fn(i32) -> f64, d: f64, k: i32, n: u32, tonnes: impl Fn(i32) -> f64) -> Result<f64> {
    check_rate(d)?;
    let factor = 1.0 / (1.0 + d);
    let mut weight = 1.0;
    let mut total = 0.0;
    for j in 0..=n as i32 {
        let i = k + j;
        total += damages(i) * tonnes(i) * weight;
        weight *= factor;
    }
    Ok(total)
}

/// Discounted partial sums of `flows[j]` (year `k + j`) read off at each of
/// `spans`, which must be increasing and below `flows.len()`.
pub fn pv_partial_sums(flows: &[f64], d: f64, spans: &[u32]) -> Result<Vec<f64>> {
    check_rate(d)?;
    if let Some(&last) = spans.last() {
        if last as usize >= flows.len() {
            return Err(Error::Range(format!(
                "span {last} needs {} years of flows, have {}",
                last as usize + 1,
                flows.len()
            )));
        }
    }
    let factor = 1.0 / (1.0 + d);
    let mut out = Vec::with_capacity(spans.len());
    let mut weight = 1.0;
    let mut total = 0.0;
    let mut next = spans.iter().peekable();
    for (j, f) in flows.iter().enumerate() {
        total += f * weight;
        weight *= factor;
        while next.peek().is_some_and(|&&s| s as usize == j) {
            out.push(total);
            next.next();
        }
        if next.peek().is_none() {
            break;
        }
    }
    Ok(out)
}

fn check_rate(d: f64) -> Result<()> {
    if !(d > -1.0) || !d.is_finite() {
        return Err(Error::Domain(format!("discount rate must be finite and above −1, got {d}")));
    }
    Ok(())
}

/// `r_DF = d_dice / d_base`.
pub fn dice_risk_factor(d_dice: f64, d_base: f64) -> Result<f64> {
    if d_base == 0.0 || !d_base.is_finite() {
        return Err(Error::Domain(format!("base rate must be non-zero, got {d_base}")));
    }
    Ok(d_dice / d_base)
}

/// DICE rate with the risk factor divided back out: `d_base / r_DF`.
pub fn corrected_dice_rate(d_dice: f64, d_base: f64) -> Result<f64> {
    let r = dice_risk_factor(d_dice, d_base)?;
    if r == 0.0 {
        return Err(Error::Domain("DICE rate of zero leaves no risk factor".into()));
    }
    Ok(d_base / r)
}

/// `d_rarF = g_E − g_A`.
pub fn risk_adjustment_fit(g_expected: f64, g_actual: f64) -> f64 {
    g_expected - g_actual
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossStreamParams {
    /// Starting value; negative for a loss stream.
    pub initial: f64,
    pub g_expected: f64,
    pub g_actual: f64,
    pub d_tvm: f64,
}

/// Expected stream risk-adjusted by `d_rar` against the actual stream,
/// both time-value discounted, compared at t = 0..=horizon.
pub fn streams_equalize(params: &LossStreamParams, d_rar: f64, horizon: u32) -> bool {
    let p = params;
    (0..=horizon).all(|t| {
        let t = t as f64;
        let expected = p.initial * ((p.g_expected - p.d_tvm - d_rar) * t).exp();
        let actual = p.initial * ((p.g_actual - p.d_tvm) * t).exp();
        (expected - actual).abs() <= 1e-9 * actual.abs()
    })
}

pub fn verify_stream_equalization(params: &LossStreamParams, horizon: u32) -> bool {
    streams_equalize(params, risk_adjustment_fit(params.g_expected, params.g_actual), horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrisisEvent {
    pub name: String,
    pub pct_change_from_baseline: f64,
    pub pct_of_gdp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WtpStats {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub min: f64,
    pub sigma: f64,
    /// Set when there are too few events for a sample σ.
    pub degenerate: bool,
}

pub fn wtp_stats(events: &[CrisisEvent]) -> Result<WtpStats> {
    if events.is_empty() {
        return Err(Error::InsufficientData("no crisis events".into()));
    }
    let v: Vec<f64> = events.iter().map(|e| e.pct_of_gdp).collect();
    Ok(WtpStats {
        mean: stats::mean(&v),
        median: stats::median(&v),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        sigma: stats::sample_std(&v),
        degenerate: v.len() < 2,
    })
}

#[derive(Deserialize)]
struct EventRow {
    name: String,
    pct_change: f64,
    pct_of_gdp: f64,
}

/// Crisis events from CSV `name,pct_change,pct_of_gdp`, values in percent.
pub fn read_crisis_events<R: Read>(reader: R, origin: &Path) -> Result<Vec<CrisisEvent>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut events = Vec::new();
    for (i, row) in rdr.deserialize::<EventRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.position().map_or(i + 2, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        if !(row.pct_of_gdp > 0.0) {
            return Err(Error::Validation(format!(
                "{}: event '{}' needs a positive share of GDP",
                origin.display(),
                row.name
            )));
        }
        events.push(CrisisEvent {
            name: row.name,
            pct_change_from_baseline: row.pct_change / 100.0,
            pct_of_gdp: row.pct_of_gdp / 100.0,
        });
    }
    Ok(events)
}

pub fn load_crisis_events(path: impl AsRef<Path>) -> Result<Vec<CrisisEvent>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_crisis_events(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undiscounted_inclusive_sum() {
        let v = pv_fl(|_| 5.0, 0.0, 2025, 10, |_| 1.0).unwrap();
        assert_eq!(v, 55.0);
    }

    #[test]
    fn single_term_ignores_rate() {
        for d in [-0.5, 0.0, 0.3, 7.0] {
            let v = pv_fl(|y| y as f64, d, 2030, 0, |_| 2.0).unwrap();
            assert_eq!(v, 4060.0);
        }
    }

    #[test]
    fn rate_floor() {
        assert!(matches!(pv_fl(|_| 1.0, -1.0, 0, 3, |_| 1.0), Err(Error::Domain(_))));
        assert!(pv_fl(|_| 1.0, -0.022, 0, 3, |_| 1.0).is_ok());
    }

    #[test]
    fn partial_sums_match_direct() {
        let flows: Vec<f64> = (0..50).map(|j| 1.0 + j as f64 * 0.3).collect();
        let spans = [0, 9, 10, 49];
        let sums = pv_partial_sums(&flows, 0.02, &spans).unwrap();
        for (s, n) in sums.iter().zip(spans) {
            let direct = pv_fl(|i| flows[i as usize], 0.02, 0, n, |_| 1.0).unwrap();
            assert!((s - direct).abs() <= 1e-12 * direct.abs());
        }
        assert!(matches!(pv_partial_sums(&flows, 0.02, &[50]), Err(Error::Range(_))));
    }

    #[test]
    fn dice_numbers() {
        let r = dice_risk_factor(0.051, 0.0157).unwrap();
        assert!((r - 3.2484).abs() < 1e-4);
        assert_eq!(dice_risk_factor(0.7, 0.7).unwrap(), 1.0);
        let c = corrected_dice_rate(0.051, 0.0157).unwrap();
        assert!((c - 0.004833).abs() < 1e-6);
        assert!(dice_risk_factor(0.05, 0.0).is_err());
    }

    #[test]
    fn band_edges() {
        let d = DiscountSpec::default();
        assert!((d.lower() + 0.022).abs() < 1e-12);
        assert!((DiscountSpec::dice_reach().upper() - 0.051).abs() < 1e-12);
        let r = d.rates(41).unwrap();
        assert_eq!(r.len(), 41);
        assert!((r[20] - 0.0157).abs() < 1e-12);
    }

    #[test]
    fn adjustment_signs() {
        assert!((risk_adjustment_fit(0.03, 0.02) - 0.01).abs() < 1e-15);
        assert_eq!(risk_adjustment_fit(0.02, 0.02), 0.0);
        assert!((risk_adjustment_fit(0.02, 0.03) + 0.01).abs() < 1e-15);
    }

    #[test]
    fn equalization() {
        let gains = LossStreamParams {
            initial: 100.0,
            g_expected: 0.05,
            g_actual: 0.03,
            d_tvm: 0.02,
        };
        let losses = LossStreamParams {
            initial: -100.0,
            g_expected: 0.02,
            g_actual: 0.04,
            d_tvm: 0.02,
        };
        for p in [gains, losses] {
            assert!(verify_stream_equalization(&p, 300));
            let fit = risk_adjustment_fit(p.g_expected, p.g_actual);
            assert!(!streams_equalize(&p, fit + 1e-4, 300));
        }
    }

    fn event(v: f64) -> CrisisEvent {
        CrisisEvent {
            name: "e".into(),
            pct_change_from_baseline: 1.0,
            pct_of_gdp: v,
        }
    }

    #[test]
    fn single_event_is_degenerate() {
        let s = wtp_stats(&[event(0.2)]).unwrap();
        assert_eq!((s.mean, s.median, s.max, s.min, s.sigma), (0.2, 0.2, 0.2, 0.2, 0.0));
        assert!(s.degenerate);
        assert!(matches!(wtp_stats(&[]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn events_csv() {
        let text = "name,pct_change,pct_of_gdp\nWW2,2914.46,29.95\nKorea,240.40,35.54\n";
        let ev = read_crisis_events(text.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].pct_of_gdp - 0.2995).abs() < 1e-15);
        let bad = "name,pct_change,pct_of_gdp\nX,1,zero\n";
        match read_crisis_events(bad.as_bytes(), Path::new("mem")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
