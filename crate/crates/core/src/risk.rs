//! Distribution-free tail-risk curves built on the one-sided Chebyshev
//! multiplier, and the chance of at least one extreme year over a span.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::damages::{ExpCurve, ScaledDamagesCurve};
use crate::error::{Error, Result};
use crate::ingest::fmt_f64;

/// `k = 1/√(2·risk)`: the σ multiple whose exceedance probability is
/// bounded by `risk` in one tail.
pub fn chebyshev_multiplier(risk: f64) -> Result<f64> {
    if !(risk > 0.0 && risk < 1.0) {
        return Err(Error::Domain(format!("risk must lie in (0, 1), got {risk}")));
    }
    Ok(1.0 / (2.0 * risk).sqrt())
}

/// `R_S = 1 − (1 − risk)^span`.
pub fn risk_over_span(risk: f64, span: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&risk) {
        return Err(Error::Domain(format!("risk must lie in [0, 1], got {risk}")));
    }
    if span == 0 {
        return Err(Error::Domain("span must be at least 1 year".into()));
    }
    if span == 1 {
        return Ok(risk);
    }
    Ok(-(span as f64 * (-risk).ln_1p()).exp_m1())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub base: ScaledDamagesCurve,
    pub sigma_curve: ExpCurve,
    pub risk_level: f64,
    pub k: f64,
}

impl RiskCurve {
    /// `k·Eσ(y) + fWD_m(y)`, defined over the years of the base curve.
    pub fn at(&self, year: i32) -> Option<f64> {
        self.base.at(year).map(|fwd| self.k * self.sigma_curve.at(year) + fwd)
    }
}

pub fn risk_curve(base: &ScaledDamagesCurve, sigma: &ExpCurve, risk: f64) -> Result<RiskCurve> {
    Ok(RiskCurve {
        base: base.clone(),
        sigma_curve: *sigma,
        risk_level: risk,
        k: chebyshev_multiplier(risk)?,
    })
}

/// Column label for a risk level given as a fraction: 0.1 → `risk10`,
/// 0.01 → `risk1`, 0.001 → `risk01`.
pub fn risk_column(risk: f64) -> String {
    let pct = format!("{}", (risk * 100.0 * 1e9).round() / 1e9);
    format!("risk{}", pct.replacen("0.", "0", 1).replace('.', "_"))
}

/// Curve table `year,fwd_m,wde,e_sigma,risk…` over `years`.
pub fn write_risk_csv<W: Write>(
    writer: W,
    base: &ScaledDamagesCurve,
    wde: &ExpCurve,
    sigma: &ExpCurve,
    risk_levels: &[f64],
    years: (i32, i32),
) -> Result<()> {
    let curves = risk_levels
        .iter()
        .map(|&r| risk_curve(base, sigma, r))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["year".to_string(), "fwd_m".into(), "wde".into(), "e_sigma".into()];
    header.extend(risk_levels.iter().map(|&r| risk_column(r)));
    w.write_record(&header)?;
    for year in years.0..=years.1 {
        let fwd = base
            .at(year)
            .ok_or_else(|| Error::Range(format!("damages curve has no value for {year}")))?;
        let mut row = vec![year.to_string(), fmt_f64(fwd), fmt_f64(wde.at(year)), fmt_f64(sigma.at(year))];
        row.extend(curves.iter().map(|c| fmt_f64(c.k * sigma.at(year) + fwd)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<risk csv>", e))?;
    Ok(())
}
