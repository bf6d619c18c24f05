//! Damage curves: exponential fits to observed damages, projection of
//! damages by scaling a modelled ocean-heat curve onto them, and the
//! residual-spread curve that feeds the tail-risk curves.

use serde::{Deserialize, Serialize};

use crate::climate::ClimateSeries;
use crate::error::{Error, Result};
use crate::ingest::DamagesSeries;
use crate::lsq::{levenberg_marquardt, LeastSquares};
use crate::stats::r_squared;

/// `amplitude · exp(rate · (year − ref_year))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpCurve {
    pub amplitude: f64,
    pub rate: f64,
    pub ref_year: i32,
}

impl ExpCurve {
    pub fn eval(&self, year: f64) -> f64 {
        self.amplitude * (self.rate * (year - self.ref_year as f64)).exp()
    }

    pub fn at(&self, year: i32) -> f64 {
        self.eval(year as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub curve: ExpCurve,
    pub r_squared: f64,
}

struct ExpProblem<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl LeastSquares for ExpProblem<'_> {
    fn residual_count(&self) -> usize {
        self.x.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for ((o, &x), &y) in out.iter_mut().zip(self.x).zip(self.y) {
            *o = p[0] * (p[1] * x).exp() - y;
        }
    }

    fn jacobian(&self, p: &[f64], out: &mut nalgebra::DMatrix<f64>) {
        for (i, &x) in self.x.iter().enumerate() {
            let e = (p[1] * x).exp();
            out[(i, 0)] = e;
            out[(i, 1)] = p[0] * x * e;
        }
    }
}

/// Least-squares exponential through `points` on the original scale,
/// started from the log-linear regression.
pub fn fit_exponential(points: &[(i32, f64)], ref_year: i32) -> Result<ExpFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "exponential fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(year, v)) = points.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(Error::Domain(format!("exponential fit needs positive values, got {v} in {year}")));
    }
    let x: Vec<f64> = points.iter().map(|p| (p.0 - ref_year) as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();

    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all points share one year".into()));
    }
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b0 = sxy / sxx;
    let a0 = (my - b0 * mx).exp();

    let out = levenberg_marquardt(&ExpProblem { x: &x, y: &y }, &[a0, b0], 500);
    let (amplitude, rate) = (out.params[0], out.params[1]);
    if !(amplitude > 0.0) || !rate.is_finite() {
        return Err(Error::Fit(format!("fit left the valid region (a = {amplitude}, b = {rate})")));
    }
    let curve = ExpCurve {
        amplitude,
        rate,
        ref_year,
    };
    let fitted: Vec<f64> = points.iter().map(|p| curve.at(p.0)).collect();
    Ok(ExpFit {
        curve,
        r_squared: r_squared(&y, &fitted),
    })
}

/// What the heat curve is scaled onto.
#[derive(Debug, Clone, Copy)]
pub enum DamagesTarget<'a> {
    Observed(&'a DamagesSeries),
    Fitted(&'a ExpCurve),
}

/// A modelled OHC curve scaled onto damages: `fwd(y) = scalar · OHC(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledDamagesCurve {
    /// Dollars per joule of ocean heat anomaly.
    pub scalar: f64,
    pub r_squared: f64,
    pub window: (i32, i32),
    pub source: ClimateSeries,
}

impl ScaledDamagesCurve {
    pub fn at(&self, year: i32) -> Option<f64> {
        self.source.ohc(year).map(|q| self.scalar * q)
    }

    /// Damages path over every simulated year.
    pub fn path(&self) -> Vec<(i32, f64)> {
        self.source.states.iter().map(|s| (s.year, self.scalar * s.ohc)).collect()
    }
}

/// Relative bracket width at which the bisection stops.
pub const SCALAR_TOLERANCE: f64 = 1e-12;

/// Minimise `Σ (s·o − d)²` over the scalar `s` by bisecting on the sign of
/// the derivative. The SSE is a convex quadratic in `s`, so the bracketed
/// root is the global minimum.
pub fn least_squares_scalar(heat: &[f64], target: &[f64]) -> Result<f64> {
    if heat.is_empty() {
        return Err(Error::Domain("empty fit window".into()));
    }
    if heat.iter().all(|&o| o == 0.0) {
        return Err(Error::Degenerate("heat curve is zero over the fit window".into()));
    }
    let slope = |s: f64| -> f64 { heat.iter().zip(target).map(|(o, d)| o * (s * o - d)).sum() };

    let max_o = heat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_d = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut step = if max_d > 0.0 { max_d / max_o } else { 1.0 / max_o };

    let g0 = slope(0.0);
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = if g0 < 0.0 {
        let mut hi = step;
        while slope(hi) < 0.0 {
            step *= 2.0;
            hi = step;
            if !hi.is_finite() {
                return Err(Error::Fit("bracket expansion overflowed".into()));
            }
        }
        (0.0, hi)
    } else {
        let mut lo = -step;
        while slope(lo) > 0.0 {
            step *= 2.0;
            lo = -step;
            if !lo.is_finite() {
                return Err(Error::Fit("bracket expansion overflowed".into()));
            }
        }
        (lo, 0.0)
    };

    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = slope(mid);
        if g == 0.0 {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= SCALAR_TOLERANCE * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scale a modelled OHC curve onto damages inside `window` (inclusive years).
pub fn scale_heat_curve(climate: &ClimateSeries, damages: DamagesTarget<'_>, window: (i32, i32)) -> Result<ScaledDamagesCurve> {
    let (start, end) = window;
    if end < start {
        return Err(Error::Domain(format!("empty window {start}:{end}")));
    }
    if climate.start_year() > start || climate.end_year() < end {
        return Err(Error::Range(format!(
            "climate series {}..={} does not cover window {start}:{end}",
            climate.start_year(),
            climate.end_year()
        )));
    }
    let pairs: Vec<(i32, f64)> = match damages {
        DamagesTarget::Observed(series) => series.window(start, end),
        DamagesTarget::Fitted(curve) => (start..=end).map(|y| (y, curve.at(y))).collect(),
    };
    if pairs.is_empty() {
        return Err(Error::Domain(format!("no damages observations inside {start}:{end}")));
    }
    let heat: Vec<f64> = pairs
        .iter()
        .map(|&(y, _)| climate.ohc(y).expect("window checked"))
        .collect();
    let target: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let scalar = least_squares_scalar(&heat, &target)?;
    let fitted: Vec<f64> = heat.iter().map(|o| scalar * o).collect();
    Ok(ScaledDamagesCurve {
        scalar,
        r_squared: r_squared(&target, &fitted),
        window,
        source: climate.clone(),
    })
}

/// Exponential fitted to the damages that sit above the exponential trend.
pub fn residual_sigma_curve(damages: &DamagesSeries, wde: &ExpCurve) -> Result<ExpCurve> {
    let positive: Vec<(i32, f64)> = damages
        .points
        .iter()
        .map(|&(y, d)| (y, d - wde.at(y)))
        .filter(|&(_, r)| r > 0.0)
        .collect();
    if positive.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 damages above the trend, found {}",
            positive.len()
        )));
    }
    Ok(fit_exponential(&positive, wde.ref_year)?.curve)
}
