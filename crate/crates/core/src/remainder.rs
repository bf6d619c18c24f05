//! Airborne-remainder curves: the fraction of a CO₂ pulse still in the
//! atmosphere `t` years after emission, as a floor plus decaying exponentials.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq::{levenberg_marquardt, LeastSquares};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RemainderId {
    /// Lowest airborne remainder (strongest absorption).
    #[serde(rename = "C_RL")]
    Low,
    /// Harmonic mean of the low and high curves.
    #[serde(rename = "C_RC")]
    Central,
    /// Highest airborne remainder.
    #[serde(rename = "C_RH")]
    High,
}

impl RemainderId {
    pub const ALL: [RemainderId; 3] = [RemainderId::Low, RemainderId::Central, RemainderId::High];

    pub fn code(self) -> &'static str {
        match self {
            RemainderId::Low => "C_RL",
            RemainderId::Central => "C_RC",
            RemainderId::High => "C_RH",
        }
    }
}

impl fmt::Display for RemainderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RemainderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C_RL" | "LOW" => Ok(RemainderId::Low),
            "C_RC" | "CENTRAL" => Ok(RemainderId::Central),
            "C_RH" | "HIGH" => Ok(RemainderId::High),
            other => Err(Error::Config(format!("unknown remainder curve `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderTerm {
    pub amplitude: f64,
    pub efold_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderCurve {
    pub id: RemainderId,
    pub terms: Vec<RemainderTerm>,
    pub floor: f64,
}

impl RemainderCurve {
    /// Checks `value(0) == 1`, non-negative amplitudes (monotone decay) and
    /// `0 <= floor < 1`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.floor) {
            return Err(Error::Validation(format!(
                "{}: floor {} outside [0, 1)",
                self.id, self.floor
            )));
        }
        for t in &self.terms {
            if !(t.amplitude >= 0.0) || !(t.efold_years > 0.0) || !t.efold_years.is_finite() {
                return Err(Error::Validation(format!(
                    "{}: term needs amplitude >= 0 and finite e-fold > 0, got {:?}",
                    self.id, t
                )));
            }
        }
        let at_zero = self.floor + self.terms.iter().map(|t| t.amplitude).sum::<f64>();
        if (at_zero - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "{}: value at t=0 is {at_zero}, expected 1",
                self.id
            )));
        }
        Ok(())
    }

    /// Unchecked evaluation for `t >= 0`.
    pub fn value(&self, t: f64) -> f64 {
        let v = self.floor
            + self
                .terms
                .iter()
                .map(|term| term.amplitude * (-t / term.efold_years).exp())
                .sum::<f64>();
        v.clamp(f64::MIN_POSITIVE, 1.0)
    }
}

/// Fraction of an emitted pulse still airborne after `t` years.
pub fn remainder_fraction(curve: &RemainderCurve, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("remainder time must be >= 0, got {t}")));
    }
    Ok(curve.value(t))
}

#[derive(Debug, Clone)]
pub struct RemainderFit {
    pub curve: RemainderCurve,
    pub rms: f64,
}

/// Variable-projection residual: for fixed e-folds the amplitudes solve a
/// linear least-squares problem, so only `ln τ` is searched nonlinearly.
struct Projected<'a> {
    anchors: &'a [(f64, f64)],
}

impl Projected<'_> {
    fn design(&self, log_tau: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.anchors.len(), log_tau.len(), |i, j| {
            let tau = log_tau[j].clamp(-5.0, 15.0).exp();
            (-self.anchors[i].0 / tau).exp() - 1.0
        })
    }

    fn amplitudes(&self, log_tau: &[f64]) -> Option<DVector<f64>> {
        let a = self.design(log_tau);
        let y = DVector::from_iterator(self.anchors.len(), self.anchors.iter().map(|p| p.1 - 1.0));
        a.svd(true, true).solve(&y, 1e-13).ok()
    }
}

impl LeastSquares for Projected<'_> {
    fn residual_count(&self) -> usize {
        self.anchors.len()
    }

    fn residuals(&self, log_tau: &[f64], out: &mut [f64]) {
        let a = self.design(log_tau);
        match self.amplitudes(log_tau) {
            Some(x) => {
                let fitted = a * x;
                for (i, (_, f)) in self.anchors.iter().enumerate() {
                    out[i] = 1.0 + fitted[i] - f;
                }
            }
            None => out.iter_mut().for_each(|v| *v = f64::INFINITY),
        }
    }
}

/// Least-squares fit of `floor + Σ aᵢ·exp(−t/τᵢ)` with `n_terms` exponentials,
/// constrained to pass through 1 at `t = 0`.
pub fn fit_remainder(id: RemainderId, anchors: &[(f64, f64)], n_terms: usize) -> Result<RemainderFit> {
    if n_terms == 0 {
        return Err(Error::Fit("need at least one exponential term".into()));
    }
    if anchors.len() < 4 || anchors.len() < n_terms * 2 + 1 {
        return Err(Error::InsufficientData(format!(
            "{} anchors cannot determine {n_terms} terms (need >= max(4, {}))",
            anchors.len(),
            2 * n_terms + 1
        )));
    }
    for &(t, f) in anchors {
        if !(t >= 0.0) || !(f > 0.0 && f <= 1.0) {
            return Err(Error::Domain(format!("anchor ({t}, {f}) out of range")));
        }
    }
    let t_min = anchors.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
    let t_max = anchors.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
    if t_max - t_min <= 0.0 {
        return Err(Error::Fit("anchors share a single time; curve is undetermined".into()));
    }

    let problem = Projected { anchors };
    let lo = anchors
        .iter()
        .map(|a| a.0)
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min)
        .max(0.5);
    let hi = t_max.max(lo * 2.0);

    // Several log-spaced starting grids; keep the best converged fit.
    let mut best: Option<(Vec<f64>, f64)> = None;
    for spread in [1.0, 0.5, 2.0, 0.25] {
        let centre = 0.5 * (lo.ln() + hi.ln());
        let half = 0.5 * (hi.ln() - lo.ln()) * spread;
        let init: Vec<f64> = (0..n_terms)
            .map(|k| {
                if n_terms == 1 {
                    centre
                } else {
                    centre - half + 2.0 * half * k as f64 / (n_terms - 1) as f64
                }
            })
            .collect();
        let out = levenberg_marquardt(&problem, &init, 2000);
        if out.sse.is_finite() && best.as_ref().is_none_or(|b| out.sse < b.1) {
            best = Some((out.params, out.sse));
        }
    }
    let (log_tau, sse) = best.ok_or_else(|| Error::Fit("no finite solution".into()))?;
    let amps = problem
        .amplitudes(&log_tau)
        .ok_or_else(|| Error::Fit("singular amplitude system".into()))?;

    let mut terms: Vec<RemainderTerm> = log_tau
        .iter()
        .zip(amps.iter())
        .map(|(&lt, &a)| RemainderTerm {
            amplitude: a,
            efold_years: lt.clamp(-5.0, 15.0).exp(),
        })
        .collect();
    terms.sort_by(|a, b| a.efold_years.total_cmp(&b.efold_years));
    let floor = 1.0 - terms.iter().map(|t| t.amplitude).sum::<f64>();
    let curve = RemainderCurve { id, terms, floor };
    curve
        .validate()
        .map_err(|e| Error::Fit(format!("fitted curve is not a valid remainder curve: {e}")))?;

    Ok(RemainderFit {
        curve,
        rms: (sse / anchors.len() as f64).sqrt(),
    })
}

/// Harmonic mean of two remainder fractions.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    2.0 / (1.0 / a + 1.0 / b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term() -> RemainderCurve {
        RemainderCurve {
            id: RemainderId::Central,
            terms: vec![
                RemainderTerm {
                    amplitude: 0.3,
                    efold_years: 20.0,
                },
                RemainderTerm {
                    amplitude: 0.45,
                    efold_years: 400.0,
                },
            ],
            floor: 0.25,
        }
    }

    #[test]
    fn unity_at_emission() {
        assert_eq!(remainder_fraction(&two_term(), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_time_is_domain_error() {
        assert!(matches!(remainder_fraction(&two_term(), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tends_to_floor() {
        let c = two_term();
        let mut prev = 1.0;
        for t in (0..20).map(|k| 10f64.powf(k as f64 * 0.3)) {
            let v = c.value(t);
            assert!(v <= prev);
            prev = v;
        }
        assert!((c.value(1e6) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn recovers_two_term_curve() {
        let c = two_term();
        let anchors: Vec<(f64, f64)> = [0.0, 5.0, 10.0, 20.0, 40.0, 80.0, 150.0, 300.0, 600.0, 1200.0, 2500.0]
            .iter()
            .map(|&t| (t, c.value(t)))
            .collect();
        let fit = fit_remainder(RemainderId::Central, &anchors, 2).unwrap();
        assert!(fit.rms < 1e-8, "rms {}", fit.rms);
        assert!((fit.curve.floor - 0.25).abs() < 1e-6);
        for (got, want) in fit.curve.terms.iter().zip(&c.terms) {
            assert!((got.amplitude - want.amplitude).abs() < 1e-6);
            assert!((got.efold_years / want.efold_years - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn single_term_floor() {
        let anchors: Vec<(f64, f64)> = [0.0, 10.0, 30.0, 60.0, 120.0, 300.0]
            .iter()
            .map(|&t| (t, 0.2 + 0.8 * (-t / 45.0f64).exp()))
            .collect();
        let fit = fit_remainder(RemainderId::Low, &anchors, 1).unwrap();
        assert!((fit.curve.floor - 0.2).abs() < 1e-6, "floor {}", fit.curve.floor);
    }

    #[test]
    fn equal_times_rejected() {
        let anchors = vec![(10.0, 0.5); 5];
        assert!(matches!(fit_remainder(RemainderId::Low, &anchors, 1), Err(Error::Fit(_))));
    }

    #[test]
    fn too_few_anchors() {
        let anchors = vec![(0.0, 1.0), (1.0, 0.9), (2.0, 0.8)];
        assert!(fit_remainder(RemainderId::Low, &anchors, 1).is_err());
    }
}
