//! Levenberg–Marquardt for the small dense problems in this crate
//! (exponential and remainder-curve fits).

use nalgebra::{DMatrix, DVector};

pub(crate) trait LeastSquares {
    fn residual_count(&self) -> usize;

    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Row-major `residual_count × params.len()` Jacobian. Central differences
    /// unless overridden.
    fn jacobian(&self, params: &[f64], out: &mut DMatrix<f64>) {
        let m = self.residual_count();
        let mut plus = vec![0.0; m];
        let mut minus = vec![0.0; m];
        let mut p = params.to_vec();
        for j in 0..params.len() {
            let h = 1e-6 * params[j].abs().max(1e-3);
            p[j] = params[j] + h;
            self.residuals(&p, &mut plus);
            p[j] = params[j] - h;
            self.residuals(&p, &mut minus);
            p[j] = params[j];
            for i in 0..m {
                out[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub params: Vec<f64>,
    pub sse: f64,
    pub converged: bool,
}

fn sse(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

pub(crate) fn levenberg_marquardt<P: LeastSquares>(problem: &P, init: &[f64], max_iter: usize) -> LmOutcome {
    let m = problem.residual_count();
    let n = init.len();
    let mut params = init.to_vec();
    let mut r = vec![0.0; m];
    problem.residuals(&params, &mut r);
    let mut cost = sse(&r);
    let mut jac = DMatrix::zeros(m, n);
    let mut mu = 1e-3;
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; m];
    let mut converged = false;

    for _ in 0..max_iter {
        if !cost.is_finite() {
            break;
        }
        if cost == 0.0 {
            converged = true;
            break;
        }
        problem.jacobian(&params, &mut jac);
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &rv;
        if g.amax() <= 1e-30 * (1.0 + cost) {
            converged = true;
            break;
        }

        let mut improved = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    mu *= 10.0;
                    continue;
                }
            };
            for k in 0..n {
                trial[k] = params[k] + step[k];
            }
            problem.residuals(&trial, &mut r_trial);
            let c = sse(&r_trial);
            if c.is_finite() && c <= cost {
                let rel_step = step
                    .iter()
                    .zip(&params)
                    .map(|(s, p)| s.abs() / p.abs().max(1e-12))
                    .fold(0.0, f64::max);
                let rel_cost = (cost - c) / cost.max(f64::MIN_POSITIVE);
                params.copy_from_slice(&trial);
                r.copy_from_slice(&r_trial);
                cost = c;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                if rel_step < 1e-14 || (rel_cost < 1e-16 && rel_step < 1e-10) {
                    converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            // no descent from here: treat as converged at a stationary point
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    LmOutcome {
        params,
        sse: cost,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl LeastSquares for Rosenbrock {
        fn residual_count(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 10.0 * (p[1] - p[0] * p[0]);
            out[1] = 1.0 - p[0];
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let out = levenberg_marquardt(&Rosenbrock, &[-1.2, 1.0], 500);
        assert!(out.converged);
        assert!((out.params[0] - 1.0).abs() < 1e-8);
        assert!((out.params[1] - 1.0).abs() < 1e-8);
    }
}
