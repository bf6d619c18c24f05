//! Independent reference implementations checked against the library.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heatcost::climate::ForcingParams;
use heatcost::damages::{fit_exponential, residual_sigma_curve, scale_heat_curve, DamagesTarget, ExpCurve};
use heatcost::discount::{pv_fl, DiscountSpec};
use heatcost::emissions::{Gas, Pulse};
use heatcost::ingest::{load_damages, DamagesSeries};
use heatcost::model::simulate;
use heatcost::scenario::Catalog;
use heatcost::surface::{sc_ghg_surface, SurfaceContext, SurfaceOptions};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// SSE-optimal amplitude for a fixed rate is closed form, so the fit
/// reduces to a one-dimensional search over the rate.
fn profile_sse(x: &[f64], y: &[f64], rate: f64) -> (f64, f64) {
    let e: Vec<f64> = x.iter().map(|v| (rate * v).exp()).collect();
    let a = e.iter().zip(y).map(|(e, y)| e * y).sum::<f64>() / e.iter().map(|e| e * e).sum::<f64>();
    let sse = e.iter().zip(y).map(|(e, y)| (a * e - y).powi(2)).sum();
    (a, sse)
}

fn grid_search_fit(points: &[(i32, f64)], ref_year: i32) -> (f64, f64) {
    let x: Vec<f64> = points.iter().map(|p| (p.0 - ref_year) as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (mut lo, mut hi) = (-0.5, 0.5);
    for _ in 0..12 {
        let n = 2000;
        let step = (hi - lo) / n as f64;
        let best = (0..=n)
            .map(|i| lo + step * i as f64)
            .min_by(|a, b| profile_sse(&x, &y, *a).1.total_cmp(&profile_sse(&x, &y, *b).1))
            .unwrap();
        lo = best - 2.0 * step;
        hi = best + 2.0 * step;
    }
    let rate = 0.5 * (lo + hi);
    (profile_sse(&x, &y, rate).0, rate)
}

#[test]
fn noisy_exponential_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let amp = rng.gen_range(1e9..5e10);
        let rate = rng.gen_range(0.01..0.12);
        let points: Vec<(i32, f64)> = (1980..=2021)
            .map(|y| (y, amp * (rate * (y - 1980) as f64).exp() * rng.gen_range(0.6..1.6)))
            .collect();
        let fit = fit_exponential(&points, 1980).unwrap();
        let (a, b) = grid_search_fit(&points, 1980);
        assert!(rel(fit.curve.amplitude, a) < 1e-6, "{} vs {a}", fit.curve.amplitude);
        assert!((fit.curve.rate - b).abs() < 1e-6, "{} vs {b}", fit.curve.rate);
    }
}

#[test]
fn constant_points_give_zero_rate() {
    let points: Vec<(i32, f64)> = (2000..2020).map(|y| (y, 42.0)).collect();
    let fit = fit_exponential(&points, 2000).unwrap();
    assert!(fit.curve.rate.abs() < 1e-9);
    assert!(rel(fit.curve.amplitude, 42.0) < 1e-9);
}

#[test]
fn alternating_excess_recovers_sigma_rate() {
    let wde = ExpCurve { amplitude: 2e10, rate: 0.07, ref_year: 1980 };
    let points: Vec<(i32, f64)> = (1980..=2021)
        .map(|y| {
            let excess = if y % 2 == 0 { (0.04 * (y - 1980) as f64).exp() } else { 0.0 };
            (y, wde.at(y) + excess)
        })
        .collect();
    let sigma = residual_sigma_curve(&DamagesSeries::new(points, 2021).unwrap(), &wde).unwrap();
    assert!((sigma.rate - 0.04).abs() < 1e-6, "{}", sigma.rate);
}

/// Runs only when `HEATCOST_NOAA_DAMAGES` names the NOAA billion-dollar
/// disasters series (year,value in 2021 dollars).
#[test]
fn noaa_golden_fit() {
    let Ok(path) = std::env::var("HEATCOST_NOAA_DAMAGES") else {
        eprintln!("HEATCOST_NOAA_DAMAGES not set; skipping");
        return;
    };
    let damages = load_damages(PathBuf::from(path), 2021).unwrap();
    let wde = fit_exponential(&damages.window(1980, 2021), 1980).unwrap();
    let run = simulate(&Catalog::shipped().preset("baseline-low").unwrap(), &ForcingParams::default(), &[]).unwrap();
    let fit = scale_heat_curve(&run.climate, DamagesTarget::Fitted(&wde.curve), (1980, 2021)).unwrap();
    assert!((fit.scalar - 0.3626).abs() <= 5e-4, "scalar {}", fit.scalar);
    assert!((fit.r_squared - 0.9563).abs() <= 1e-3, "R2 {}", fit.r_squared);
}

#[test]
fn pv_matches_naive_power_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = rng.gen_range(1.0..1e6);
        let g = rng.gen_range(-0.03..0.06);
        let d: f64 = rng.gen_range(-0.022..0.12);
        let k: i32 = rng.gen_range(2000..2100);
        let n: u32 = rng.gen_range(0..1500);
        let t = rng.gen_range(0.5..2.0);
        let dmg = |y: i32| a * (g * (y - 2000) as f64).exp();
        let ton = |y: i32| t + 0.001 * (y - 2000) as f64;
        let naive: f64 = (k..=k + n as i32).map(|i| dmg(i) * ton(i) / (1.0 + d).powi(i - k)).sum();
        let got = pv_fl(dmg, d, k, n, ton).unwrap();
        assert!(rel(got, naive) < 1e-10, "{got} vs {naive}");
    }
}

/// Brute force social cost: simulate with and without the pulse, difference
/// the OHC paths, price them, and discount each cell from scratch.
pub fn brute_force_cell(scenario: &str, gas: Gas, year: i32, d: f64, span: u32, dpj: f64, tonnes: f64) -> f64 {
    let s = Catalog::shipped().preset(scenario).unwrap();
    let p = ForcingParams::default();
    let base = simulate(&s, &p, &[]).unwrap().climate;
    let pulsed = simulate(&s, &p, &[Pulse { gas, year, tonnes }]).unwrap().climate;
    (0..=span as i32)
        .map(|j| {
            let y = year + j;
            let dq = pulsed.ohc(y).unwrap() - base.ohc(y).unwrap();
            dpj * dq / tonnes / (1.0 + d).powi(j)
        })
        .sum()
}

#[test]
fn coarse_surface_matches_brute_force() {
    let catalog = Catalog::shipped();
    let low = catalog.preset("baseline-low").unwrap();
    let high = catalog.preset("s-aerosol-high-permafrost").unwrap();
    let ctx = SurfaceContext {
        params: ForcingParams::default(),
        dollars_per_joule: 7e-13,
        spec: DiscountSpec::default(),
        options: SurfaceOptions {
            discount_points: 3,
            spans: vec![10, 150, 1500],
            ..SurfaceOptions::default()
        },
    };
    let grid = sc_ghg_surface(Gas::Ch4, &low, &high, 2025, &ctx).unwrap();
    for (i, &d) in grid.discount_axis.iter().enumerate() {
        for (j, &span) in grid.span_axis.iter().enumerate() {
            let a = brute_force_cell("baseline-low", Gas::Ch4, 2025, d, span, 7e-13, 1e6);
            let b = brute_force_cell("s-aerosol-high-permafrost", Gas::Ch4, 2025, d, span, 7e-13, 1e6);
            let (lo, hi) = grid.cell(i, j);
            assert!(rel(lo, a.min(b)) < 1e-8, "({i},{j}) {lo} vs {}", a.min(b));
            assert!(rel(hi, a.max(b)) < 1e-8, "({i},{j}) {hi} vs {}", a.max(b));
        }
    }
}
