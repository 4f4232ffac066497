use proptest::prelude::*;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use lfsm_core::estimation::empirical_char_fn;
use lfsm_core::model::{kernel_constant_pow, lfsm_codifference, simulate_lfsm, LfsmParams, SimConfig};
use lfsm_core::RngState;

/// `∫_{e^lo}^{e^hi} f(u) du` by the trapezoid rule in `y = ln u` with `n`
/// panels, refined once by Richardson extrapolation.
fn log_trapezoid(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let rule = |n: usize| {
        let h = (hi - lo) / n as f64;
        let g = |y: f64| {
            let u = y.exp();
            f(u) * u
        };
        let inner: f64 = (1..n).map(|k| g(lo + k as f64 * h)).sum();
        h * (inner + 0.5 * (g(lo) + g(hi)))
    };
    let coarse = rule(n);
    let fine = rule(2 * n);
    fine + (fine - coarse) / 3.0
}

#[test]
fn kernel_constant_two_quadratures_agree() {
    let (alpha, hurst) = (2.0, 0.8);
    let beta: f64 = hurst - 1.0 / alpha;
    let integrand = |u: f64| ((1.0 + u).powf(beta) - u.powf(beta)).powi(2);
    let hi: f64 = 60.0;
    let tail = beta * beta * hi.exp().powf(2.0 * beta - 1.0) / (1.0 - 2.0 * beta);
    let grid = 1.0 / (alpha * hurst) + log_trapezoid(&integrand, -60.0, hi, 20_000) + tail;
    let adaptive = kernel_constant_pow(alpha, hurst).unwrap();
    assert!((grid.sqrt() - adaptive.sqrt()).abs() < 1e-6, "{grid} {adaptive}");
    let closed = gamma(hurst + 0.5).powi(2)
        / (gamma(2.0 * hurst + 1.0) * (std::f64::consts::PI * hurst).sin());
    assert!((adaptive - closed).abs() < 1e-11);
}

#[test]
fn gaussian_codifference_matches_kernel_product() {
    // CD(X_1, X_2) = 2 ∫ k_1 k_2 with k_t(u) = (t-u)_+^β - (-u)_+^β; on (0, 1)
    // the product is w^β (1+w)^β with w = 1 - u
    let hurst = 0.7;
    let beta: f64 = hurst - 0.5;
    let p = LfsmParams::standard(2.0, hurst).unwrap();
    let inside = log_trapezoid(&|w: f64| w.powf(beta) * (1.0 + w).powf(beta), -60.0, 0.0, 20_000);
    let past = |v: f64| ((1.0 + v).powf(beta) - v.powf(beta)) * ((2.0 + v).powf(beta) - v.powf(beta));
    let hi: f64 = 60.0;
    let tail = 2.0 * beta * beta * hi.exp().powf(2.0 * beta - 1.0) / (1.0 - 2.0 * beta);
    let outside = log_trapezoid(&past, -60.0, hi, 20_000) + tail;
    let oracle = 2.0 * (inside + outside);
    let cd = lfsm_codifference(&p, 1.0, 2.0).unwrap();
    assert!((cd - oracle).abs() < 1e-6 * oracle, "{cd} {oracle}");
}

#[test]
fn levy_codifference_is_twice_the_minimum() {
    let p = LfsmParams::standard(1.5, 2.0 / 3.0).unwrap();
    assert!((lfsm_codifference(&p, 3.0, 5.0).unwrap() - 6.0).abs() < 1e-12);
    let p = LfsmParams::new(1.2, 0.4, 2.0).unwrap();
    let k = kernel_constant_pow(1.2, 0.4).unwrap();
    let same = lfsm_codifference(&p, 1.7, 1.7).unwrap();
    assert!((same - 2.0 * 2f64.powf(1.2) * k * 1.7f64.powf(1.2 * 0.4)).abs() < 1e-12 * same);
}

#[test]
fn kernel_constant_cauchy_identity() {
    // at α = 1, ∫_0^∞ (u^β - (1+u)^β) du = 1/H, so K^α = 2/H
    for &h in &[0.02, 0.1, 0.35, 0.6, 0.9, 0.98] {
        let k = kernel_constant_pow(1.0, h).unwrap();
        assert!((k - 2.0 / h).abs() < 1e-10 * k, "{h}: {k}");
    }
}

/// Empirical codifference of two samples drawn jointly.
fn empirical_cd(x: &[f64], y: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    -empirical_char_fn(x, 1.0).ln() - empirical_char_fn(y, 1.0).ln() + empirical_char_fn(&diff, 1.0).ln()
}

#[test]
fn simulated_codifference_matches_theory() {
    let p = LfsmParams::standard(2.0, 0.8).unwrap();
    let cfg = SimConfig { dt: 0.01, horizon: 0.6, truncation: 50.0 };
    let (i_s, i_t) = (30usize, 60usize);
    let pairs: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let path = simulate_lfsm(&p, &cfg, &mut RngState::substream(41, k)).unwrap();
            (path.values()[i_s], path.values()[i_t])
        })
        .collect();
    let batches: Vec<f64> = pairs
        .chunks(100)
        .map(|c| {
            let (x, y): (Vec<f64>, Vec<f64>) = c.iter().copied().unzip();
            empirical_cd(&x, &y)
        })
        .collect();
    let mean = batches.iter().sum::<f64>() / batches.len() as f64;
    let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (batches.len() - 1) as f64;
    let se = (var / batches.len() as f64).sqrt();
    let theory = lfsm_codifference(&p, 0.3, 0.6).unwrap();
    assert!((mean - theory).abs() < 4.0 * se + 0.05 * theory, "{mean} ± {se} vs {theory}");
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn ks_critical(n: usize, m: usize) -> f64 {
    // 0.1% level
    1.95 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

fn values_at(p: &LfsmParams, cfg: &SimConfig, seed: u64, n: u64, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .map(|k| f(simulate_lfsm(p, cfg, &mut RngState::substream(seed, k)).unwrap().values()))
        .collect()
}

#[test]
fn levy_motion_self_similarity() {
    let alpha = 1.5;
    let p = LfsmParams::standard(alpha, 1.0 / alpha).unwrap();
    let cfg = SimConfig { dt: 0.01, horizon: 4.0, truncation: 0.0 };
    let c = 4f64;
    let mut early = values_at(&p, &cfg, 1, 2000, |v| v[100]);
    let mut late = values_at(&p, &cfg, 2, 2000, |v| v[400] / c.powf(1.0 / alpha));
    let d = ks_statistic(&mut early, &mut late);
    assert!(d < ks_critical(2000, 2000), "{d}");
}

#[test]
fn increments_are_stationary() {
    let p = LfsmParams::standard(1.5, 0.8).unwrap();
    let cfg = SimConfig { dt: 0.01, horizon: 4.0, truncation: 50.0 };
    let mut early = values_at(&p, &cfg, 3, 1000, |v| v[100] - v[50]);
    let mut late = values_at(&p, &cfg, 4, 1000, |v| v[400] - v[350]);
    let d = ks_statistic(&mut early, &mut late);
    assert!(d < ks_critical(1000, 1000), "{d}");
}

#[test]
fn zero_truncation_levy_path_is_cumulative_sum() {
    use lfsm_core::stable::draw_unit;
    let alpha = 1.3;
    let p = LfsmParams::standard(alpha, 1.0 / alpha).unwrap();
    let cfg = SimConfig { dt: 0.01, horizon: 1.0, truncation: 0.0 };
    let path = simulate_lfsm(&p, &cfg, &mut RngState::new(9)).unwrap();
    let mut rng = RngState::new(9);
    let scale = 0.01f64.powf(1.0 / alpha);
    let mut acc = 0.0;
    for k in 1..path.len() {
        acc += draw_unit(alpha, &mut rng);
        assert!((path.values()[k] - scale * acc).abs() < 1e-12 * (1.0 + acc.abs()));
    }
}

proptest! {
    #[test]
    fn codifference_is_symmetric(alpha in 0.3f64..2.0, hurst in 0.05f64..0.95, s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let p = LfsmParams::new(alpha, hurst, 1.3).unwrap();
        let a = lfsm_codifference(&p, s, t).unwrap();
        let b = lfsm_codifference(&p, t, s).unwrap();
        prop_assert_eq!(a, b);
    }
}
