use focusmr::truncnorm::{self, TruncSpec};
use focusmr::Error;
use proptest::prelude::*;

/// Adaptive Simpson on [a, b].
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    // fixed panels first so a coarse estimate cannot converge by accident
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let m = 0.5 * (lo + hi);
            let (fa, fm, fb) = (f(lo), f(m), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            rec(f, lo, hi, fa, fm, fb, whole, eps / panels as f64, 40)
        })
        .sum()
}

/// Mean and variance of N(mu, 1) restricted to [a, b] by direct integration.
/// The density is rescaled by its value at the point of [a, b] nearest `mu`
/// so far tails do not underflow; the scale cancels in the ratios.
fn quad_moments(a: f64, b: f64, mu: f64) -> (f64, f64) {
    let c = mu.clamp(a, b) - mu;
    let w = |x: f64| (-0.5 * (x - mu).powi(2) + 0.5 * c * c).exp();
    let eps = 1e-14;
    let z = simpson(&w, a, b, eps);
    let m = simpson(&|x| x * w(x), a, b, eps) / z;
    let v = simpson(&|x| (x - m).powi(2) * w(x), a, b, eps) / z;
    (m, v)
}

#[test]
fn symmetric_null_variance_matches_closed_form_and_quadrature() {
    for tau in [0.5, 1.2, 1.5, 2.0, 3.0] {
        let closed = 1.0
            - 2.0 * tau * truncnorm::std_pdf(tau)
                / (truncnorm::std_cdf(tau) - truncnorm::std_cdf(-tau));
        let (_, quad) = quad_moments(-tau, tau, 0.0);
        let got = truncnorm::symmetric_null_variance(tau).unwrap();
        assert!((got - closed).abs() < 1e-12, "tau {tau}");
        assert!((got - quad).abs() < 1e-8, "tau {tau}: {got} vs {quad}");
    }
}

#[test]
fn moments_match_quadrature_on_grid() {
    for i in 0..=20 {
        let mu = -5.0 + 0.5 * i as f64;
        for k in 0..=11 {
            let tau = 0.5 + 0.5 * k as f64;
            let spec = TruncSpec::symmetric(tau, mu).unwrap();
            let (qm, qv) = quad_moments(-tau, tau, mu);
            let (m, v) = (spec.mean().unwrap(), spec.variance().unwrap());
            assert!((m - qm).abs() < 1e-8, "mean mu {mu} tau {tau}: {m} vs {qm}");
            assert!((v - qv).abs() < 1e-8, "var mu {mu} tau {tau}: {v} vs {qv}");
        }
    }
}

#[test]
fn asymmetric_and_far_tail_intervals() {
    for &(a, b, mu) in &[(-1.0, 2.5, 0.3), (2.0, 3.0, -1.0), (8.0, 9.5, 0.0), (-12.0, -10.0, 1.0), (0.0, 0.2, 4.0)] {
        let spec = TruncSpec::new(a, b, mu).unwrap();
        let (qm, qv) = quad_moments(a, b, mu);
        assert!((spec.mean().unwrap() - qm).abs() < 1e-8, "({a}, {b}, {mu})");
        assert!((spec.variance().unwrap() - qv).abs() < 1e-8, "({a}, {b}, {mu})");
    }
}

#[test]
fn frozen_values() {
    // mpmath at 30 digits
    let spec = TruncSpec::new(-1.5, 1.5, 0.5).unwrap();
    assert!((spec.mean().unwrap() - 0.270362820908671031).abs() < 1e-12);
    assert!((spec.variance().unwrap() - 0.519762539211533936).abs() < 1e-12);
    assert!((truncnorm::std_quantile(0.975).unwrap() - 1.95996398454005424).abs() < 1e-12);
}

#[test]
fn half_lines_reduce_to_mills_ratio() {
    // E[X | X > 0] = 2 phi(0) for the standard normal
    let spec = TruncSpec::new(0.0, f64::INFINITY, 0.0).unwrap();
    assert!((spec.mean().unwrap() - 2.0 * truncnorm::std_pdf(0.0)).abs() < 1e-14);
    assert!((spec.variance().unwrap() - (1.0 - 2.0 / std::f64::consts::PI)).abs() < 1e-14);
    let whole = TruncSpec::new(f64::NEG_INFINITY, f64::INFINITY, 0.7).unwrap();
    assert!((whole.mean().unwrap() - 0.7).abs() < 1e-15);
    assert!((whole.variance().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn vanishing_mass_is_an_error() {
    let spec = TruncSpec::new(40.0, 41.0, 0.0).unwrap();
    assert!(matches!(spec.mean(), Err(Error::DegenerateTruncation { .. })));
    assert!(TruncSpec::new(1.0, 1.0, 0.0).is_err());
    assert!(TruncSpec::new(2.0, 1.0, 0.0).is_err());
    assert!(TruncSpec::symmetric(-1.0, 0.0).is_err());
}

#[test]
fn symmetric_variance_grows_with_tau() {
    let mut prev = 0.0;
    for k in 1..=60 {
        let v = truncnorm::symmetric_null_variance(0.1 * k as f64).unwrap();
        assert!(v > prev && v < 1.0);
        prev = v;
    }
}

proptest! {
    #[test]
    fn reflection(a in -6.0f64..6.0, w in 0.05f64..6.0, mu in -5.0f64..5.0) {
        let b = a + w;
        let s = TruncSpec::new(a, b, mu).unwrap();
        let r = TruncSpec::new(-b, -a, -mu).unwrap();
        prop_assert!((s.mean().unwrap() + r.mean().unwrap()).abs() < 1e-10);
        prop_assert!((s.variance().unwrap() - r.variance().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn mean_increases_with_mu(a in -4.0f64..4.0, w in 0.1f64..5.0, mu in -4.0f64..4.0, step in 0.01f64..1.0) {
        let lo = TruncSpec::new(a, a + w, mu).unwrap().mean().unwrap();
        let hi = TruncSpec::new(a, a + w, mu + step).unwrap().mean().unwrap();
        prop_assert!(hi >= lo - 1e-12);
        prop_assert!(lo >= a - 1e-12 && lo <= a + w + 1e-12);
    }

    #[test]
    fn variance_below_one(a in -4.0f64..4.0, w in 0.1f64..5.0, mu in -4.0f64..4.0) {
        let v = TruncSpec::new(a, a + w, mu).unwrap().variance().unwrap();
        prop_assert!(v > 0.0 && v < 1.0 && v <= w * w / 4.0 + 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(p in 1e-12f64..(1.0 - 1e-12)) {
        let q = truncnorm::std_quantile(p).unwrap();
        let back = truncnorm::std_cdf(q);
        prop_assert!((back - p).abs() <= 1e-13 * p.min(1.0 - p).max(1e-3));
    }
}
