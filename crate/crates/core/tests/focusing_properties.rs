mod common;

use focusmr::focusing::{self, focused_ivw, focused_set, relevant_set};
use focusmr::model::{IvClass, DEFAULT_ZERO_TOL};
use focusmr::simulation::simulate_panel;
use focusmr::stats::rng_stream;
use focusmr::{
    power_forecast, run_benchmark, test_direction, test_joint_null, BenchmarkMethod, Direction, FocusConfig,
    FocusedEstimator, Panel, ScreeningThreshold, SnpRecord, TruthConfig,
};
use proptest::prelude::*;

fn cfg(tau_f: f64, tau_s: f64) -> FocusConfig {
    FocusConfig {
        tau_f,
        tau_s: ScreeningThreshold::Explicit(tau_s),
        ..FocusConfig::default()
    }
}

fn oracle_ivw(panel: &Panel, set: &[usize], dir: Direction) -> f64 {
    let rows: Vec<_> = set.iter().map(|&j| panel.oriented(j, dir)).collect();
    let x: Vec<f64> = rows.iter().map(|s| s.beta_exp).collect();
    let y: Vec<f64> = rows.iter().map(|s| s.beta_out).collect();
    let w: Vec<f64> = rows.iter().map(|s| 1.0 / (s.se_out * s.se_out)).collect();
    common::wls_origin(&x, &y, &w)
}

#[test]
fn focused_and_overall_ivw_match_weighted_least_squares() {
    let mut rng = common::rng(11);
    for _ in 0..100 {
        let panel = common::random_panel(&mut rng, 30);
        for dir in Direction::BOTH {
            let set = focused_set(&panel, dir, 1.5, 2.0);
            if !set.is_empty() {
                let got = focused_ivw(&panel, &set, dir).unwrap().estimate;
                let want = oracle_ivw(&panel, &set, dir);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-3), "{got} vs {want}");
            }
            let relevant = relevant_set(&panel, dir, 2.0);
            if !relevant.is_empty() {
                let got = run_benchmark(BenchmarkMethod::OverallIvw, &panel, dir, &cfg(1.5, 2.0)).unwrap();
                let want = oracle_ivw(&panel, &relevant, dir);
                assert!((got.estimate - want).abs() <= 1e-12 * want.abs().max(1e-3));
            }
        }
    }
}

fn rescale(panel: &Panel, exp: f64, out: f64) -> Panel {
    Panel::new(
        panel
            .records()
            .iter()
            .map(|r| SnpRecord::new(r.id.clone(), r.beta_d * exp, r.se_d * exp.abs(), r.beta_y * out, r.se_y * out.abs()))
            .collect(),
    )
    .unwrap()
}

#[test]
fn scale_equivariance() {
    let mut rng = common::rng(12);
    for _ in 0..50 {
        let panel = common::random_panel(&mut rng, 25);
        let base = test_direction(&panel, Direction::DtoY, &cfg(1.5, 2.0), FocusedEstimator::FocusedIvw).unwrap();
        for (e, o) in [(2.0, 1.0), (1.0, 0.1), (-3.0, 7.0), (0.5, -2.0)] {
            let r = test_direction(&rescale(&panel, e, o), Direction::DtoY, &cfg(1.5, 2.0), FocusedEstimator::FocusedIvw)
                .unwrap();
            assert_eq!(r.focused_ids, base.focused_ids);
            let (a, b) = (r.estimate.unwrap(), base.estimate.unwrap() * o / e);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-6));
            assert!((r.p_value - base.p_value).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn focused_set_is_monotone_in_thresholds(seed in 0u64..1000, t1 in 0.1f64..3.0, dt in 0.0f64..2.0, s1 in 0.0f64..6.0, ds in 0.0f64..3.0) {
        let panel = common::random_panel(&mut common::rng(seed), 40);
        for dir in Direction::BOTH {
            let narrow = focused_set(&panel, dir, t1, s1 + ds);
            let wide = focused_set(&panel, dir, t1 + dt, s1);
            prop_assert!(narrow.iter().all(|j| wide.contains(j)));
            let relevant = relevant_set(&panel, dir, s1);
            prop_assert!(wide.iter().all(|j| relevant.contains(j)));
        }
    }

    #[test]
    fn flipping_snp_orientation_changes_nothing(seed in 0u64..1000, flips in prop::collection::vec(any::<bool>(), 20)) {
        let panel = common::random_panel(&mut common::rng(seed), 20);
        let flipped = Panel::new(
            panel.records().iter().zip(&flips)
                .map(|(r, &f)| {
                    let s = if f { -1.0 } else { 1.0 };
                    SnpRecord::new(r.id.clone(), s * r.beta_d, r.se_d, s * r.beta_y, r.se_y)
                })
                .collect(),
        ).unwrap();
        let c = cfg(1.5, 2.0);
        let a = test_direction(&panel, Direction::DtoY, &c, FocusedEstimator::FocusedIvw).unwrap();
        let b = test_direction(&flipped, Direction::DtoY, &c, FocusedEstimator::FocusedIvw).unwrap();
        prop_assert_eq!(&a.focused_ids, &b.focused_ids);
        if let (Some(x), Some(y)) = (a.estimate, b.estimate) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-6));
        }
    }
}

/// 60 SNPs: 20 valid for each direction, 10 null, 10 pleiotropic. Direct
/// effects sit far outside the focusing band so the separation condition holds.
fn null_truth(beta_dy: f64) -> TruthConfig {
    let (mut pi_d, mut pi_y) = (vec![], vec![]);
    let se = 0.01;
    for j in 0..60 {
        let z = 9.0 + (j % 7) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let (d, y) = match j % 6 {
            0 | 1 => (sign * z * se, 0.0),
            2 | 3 => (0.0, sign * z * se),
            4 => (0.0, 0.0),
            _ => (sign * z * se, -sign * (z + 1.0) * se),
        };
        pi_d.push(d);
        pi_y.push(y);
    }
    TruthConfig::new(pi_d, pi_y, beta_dy, 0.0, vec![se; 60], vec![se; 60]).unwrap()
}

#[test]
fn joint_null_test_keeps_its_size() {
    let truth = null_truth(0.0);
    let c = FocusConfig::default();
    let reps = 2000;
    let mut rejections = 0;
    let mut z_sum = 0.0;
    let mut z_sq = 0.0;
    for rep in 0..reps {
        let panel = simulate_panel(&truth, &mut rng_stream(21, rep));
        let j = test_joint_null(&panel, &c, FocusedEstimator::FocusedIvw).unwrap();
        rejections += j.reject as usize;
        let z = j.dy.z_score.unwrap();
        z_sum += z;
        z_sq += z * z;
    }
    let rate = rejections as f64 / reps as f64;
    // binomial sd at 0.05 over 2000 reps is about 0.005
    assert!(rate <= 0.065, "joint rejection rate {rate}");
    let mean = z_sum / reps as f64;
    let var = z_sq / reps as f64 - mean * mean;
    assert!(mean.abs() < 0.08, "mean z {mean}");
    assert!((var - 1.0).abs() < 0.1, "var z {var}");
}

#[test]
fn reverse_valid_snps_rarely_look_relevant() {
    // With beta_yd = 0 a SNP valid only for Y -> D has no association with D,
    // so it passes the screen with probability 2 (1 - Phi(tau_s)) = 2 / p.
    let truth = null_truth(0.0);
    let p = truth.len();
    let tau_s = ScreeningThreshold::OneOverP.resolve(p).unwrap();
    let yd: Vec<usize> = truth
        .classes(DEFAULT_ZERO_TOL)
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == IvClass::ValidYtoD)
        .map(|(j, _)| j)
        .collect();
    let reps = 2000;
    let mut hits = 0;
    for rep in 0..reps {
        let panel = simulate_panel(&truth, &mut rng_stream(22, rep));
        let relevant = relevant_set(&panel, Direction::DtoY, tau_s);
        hits += yd.iter().filter(|j| relevant.contains(j)).count();
    }
    let freq = hits as f64 / (reps as usize * yd.len()) as f64;
    let bound = 2.0 / p as f64;
    // Monte-Carlo sd of the frequency is about 0.0007
    assert!(freq <= bound + 0.003, "{freq} vs {bound}");
    assert!(freq >= bound - 0.006);
}

#[test]
fn power_forecast_reduces_to_size_at_zero_signal() {
    let mut rng = common::rng(23);
    for _ in 0..20 {
        let panel = common::random_panel(&mut rng, 20);
        let set: Vec<usize> = (0..20).collect();
        let f = power_forecast(&panel, Direction::DtoY, &set, &[0.0; 20], &FocusConfig::default()).unwrap();
        assert!(f.mu_alt.abs() < 1e-15);
        assert!((f.predicted_power - 0.05).abs() < 1e-12);
    }
}

#[test]
fn forecast_power_grows_with_the_effect() {
    let panel = common::random_panel(&mut common::rng(24), 20);
    let set: Vec<usize> = (0..20).collect();
    let mut prev = 0.0;
    for k in 0..=10 {
        let beta = 0.01 * k as f64;
        let mus: Vec<f64> = set
            .iter()
            .map(|&j| {
                let s = panel.oriented(j, Direction::DtoY);
                beta * s.beta_exp / s.se_out
            })
            .collect();
        let f = power_forecast(&panel, Direction::DtoY, &set, &mus, &FocusConfig::default()).unwrap();
        assert!(f.predicted_power >= prev - 1e-12, "beta {beta}");
        prev = f.predicted_power;
    }
    assert!(prev > 0.5);
}

#[test]
fn focused_estimate_is_centered_under_the_null() {
    let truth = null_truth(0.0);
    let reps = 1000;
    let mut sum = 0.0;
    let mut sd_sum = 0.0;
    for rep in 0..reps {
        let panel = simulate_panel(&truth, &mut rng_stream(25, rep));
        let r = test_direction(&panel, Direction::DtoY, &FocusConfig::default(), FocusedEstimator::FocusedIvw).unwrap();
        sum += r.estimate.unwrap();
        sd_sum += r.null_sd.unwrap();
    }
    let mean = sum / reps as f64;
    let mean_sd = sd_sum / reps as f64;
    assert!(mean.abs() < 4.0 * mean_sd / (reps as f64).sqrt(), "{mean}");
}

#[test]
fn empty_focused_set_rejects_with_flag() {
    let panel = Panel::new(vec![
        SnpRecord::new("a", 0.05, 0.01, 0.05, 0.01),
        SnpRecord::new("b", 0.001, 0.01, 0.0, 0.01),
    ])
    .unwrap();
    let r = test_direction(&panel, Direction::DtoY, &cfg(1.5, 2.0), FocusedEstimator::FocusedIvw).unwrap();
    assert!(r.reject && r.empty_set_reject);
    assert_eq!(r.p_value, 0.0);
    assert_eq!(r.n_focused, 0);
    assert!(r.estimate.is_none());
    let m = test_direction(&panel, Direction::DtoY, &cfg(1.5, 2.0), FocusedEstimator::FocusedMedian).unwrap();
    assert!(m.empty_set_reject);
}

#[test]
fn median_test_is_reproducible_for_a_seed() {
    let panel = common::random_panel(&mut common::rng(26), 30);
    let c = cfg(1.5, 2.0).with_seed(99);
    let a = test_direction(&panel, Direction::DtoY, &c, FocusedEstimator::FocusedMedian).unwrap();
    let b = test_direction(&panel, Direction::DtoY, &c, FocusedEstimator::FocusedMedian).unwrap();
    assert_eq!(a, b);
    let set = focused_set(&panel, Direction::DtoY, 1.5, 2.0);
    let ratios = focusing::ratios(&panel, &set, Direction::DtoY);
    assert_eq!(a.estimate.unwrap(), common::sort_median(&ratios));
}
