mod common;

use focusmr::model::{
    self, diagnose_identification, direct_effects, observationally_equivalent_truth, reduced_form,
    IvClass, DEFAULT_ZERO_TOL,
};
use focusmr::{Direction, TruthConfig};

const TRUTHS: u64 = 1000;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn reduced_form_round_trips() {
    let mut rng = common::rng(1);
    for _ in 0..TRUTHS {
        let t = common::random_truth(&mut rng);
        let (pi_d, pi_y) = direct_effects(&reduced_form(&t), t.beta_dy, t.beta_yd);
        for j in 0..t.len() {
            assert!((pi_d[j] - t.pi_d[j]).abs() < 1e-12);
            assert!((pi_y[j] - t.pi_y[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn valid_instruments_recover_the_causal_effect() {
    let mut rng = common::rng(2);
    let mut checked = 0;
    for _ in 0..TRUTHS {
        let t = common::random_truth(&mut rng);
        let rf = reduced_form(&t);
        for (j, class) in t.classes(DEFAULT_ZERO_TOL).into_iter().enumerate() {
            match class {
                IvClass::ValidDtoY => {
                    assert!(rel_close(rf.gamma_y[j] / rf.gamma_d[j], t.beta_dy, 1e-12));
                    checked += 1;
                }
                IvClass::ValidYtoD => {
                    assert!(rel_close(rf.gamma_d[j] / rf.gamma_y[j], t.beta_yd, 1e-12));
                    checked += 1;
                }
                _ => {}
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn no_rule_identifies_both_directions() {
    let mut rng = common::rng(3);
    let (mut eligible, mut majority_seen, mut plurality_seen) = (0, 0, 0);
    for _ in 0..TRUTHS {
        let t = common::random_truth(&mut rng);
        let report = diagnose_identification(&t, DEFAULT_ZERO_TOL).unwrap();
        if report.counts.valid_dy == 0 || report.counts.valid_yd == 0 {
            continue;
        }
        eligible += 1;
        let (dy, yd) = (&report.dy, &report.yd);
        assert!(!(dy.valid_rule == Some(true) && yd.valid_rule == Some(true)));
        assert!(!(dy.majority_rule == Some(true) && yd.majority_rule == Some(true)));
        assert!(!(dy.plurality_rule == Some(true) && yd.plurality_rule == Some(true)));
        majority_seen += (dy.majority_rule == Some(true) || yd.majority_rule == Some(true)) as usize;
        plurality_seen += (dy.plurality_rule == Some(true) || yd.plurality_rule == Some(true)) as usize;
    }
    assert!(eligible > 500, "{eligible}");
    assert!(majority_seen > 50 && plurality_seen > majority_seen);
}

#[test]
fn critical_value_zeroes_inside_inner_product() {
    let mut rng = common::rng(4);
    let mut checked = 0;
    for _ in 0..TRUTHS {
        let t = common::random_truth(&mut rng);
        for dir in Direction::BOTH {
            let report = diagnose_identification(&t, DEFAULT_ZERO_TOL).unwrap();
            let Some(c) = report.rules(dir).inside_critical_value else {
                continue;
            };
            let (beta_dy, beta_yd) = match dir {
                Direction::DtoY => (t.beta_dy, c),
                Direction::YtoD => (c, t.beta_yd),
            };
            if (beta_dy * beta_yd - 1.0).abs() < 1e-3 {
                continue;
            }
            let at = TruthConfig { beta_dy, beta_yd, ..t.clone() };
            let ip = model::inside_inner_product(&at, dir);
            assert!(ip.abs() < 1e-10, "{ip}");
            let again = diagnose_identification(&at, DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(again.rules(dir).inside, Some(true));
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn role_swapped_truth_is_indistinguishable() {
    let mut rng = common::rng(5);
    let mut checked = 0;
    for _ in 0..TRUTHS {
        let t = common::random_truth(&mut rng);
        let Ok(twin) = observationally_equivalent_truth(&t) else {
            continue;
        };
        let (a, b) = (reduced_form(&t), reduced_form(&twin));
        for j in 0..t.len() {
            assert!(rel_close(a.gamma_d[j], b.gamma_d[j], 1e-10));
            assert!(rel_close(a.gamma_y[j], b.gamma_y[j], 1e-10));
        }
        let (orig, swapped) = (t.classes(DEFAULT_ZERO_TOL), twin.classes(1e-12));
        for (c, s) in orig.iter().zip(&swapped) {
            match c {
                IvClass::ValidDtoY => assert_eq!(*s, IvClass::ValidYtoD),
                IvClass::ValidYtoD => assert_eq!(*s, IvClass::ValidDtoY),
                _ => {}
            }
        }
        checked += 1;
    }
    assert!(checked > 300);
}

#[test]
fn reduced_form_is_linear_in_direct_effects() {
    let mut rng = common::rng(6);
    for _ in 0..100 {
        let t = common::random_truth(&mut rng);
        let scaled = TruthConfig {
            pi_d: t.pi_d.iter().map(|v| 3.0 * v).collect(),
            pi_y: t.pi_y.iter().map(|v| 3.0 * v).collect(),
            ..t.clone()
        };
        let (a, b) = (reduced_form(&t), reduced_form(&scaled));
        for j in 0..t.len() {
            assert!((3.0 * a.gamma_d[j] - b.gamma_d[j]).abs() < 1e-12);
            assert!((3.0 * a.gamma_y[j] - b.gamma_y[j]).abs() < 1e-12);
        }
    }
}
