//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use focusmr::{Panel, SnpRecord, TruthConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    let m: f64 = rng.random_range(0.2..1.0) * scale;
    if rng.random::<bool>() {
        m
    } else {
        -m
    }
}

/// A truth with class probabilities that vary from draw to draw, so that
/// majorities and pluralities of either valid set actually occur.
pub fn random_truth<R: Rng>(rng: &mut R) -> TruthConfig {
    let p = rng.random_range(4..40);
    let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
    let total: f64 = w.iter().sum();
    let (mut pi_d, mut pi_y, mut se_d, mut se_y) = (vec![], vec![], vec![], vec![]);
    for _ in 0..p {
        let u = rng.random::<f64>() * total;
        let class = if u < w[0] {
            0
        } else if u < w[0] + w[1] {
            1
        } else if u < w[0] + w[1] + w[2] {
            2
        } else {
            3
        };
        let (d, y) = match class {
            0 => (0.0, 0.0),
            1 => (nonzero(rng, 0.1), 0.0),
            2 => (0.0, nonzero(rng, 0.1)),
            _ => (nonzero(rng, 0.1), nonzero(rng, 0.1)),
        };
        pi_d.push(d);
        pi_y.push(y);
        se_d.push(rng.random_range(0.005..0.02));
        se_y.push(rng.random_range(0.005..0.02));
    }
    let beta_dy = nonzero(rng, 0.8);
    let beta_yd = nonzero(rng, 0.8);
    TruthConfig::new(pi_d, pi_y, beta_dy, beta_yd, se_d, se_y).unwrap()
}

/// Panel with every SNP relevant for D -> Y at moderate thresholds.
pub fn random_panel<R: Rng>(rng: &mut R, p: usize) -> Panel {
    let records = (0..p)
        .map(|j| {
            let se_d = rng.random_range(0.005..0.03);
            let se_y = rng.random_range(0.005..0.03);
            let z_d = nonzero(rng, 1.0) * 8.0 + nonzero(rng, 1.0);
            let z_y: f64 = rng.random_range(-3.0..3.0);
            SnpRecord::new(format!("v{j}"), z_d * se_d, se_d, z_y * se_y, se_y)
        })
        .collect();
    Panel::new(records).unwrap()
}

/// Weighted least squares through the origin, `y ~ b x`, by the textbook
/// closed form on raw sums.
pub fn wls_origin(x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, b), c)| c * a * b).sum();
    let sxx: f64 = x.iter().zip(w).map(|(a, c)| c * a * a).sum();
    sxy / sxx
}

/// Weighted regression `y ~ a + b x` solved from the 2x2 normal equations by
/// Cramer's rule; returns (a, b, se_a, se_b) with residual variance RSS / (n - 2).
pub fn normal_equations(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64, f64) {
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        s0 += wi;
        s1 += wi * xi;
        s2 += wi * xi * xi;
        t0 += wi * yi;
        t1 += wi * xi * yi;
    }
    let det = s0 * s2 - s1 * s1;
    let a = (t0 * s2 - s1 * t1) / det;
    let b = (s0 * t1 - s1 * t0) / det;
    let rss: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&xi, &yi), &wi)| wi * (yi - a - b * xi).powi(2))
        .sum();
    let sigma2 = rss / (x.len() - 2) as f64;
    // inverse of [[s0, s1], [s1, s2]]
    (a, b, (sigma2 * s2 / det).sqrt(), (sigma2 * s0 / det).sqrt())
}

/// Median by full sort.
pub fn sort_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}
