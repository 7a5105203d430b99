//! Small order-statistic and resampling helpers shared by the estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent, schedule-free RNG stream `stream` under a master seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sample median; the mean of the two central values for even sizes.
/// `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut buf = values.to_vec();
    median_in_place(&mut buf)
}

fn median_in_place(buf: &mut [f64]) -> Option<f64> {
    let n = buf.len();
    if n == 0 {
        return None;
    }
    let (left, mid, _) = buf.select_nth_unstable_by(n / 2, f64::total_cmp);
    let upper = *mid;
    if n % 2 == 1 {
        return Some(upper);
    }
    let lower = left.iter().copied().max_by(f64::total_cmp).expect("n >= 2");
    Some(0.5 * (lower + upper))
}

/// Medians of `reps` nonparametric bootstrap resamples of `values`.
pub fn bootstrap_medians<R: Rng + ?Sized>(values: &[f64], reps: usize, rng: &mut R) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf = vec![0.0; n];
    (0..reps)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..n)];
            }
            median_in_place(&mut buf).expect("nonempty resample")
        })
        .collect()
}

/// Linear-interpolation quantile of already sorted data.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Half the width of the central 68.27% interval; equals the SD for normal data.
pub fn percentile_sd(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    const LOWER: f64 = 0.158_655_253_931_457_05;
    0.5 * (sorted_quantile(&sorted, 1.0 - LOWER) - sorted_quantile(&sorted, LOWER))
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Pearson correlation; `None` if either vector is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
