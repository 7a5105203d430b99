//! Standard normal and unit-variance truncated normal functions.
//!
//! Everything downstream of focused-set selection needs the first two moments
//! of `z_[a,b](mu)`, a `N(mu, 1)` variable conditioned to lie in `[a, b]`.
//! The density is `phi(x - mu) / (Phi(b - mu) - Phi(a - mu))` on `[a, b]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation masses below this are treated as degenerate.
pub const MIN_TRUNCATION_MASS: f64 = 1e-300;

/// `1 / sqrt(2 pi)`
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn std_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)`, accurate far into the right tail.
pub fn std_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Two-sided normal p-value `2 (1 - Phi(|z|))`.
pub fn two_sided_p(z: f64) -> f64 {
    (2.0 * std_sf(z.abs())).min(1.0)
}

/// Inverse of [`std_cdf`].
///
/// Acklam's rational approximation gives ~1e-9 relative accuracy; two Halley
/// steps on `Phi` bring it to machine precision. The refinement works on the
/// smaller of the two tails so `p` close to 1 keeps its accuracy.
pub fn std_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile probability must lie in (0, 1), got {p}"
        )));
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

// p <= 0.5
fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam(p);
    for _ in 0..2 {
        let err = std_cdf(x) - p;
        let u = err * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// A unit-variance normal with location `mu`, truncated to `[lower, upper]`.
/// Either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncSpec {
    pub lower: f64,
    pub upper: f64,
    pub mu: f64,
}

impl TruncSpec {
    pub fn new(lower: f64, upper: f64, mu: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || !mu.is_finite() {
            return Err(Error::InvalidArgument(
                "truncation bounds and location must not be NaN".into(),
            ));
        }
        if lower >= upper {
            return Err(Error::InvalidArgument(format!(
                "truncation requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper, mu })
    }

    /// `[-tau, tau]` around `mu`.
    pub fn symmetric(tau: f64, mu: f64) -> Result<Self> {
        Self::new(-tau, tau, mu)
    }

    /// Probability that the untruncated variable falls in the interval.
    pub fn mass(&self) -> f64 {
        let (a, b) = self.standardized();
        if a > 0.0 {
            // both bounds in the right tail
            std_sf(a) - std_sf(b)
        } else {
            std_cdf(b) - std_cdf(a)
        }
    }

    fn standardized(&self) -> (f64, f64) {
        (self.lower - self.mu, self.upper - self.mu)
    }

    fn checked_mass(&self) -> Result<f64> {
        let mass = self.mass();
        if !(mass >= MIN_TRUNCATION_MASS) {
            return Err(Error::DegenerateTruncation {
                lower: self.lower,
                upper: self.upper,
                mu: self.mu,
                mass,
            });
        }
        Ok(mass)
    }

    pub fn mean(&self) -> Result<f64> {
        truncnorm_mean(self)
    }

    pub fn variance(&self) -> Result<f64> {
        truncnorm_var(self)
    }
}

// x * phi(x), zero at the infinite ends
fn x_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        x * std_pdf(x)
    }
}

pub fn truncnorm_mean(spec: &TruncSpec) -> Result<f64> {
    let mass = spec.checked_mass()?;
    let (a, b) = spec.standardized();
    Ok(spec.mu + (std_pdf(a) - std_pdf(b)) / mass)
}

/// Second central moment of `z_[a,b](mu)`.
///
/// For `mu = 0` and bounds `-tau, tau` this is `1 - 2 tau phi(tau) / (Phi(tau) - Phi(-tau))`.
pub fn truncnorm_var(spec: &TruncSpec) -> Result<f64> {
    let mass = spec.checked_mass()?;
    let (a, b) = spec.standardized();
    let shift = (std_pdf(a) - std_pdf(b)) / mass;
    let var = 1.0 + (x_pdf(a) - x_pdf(b)) / mass - shift * shift;
    // cancellation in the far tails can leave a tiny negative or >1 residue
    Ok(var.clamp(f64::MIN_POSITIVE, 1.0))
}

/// `var(z_[-tau, tau])`, the null variance factor of the focused IVW statistic.
/// `tau = +inf` gives 1.
pub fn symmetric_null_variance(tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "truncation half-width must be positive, got {tau}"
        )));
    }
    truncnorm_var(&TruncSpec::symmetric(tau, 0.0)?)
}
