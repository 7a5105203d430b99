//! Bi-directional structural model at the summary-statistic level.
//!
//! Direct SNP effects `pi_D`, `pi_Y` and the two causal effects determine the
//! marginal associations through
//!
//! ```text
//! gamma_Y = (pi_Y + pi_D * beta_dy) / (1 - beta_dy * beta_yd)
//! gamma_D = (pi_D + pi_Y * beta_yd) / (1 - beta_dy * beta_yd)
//! ```
//!
//! This module classifies SNPs by which direct effects are nonzero and checks,
//! from ground truth, which of the usual MR identification rules hold.

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};

/// Threshold below which a ground-truth effect counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTruth")]
pub struct TruthConfig {
    pub pi_d: Vec<f64>,
    pub pi_y: Vec<f64>,
    pub beta_dy: f64,
    pub beta_yd: f64,
    pub se_d: Vec<f64>,
    pub se_y: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTruth {
    pi_d: Vec<f64>,
    pi_y: Vec<f64>,
    beta_dy: f64,
    beta_yd: f64,
    se_d: Vec<f64>,
    se_y: Vec<f64>,
}

impl TryFrom<RawTruth> for TruthConfig {
    type Error = Error;

    fn try_from(raw: RawTruth) -> Result<Self> {
        TruthConfig::new(raw.pi_d, raw.pi_y, raw.beta_dy, raw.beta_yd, raw.se_d, raw.se_y)
    }
}

impl TruthConfig {
    pub fn new(
        pi_d: Vec<f64>,
        pi_y: Vec<f64>,
        beta_dy: f64,
        beta_yd: f64,
        se_d: Vec<f64>,
        se_y: Vec<f64>,
    ) -> Result<Self> {
        let p = pi_d.len();
        if p == 0 {
            return Err(Error::InvalidArgument("truth needs at least one SNP".into()));
        }
        if pi_y.len() != p || se_d.len() != p || se_y.len() != p {
            return Err(Error::InvalidArgument(format!(
                "truth vectors differ in length: pi_d={}, pi_y={}, se_d={}, se_y={}",
                p,
                pi_y.len(),
                se_d.len(),
                se_y.len()
            )));
        }
        if !beta_dy.is_finite() || !beta_yd.is_finite() {
            return Err(Error::InvalidArgument("causal effects must be finite".into()));
        }
        if beta_dy * beta_yd == 1.0 {
            return Err(Error::InvalidArgument(
                "beta_dy * beta_yd = 1 makes the system singular".into(),
            ));
        }
        if pi_d.iter().chain(&pi_y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("direct effects must be finite".into()));
        }
        if let Some(bad) = se_d.iter().chain(&se_y).find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "standard errors must be positive, got {bad}"
            )));
        }
        Ok(Self {
            pi_d,
            pi_y,
            beta_dy,
            beta_yd,
            se_d,
            se_y,
        })
    }

    pub fn len(&self) -> usize {
        self.pi_d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi_d.is_empty()
    }

    fn determinant(&self) -> f64 {
        1.0 - self.beta_dy * self.beta_yd
    }

    /// Role-swapped view: (exposure direct effects, outcome direct effects,
    /// forward causal effect, reverse causal effect).
    fn oriented(&self, direction: Direction) -> (&[f64], &[f64], f64, f64) {
        match direction {
            Direction::DtoY => (&self.pi_d, &self.pi_y, self.beta_dy, self.beta_yd),
            Direction::YtoD => (&self.pi_y, &self.pi_d, self.beta_yd, self.beta_dy),
        }
    }

    /// Labels of every SNP, in order.
    pub fn classes(&self, zero_tol: f64) -> Vec<IvClass> {
        self.pi_d
            .iter()
            .zip(&self.pi_y)
            .map(|(&d, &y)| classify_iv(d, y, zero_tol))
            .collect()
    }
}

/// Which direct effects a SNP carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IvClass {
    Null,
    /// Affects D only; a valid instrument for D -> Y.
    ValidDtoY,
    /// Affects Y only; a valid instrument for Y -> D.
    ValidYtoD,
    Pleiotropic,
}

impl IvClass {
    pub fn is_valid_for(self, direction: Direction) -> bool {
        matches!(
            (self, direction),
            (IvClass::ValidDtoY, Direction::DtoY) | (IvClass::ValidYtoD, Direction::YtoD)
        )
    }
}

pub fn classify_iv(pi_d: f64, pi_y: f64, zero_tol: f64) -> IvClass {
    match (pi_d.abs() > zero_tol, pi_y.abs() > zero_tol) {
        (false, false) => IvClass::Null,
        (true, false) => IvClass::ValidDtoY,
        (false, true) => IvClass::ValidYtoD,
        (true, true) => IvClass::Pleiotropic,
    }
}

/// Marginal SNP-trait associations implied by a truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub gamma_d: Vec<f64>,
    pub gamma_y: Vec<f64>,
}

impl ReducedForm {
    fn oriented(&self, direction: Direction) -> (&[f64], &[f64]) {
        match direction {
            Direction::DtoY => (&self.gamma_d, &self.gamma_y),
            Direction::YtoD => (&self.gamma_y, &self.gamma_d),
        }
    }
}

pub fn reduced_form(truth: &TruthConfig) -> ReducedForm {
    let det = truth.determinant();
    let (gamma_d, gamma_y) = truth
        .pi_d
        .iter()
        .zip(&truth.pi_y)
        .map(|(&d, &y)| {
            (
                (d + y * truth.beta_yd) / det,
                (y + d * truth.beta_dy) / det,
            )
        })
        .unzip();
    ReducedForm { gamma_d, gamma_y }
}

/// Inverts [`reduced_form`]: returns `(pi_d, pi_y)` for the given causal effects.
pub fn direct_effects(reduced: &ReducedForm, beta_dy: f64, beta_yd: f64) -> (Vec<f64>, Vec<f64>) {
    reduced
        .gamma_d
        .iter()
        .zip(&reduced.gamma_y)
        .map(|(&gd, &gy)| (gd - gy * beta_yd, gy - gd * beta_dy))
        .unzip()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IvCounts {
    pub null: usize,
    pub valid_dy: usize,
    pub valid_yd: usize,
    pub pleiotropic: usize,
}

impl IvCounts {
    pub fn from_classes(classes: &[IvClass]) -> Self {
        let mut counts = IvCounts::default();
        for class in classes {
            match class {
                IvClass::Null => counts.null += 1,
                IvClass::ValidDtoY => counts.valid_dy += 1,
                IvClass::ValidYtoD => counts.valid_yd += 1,
                IvClass::Pleiotropic => counts.pleiotropic += 1,
            }
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.null + self.valid_dy + self.valid_yd + self.pleiotropic
    }

    pub fn valid_for(&self, direction: Direction) -> usize {
        match direction {
            Direction::DtoY => self.valid_dy,
            Direction::YtoD => self.valid_yd,
        }
    }
}

/// Identification rules evaluated for one direction. `None` marks a rule that
/// is undefined for this truth (no relevant SNPs, or a constant direct-effect
/// vector for InSIDE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleChecks {
    pub direction: Direction,
    /// SNPs with a nonzero association with the exposure.
    pub relevant: usize,
    /// Valid instruments for this direction.
    pub valid_ivs: usize,
    pub valid_rule: Option<bool>,
    pub majority_rule: Option<bool>,
    pub plurality_rule: Option<bool>,
    pub inside: Option<bool>,
    /// Value of the reverse causal effect at which InSIDE holds exactly.
    pub inside_critical_value: Option<f64>,
    /// Centered inner product between exposure associations and outcome
    /// direct effects; zero exactly when InSIDE holds.
    pub inside_inner_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub p: usize,
    pub zero_tol: f64,
    pub beta_dy: f64,
    pub beta_yd: f64,
    pub counts: IvCounts,
    pub dy: RuleChecks,
    pub yd: RuleChecks,
}

impl DiagnosticsReport {
    pub fn rules(&self, direction: Direction) -> &RuleChecks {
        match direction {
            Direction::DtoY => &self.dy,
            Direction::YtoD => &self.yd,
        }
    }
}

pub fn diagnose_identification(truth: &TruthConfig, zero_tol: f64) -> Result<DiagnosticsReport> {
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zero tolerance must be nonnegative, got {zero_tol}"
        )));
    }
    let reduced = reduced_form(truth);
    let classes = truth.classes(zero_tol);
    Ok(DiagnosticsReport {
        p: truth.len(),
        zero_tol,
        beta_dy: truth.beta_dy,
        beta_yd: truth.beta_yd,
        counts: IvCounts::from_classes(&classes),
        dy: rule_checks(truth, &reduced, &classes, Direction::DtoY, zero_tol),
        yd: rule_checks(truth, &reduced, &classes, Direction::YtoD, zero_tol),
    })
}

fn rule_checks(
    truth: &TruthConfig,
    reduced: &ReducedForm,
    classes: &[IvClass],
    direction: Direction,
    zero_tol: f64,
) -> RuleChecks {
    let (pi_exp, pi_out, _, beta_rev) = truth.oriented(direction);
    let (gamma_exp, _) = reduced.oriented(direction);

    let relevant: Vec<usize> = (0..truth.len())
        .filter(|&j| gamma_exp[j].abs() > zero_tol)
        .collect();
    let valid: Vec<usize> = (0..truth.len())
        .filter(|&j| classes[j].is_valid_for(direction))
        .collect();

    let (valid_rule, majority_rule, plurality_rule) = if relevant.is_empty() {
        (None, None, None)
    } else {
        let valid_rule = !valid.is_empty() && valid == relevant;
        let valid_relevant = relevant
            .iter()
            .filter(|&&j| classes[j].is_valid_for(direction))
            .count();
        let majority_rule = 2 * valid_relevant > relevant.len();
        let ratios: Vec<f64> = relevant
            .iter()
            .map(|&j| {
                if pi_out[j].abs() <= zero_tol {
                    0.0
                } else {
                    pi_out[j] / gamma_exp[j]
                }
            })
            .collect();
        let plurality_rule = zero_is_strict_mode(&ratios, zero_tol);
        (Some(valid_rule), Some(majority_rule), Some(plurality_rule))
    };

    let critical = inside_critical_value(pi_exp, pi_out);
    let inside = critical.map(|c| (beta_rev - c).abs() <= zero_tol);

    RuleChecks {
        direction,
        relevant: relevant.len(),
        valid_ivs: valid.len(),
        valid_rule,
        majority_rule,
        plurality_rule,
        inside,
        inside_critical_value: critical,
        inside_inner_product: centered_dot(gamma_exp, pi_out),
    }
}

/// Reverse causal effect at which InSIDE holds for the direction whose
/// exposure has direct effects `pi_exp`.
fn inside_critical_value(pi_exp: &[f64], pi_out: &[f64]) -> Option<f64> {
    let norm = centered_dot(pi_out, pi_out);
    if norm == 0.0 {
        return None;
    }
    Some(-centered_dot(pi_out, pi_exp) / norm)
}

/// `(x - mean(x))^T (y - mean(y))`
pub fn centered_dot(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum()
}

/// InSIDE inner product for one direction, computed straight from the truth.
pub fn inside_inner_product(truth: &TruthConfig, direction: Direction) -> f64 {
    let reduced = reduced_form(truth);
    let (gamma_exp, _) = reduced.oriented(direction);
    let (_, pi_out, _, _) = truth.oriented(direction);
    centered_dot(gamma_exp, pi_out)
}

/// Groups sorted ratios whose neighbours differ by at most
/// `tol * max(1, |value|)` and reports whether the group holding zero is the
/// unique largest one.
fn zero_is_strict_mode(ratios: &[f64], tol: f64) -> bool {
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut groups: Vec<(usize, bool)> = Vec::new();
    let mut prev: Option<f64> = None;
    for &r in &sorted {
        let joins = prev.is_some_and(|p| (r - p).abs() <= tol * p.abs().max(1.0));
        if !joins {
            groups.push((0, false));
        }
        let group = groups.last_mut().expect("group pushed above");
        group.0 += 1;
        group.1 |= r == 0.0;
        prev = Some(r);
    }

    let Some(zero_size) = groups.iter().find(|g| g.1).map(|g| g.0) else {
        return false;
    };
    groups.iter().filter(|g| !g.1).all(|g| g.0 < zero_size)
}

/// Builds a second truth with the same reduced form but with the roles of the
/// two valid-IV sets exchanged: `beta_dy' = 1 / beta_yd`, `beta_yd' = 1 / beta_dy`.
///
/// The direct effects of the twin are `pi' = gamma B'`, so every SNP, not only
/// the valid ones, has identical marginal associations under both truths.
/// SNPs valid for D -> Y become valid for Y -> D and vice versa.
pub fn observationally_equivalent_truth(truth: &TruthConfig) -> Result<TruthConfig> {
    let counts = IvCounts::from_classes(&truth.classes(DEFAULT_ZERO_TOL));
    if counts.valid_dy == 0 || counts.valid_yd == 0 {
        return Err(Error::InvalidArgument(
            "both valid-instrument sets must be nonempty".into(),
        ));
    }
    if truth.beta_yd == 0.0 || truth.beta_dy == 0.0 {
        return Err(Error::InvalidArgument(
            "both causal effects must be nonzero for the role swap".into(),
        ));
    }
    let beta_dy = 1.0 / truth.beta_yd;
    let beta_yd = 1.0 / truth.beta_dy;
    let (pi_d, pi_y) = direct_effects(&reduced_form(truth), beta_dy, beta_yd);
    TruthConfig::new(
        pi_d,
        pi_y,
        beta_dy,
        beta_yd,
        truth.se_d.clone(),
        truth.se_y.clone(),
    )
}
