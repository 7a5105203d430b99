//! Focused-set selection and the focused IVW / Median tests.
//!
//! To test `H0: beta_dy = 0`, keep only SNPs whose outcome association is small
//! relative to its standard error (`|b_Y| <= tau_f se_Y`) and whose exposure
//! association is strong (`|b_D| >= tau_s se_D`). Under the null the surviving
//! outcome estimates are pure noise truncated to `[-tau_f, tau_f]` standard
//! errors, so the focused IVW estimate is centred at zero with variance
//! `var(z_[-tau_f, tau_f]) / sum(w)`. The reverse direction runs the same code
//! on the role-swapped panel.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::model::{IvClass, TruthConfig, DEFAULT_ZERO_TOL};
use crate::panel::Panel;
use crate::stats;
use crate::truncnorm::{self, TruncSpec};

pub const DEFAULT_TAU_F: f64 = 1.5;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_BOOTSTRAP_REPS: usize = 2000;

/// How the screening threshold `tau_s` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreeningThreshold {
    Explicit(f64),
    /// `Phi^{-1}(1 - 1/p)` for a panel of `p` SNPs.
    OneOverP,
}

impl ScreeningThreshold {
    pub fn resolve(&self, p: usize) -> Result<f64> {
        match *self {
            ScreeningThreshold::Explicit(tau) => {
                if tau >= 0.0 {
                    Ok(tau)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "screening threshold must be nonnegative, got {tau}"
                    )))
                }
            }
            // Phi^{-1}(0) = -inf screens nothing, same as zero
            ScreeningThreshold::OneOverP if p <= 1 => Ok(0.0),
            ScreeningThreshold::OneOverP => truncnorm::std_quantile(1.0 - 1.0 / p as f64),
        }
    }
}

impl FromStr for ScreeningThreshold {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(ScreeningThreshold::OneOverP);
        }
        s.parse::<f64>()
            .map(ScreeningThreshold::Explicit)
            .map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusConfig {
    pub tau_f: f64,
    pub tau_s: ScreeningThreshold,
    pub alpha: f64,
    /// Resamples for bootstrap-based median inference.
    pub bootstrap_reps: usize,
    pub seed: u64,
}

impl Default for FocusConfig {
    fn default() -> Self {
        Self {
            tau_f: DEFAULT_TAU_F,
            tau_s: ScreeningThreshold::OneOverP,
            alpha: DEFAULT_ALPHA,
            bootstrap_reps: DEFAULT_BOOTSTRAP_REPS,
            seed: 0,
        }
    }
}

impl FocusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_f > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tau_f must be positive, got {}",
                self.tau_f
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.bootstrap_reps == 0 {
            return Err(Error::InvalidArgument("bootstrap_reps must be positive".into()));
        }
        if let ScreeningThreshold::Explicit(t) = self.tau_s {
            if !(t >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tau_s must be nonnegative, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_tau_f(mut self, tau_f: f64) -> Self {
        self.tau_f = tau_f;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FocusedEstimator {
    FocusedIvw,
    FocusedMedian,
}

/// Where a report's null standard deviation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullInference {
    /// Truncated-normal limit of the focused IVW statistic.
    TruncatedNormal,
    /// Nonparametric SNP bootstrap of the median within the focused set.
    Bootstrap,
    /// Bootstrap spread was zero; the IVW null SD scaled by `sqrt(pi / 2)` is used.
    BootstrapFallback,
    /// Focused set was empty; nothing was estimated.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub direction: Direction,
    pub estimator: FocusedEstimator,
    pub inference: NullInference,
    pub tau_f: f64,
    pub tau_s: f64,
    pub alpha: f64,
    pub n_focused: usize,
    pub focused_ids: Vec<String>,
    /// Focused SNPs with a zero exposure estimate, left out of the ratios.
    pub dropped_zero_exposure: usize,
    pub estimate: Option<f64>,
    pub null_sd: Option<f64>,
    pub z_score: Option<f64>,
    pub p_value: f64,
    pub reject: bool,
    /// Rejected because the focused set was empty; `p_value` is then 0.
    pub empty_set_reject: bool,
    pub weight_sum: f64,
    pub max_weight_share: Option<f64>,
}

/// Indices `j` with `|b_out| <= tau_f se_out` and `|b_exp| >= tau_s se_exp`.
pub fn focused_set(panel: &Panel, direction: Direction, tau_f: f64, tau_s: f64) -> Vec<usize> {
    (0..panel.len())
        .filter(|&j| {
            let s = panel.oriented(j, direction);
            s.beta_out.abs() <= s.se_out * tau_f && s.beta_exp.abs() >= s.se_exp * tau_s
        })
        .collect()
}

/// Relevant SNPs for the exposure of `direction`: the focused set with `tau_f = inf`.
pub fn relevant_set(panel: &Panel, direction: Direction, tau_s: f64) -> Vec<usize> {
    focused_set(panel, direction, f64::INFINITY, tau_s)
}

fn require_usable(panel: &Panel, set: &[usize], direction: Direction) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyFocusedSet);
    }
    if let Some(&j) = set
        .iter()
        .find(|&&j| panel.oriented(j, direction).beta_exp == 0.0)
    {
        return Err(Error::ZeroDenominator(panel.get(j).id.clone()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvwFit {
    pub estimate: f64,
    pub weight_sum: f64,
    pub max_weight: f64,
}

/// Inverse-variance weighted ratio estimate over `set`,
/// `sum(w_j b_out_j / b_exp_j) / sum(w_j)` with `w_j = b_exp_j^2 / se_out_j^2`.
pub fn focused_ivw(panel: &Panel, set: &[usize], direction: Direction) -> Result<IvwFit> {
    require_usable(panel, set, direction)?;
    let (mut num, mut den, mut max_weight) = (0.0, 0.0, 0.0_f64);
    for &j in set {
        let s = panel.oriented(j, direction);
        let inv_var = 1.0 / (s.se_out * s.se_out);
        num += s.beta_exp * s.beta_out * inv_var;
        let w = s.beta_exp * s.beta_exp * inv_var;
        den += w;
        max_weight = max_weight.max(w);
    }
    Ok(IvwFit {
        estimate: num / den,
        weight_sum: den,
        max_weight,
    })
}

pub fn ratios(panel: &Panel, set: &[usize], direction: Direction) -> Vec<f64> {
    set.iter()
        .map(|&j| panel.oriented(j, direction).ratio())
        .collect()
}

pub fn focused_median(panel: &Panel, set: &[usize], direction: Direction) -> Result<f64> {
    require_usable(panel, set, direction)?;
    Ok(stats::median(&ratios(panel, set, direction)).expect("nonempty set"))
}

/// `sqrt(var(z_[-tau_f, tau_f]) / weight_sum)`
pub fn null_sd_ivw(weight_sum: f64, tau_f: f64) -> Result<f64> {
    if !(weight_sum > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "weight sum must be positive, got {weight_sum}"
        )));
    }
    Ok((truncnorm::symmetric_null_variance(tau_f)? / weight_sum).sqrt())
}

/// Runs the focused test of `H0: no effect in `direction``.
pub fn test_direction(
    panel: &Panel,
    direction: Direction,
    cfg: &FocusConfig,
    estimator: FocusedEstimator,
) -> Result<TestReport> {
    cfg.validate()?;
    let tau_s = cfg.tau_s.resolve(panel.len())?;
    let selected = focused_set(panel, direction, cfg.tau_f, tau_s);
    let (usable, zero): (Vec<usize>, Vec<usize>) = selected
        .iter()
        .partition(|&&j| panel.oriented(j, direction).beta_exp != 0.0);

    let mut report = TestReport {
        direction,
        estimator,
        inference: NullInference::None,
        tau_f: cfg.tau_f,
        tau_s,
        alpha: cfg.alpha,
        n_focused: selected.len(),
        focused_ids: panel.ids(&selected),
        dropped_zero_exposure: zero.len(),
        estimate: None,
        null_sd: None,
        z_score: None,
        p_value: 0.0,
        reject: true,
        empty_set_reject: true,
        weight_sum: 0.0,
        max_weight_share: None,
    };
    if usable.is_empty() {
        return Ok(report);
    }

    let ivw = focused_ivw(panel, &usable, direction)?;
    let ivw_sd = null_sd_ivw(ivw.weight_sum, cfg.tau_f)?;
    let (estimate, null_sd, inference) = match estimator {
        FocusedEstimator::FocusedIvw => (ivw.estimate, ivw_sd, NullInference::TruncatedNormal),
        FocusedEstimator::FocusedMedian => {
            let r = ratios(panel, &usable, direction);
            let est = stats::median(&r).expect("nonempty");
            let mut rng = stats::rng_stream(cfg.seed, direction_stream(direction));
            let sd = stats::percentile_sd(&stats::bootstrap_medians(
                &r,
                cfg.bootstrap_reps,
                &mut rng,
            ));
            if sd > 0.0 {
                (est, sd, NullInference::Bootstrap)
            } else {
                (
                    est,
                    ivw_sd * std::f64::consts::FRAC_PI_2.sqrt(),
                    NullInference::BootstrapFallback,
                )
            }
        }
    };
    let z = estimate / null_sd;
    let p_value = truncnorm::two_sided_p(z);

    report.inference = inference;
    report.estimate = Some(estimate);
    report.null_sd = Some(null_sd);
    report.z_score = Some(z);
    report.p_value = p_value;
    report.reject = p_value <= cfg.alpha;
    report.empty_set_reject = false;
    report.weight_sum = ivw.weight_sum;
    report.max_weight_share = Some(ivw.max_weight / ivw.weight_sum);
    Ok(report)
}

fn direction_stream(direction: Direction) -> u64 {
    match direction {
        Direction::DtoY => 0,
        Direction::YtoD => 1,
    }
}

/// Bonferroni combination of the two directional tests for `H0: beta_dy = beta_yd = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointReport {
    pub alpha: f64,
    /// `min(1, 2 min(p_dy, p_yd))`
    pub p_value: f64,
    pub reject: bool,
    pub dy: TestReport,
    pub yd: TestReport,
}

/// Each direction is tested at `alpha / 2`; the joint null is rejected when
/// either direction rejects.
pub fn test_joint_null(
    panel: &Panel,
    cfg: &FocusConfig,
    estimator: FocusedEstimator,
) -> Result<JointReport> {
    cfg.validate()?;
    let half = FocusConfig {
        alpha: cfg.alpha / 2.0,
        ..cfg.clone()
    };
    let dy = test_direction(panel, Direction::DtoY, &half, estimator)?;
    let yd = test_direction(panel, Direction::YtoD, &half, estimator)?;
    Ok(JointReport {
        alpha: cfg.alpha,
        p_value: (2.0 * dy.p_value.min(yd.p_value)).min(1.0),
        reject: dy.reject || yd.reject,
        dy,
        yd,
    })
}

/// Large-sample distribution of the focused IVW estimate under an alternative,
/// and the implied rejection probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerForecast {
    pub mu_alt: f64,
    pub sigma_alt: f64,
    /// Half-width of the rejection region, `q_{1-alpha/2}` null SDs.
    pub threshold: f64,
    pub predicted_power: f64,
}

/// `mus[k]` is the outcome signal-to-noise ratio `gamma_out / se_out` of SNP `set[k]`.
pub fn power_forecast(
    panel: &Panel,
    direction: Direction,
    set: &[usize],
    mus: &[f64],
    cfg: &FocusConfig,
) -> Result<PowerForecast> {
    cfg.validate()?;
    require_usable(panel, set, direction)?;
    if mus.len() != set.len() {
        return Err(Error::InvalidArgument(format!(
            "{} signal-to-noise ratios for {} focused SNPs",
            mus.len(),
            set.len()
        )));
    }
    let (mut weight_sum, mut mean_num, mut var_num) = (0.0, 0.0, 0.0);
    for (&j, &mu) in set.iter().zip(mus) {
        let s = panel.oriented(j, direction);
        let w = s.weight();
        let trunc = TruncSpec::symmetric(cfg.tau_f, mu)?;
        weight_sum += w;
        mean_num += w / s.beta_exp * s.se_out * trunc.mean()?;
        var_num += w * trunc.variance()?;
    }
    let mu_alt = mean_num / weight_sum;
    let sigma_alt = var_num.sqrt() / weight_sum;
    let threshold =
        truncnorm::std_quantile(1.0 - cfg.alpha / 2.0)? * null_sd_ivw(weight_sum, cfg.tau_f)?;
    let predicted_power = truncnorm::std_cdf((-threshold - mu_alt) / sigma_alt)
        + truncnorm::std_sf((threshold - mu_alt) / sigma_alt);
    Ok(PowerForecast {
        mu_alt,
        sigma_alt,
        threshold,
        predicted_power: predicted_power.min(1.0),
    })
}

/// Whether every SNP with a direct effect on the outcome of `direction` has
/// `|pi_out / se_out| >= c1 tau_f sqrt(ln p)`. Vacuously true when there are none.
pub fn check_separation(truth: &TruthConfig, direction: Direction, tau_f: f64, c1: f64) -> bool {
    let p = truth.len() as f64;
    let bound = c1 * tau_f * p.ln().sqrt();
    let (pi_out, se_out) = match direction {
        Direction::DtoY => (&truth.pi_y, &truth.se_y),
        Direction::YtoD => (&truth.pi_d, &truth.se_d),
    };
    truth
        .classes(DEFAULT_ZERO_TOL)
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            matches!(
                (c, direction),
                (IvClass::ValidYtoD | IvClass::Pleiotropic, Direction::DtoY)
                    | (IvClass::ValidDtoY | IvClass::Pleiotropic, Direction::YtoD)
            )
        })
        .all(|(j, _)| (pi_out[j] / se_out[j]).abs() >= bound)
}

/// Per-SNP view of one direction, for export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnpMembership {
    pub id: String,
    pub exposure_z: f64,
    pub outcome_z: f64,
    pub relevant: bool,
    pub focused: bool,
    pub ratio: Option<f64>,
    pub weight: f64,
}

pub fn membership(panel: &Panel, direction: Direction, tau_f: f64, tau_s: f64) -> Vec<SnpMembership> {
    panel
        .records()
        .iter()
        .map(|r| {
            let s = r.oriented(direction);
            let relevant = s.beta_exp.abs() >= s.se_exp * tau_s;
            SnpMembership {
                id: r.id.clone(),
                exposure_z: s.beta_exp / s.se_exp,
                outcome_z: s.beta_out / s.se_out,
                relevant,
                focused: relevant && s.beta_out.abs() <= s.se_out * tau_f,
                ratio: (s.beta_exp != 0.0).then(|| s.ratio()),
                weight: s.weight(),
            }
        })
        .collect()
}

/// Ratio estimates in `set` with their normalized IVW weights `w_j / sum(w)`.
/// The weighted mean of the ratios is the IVW estimate.
pub fn weighted_ratios(panel: &Panel, set: &[usize], direction: Direction) -> Vec<(String, f64, f64)> {
    let usable: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&j| panel.oriented(j, direction).beta_exp != 0.0)
        .collect();
    let total: f64 = usable
        .iter()
        .map(|&j| panel.oriented(j, direction).weight())
        .sum();
    usable
        .iter()
        .map(|&j| {
            let s = panel.oriented(j, direction);
            (panel.get(j).id.clone(), s.ratio(), s.weight() / total)
        })
        .collect()
}
