//! Conventional "overall" comparators computed on the relevant set
//! `S = {j : |b_exp| >= tau_s se_exp}`: IVW, simple median and MR-Egger.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::focusing::{self, FocusConfig};
use crate::panel::Panel;
use crate::stats;
use crate::truncnorm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkMethod {
    OverallIvw,
    MrMedian,
    MrEgger,
}

impl fmt::Display for BenchmarkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchmarkMethod::OverallIvw => "overall-ivw",
            BenchmarkMethod::MrMedian => "mr-median",
            BenchmarkMethod::MrEgger => "mr-egger",
        })
    }
}

impl FromStr for BenchmarkMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "overall-ivw" => Ok(BenchmarkMethod::OverallIvw),
            "mr-median" => Ok(BenchmarkMethod::MrMedian),
            "mr-egger" => Ok(BenchmarkMethod::MrEgger),
            other => Err(format!("unknown benchmark method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub method: BenchmarkMethod,
    pub direction: Direction,
    pub tau_s: f64,
    pub alpha: f64,
    pub n_relevant: usize,
    pub relevant_ids: Vec<String>,
    pub estimate: f64,
    pub se: f64,
    pub z_score: Option<f64>,
    pub p_value: f64,
    pub reject: bool,
    /// MR-Egger only.
    pub intercept: Option<f64>,
    pub intercept_se: Option<f64>,
}

fn relevant_nonzero(panel: &Panel, direction: Direction, tau_s: f64) -> Result<Vec<usize>> {
    let set: Vec<usize> = focusing::relevant_set(panel, direction, tau_s)
        .into_iter()
        .filter(|&j| panel.oriented(j, direction).beta_exp != 0.0)
        .collect();
    if set.is_empty() {
        return Err(Error::EmptyRelevantSet);
    }
    Ok(set)
}

// z and p for an estimate with standard error se; se = 0 means the estimate is exact
fn wald(estimate: f64, se: f64) -> (Option<f64>, f64) {
    if se > 0.0 {
        let z = estimate / se;
        (Some(z), truncnorm::two_sided_p(z))
    } else if estimate == 0.0 {
        (None, 1.0)
    } else {
        (None, 0.0)
    }
}

fn report(
    method: BenchmarkMethod,
    panel: &Panel,
    direction: Direction,
    cfg: &FocusConfig,
    tau_s: f64,
    set: &[usize],
    estimate: f64,
    se: f64,
) -> BenchmarkReport {
    let (z_score, p_value) = wald(estimate, se);
    BenchmarkReport {
        method,
        direction,
        tau_s,
        alpha: cfg.alpha,
        n_relevant: set.len(),
        relevant_ids: panel.ids(set),
        estimate,
        se,
        z_score,
        p_value,
        reject: p_value <= cfg.alpha,
        intercept: None,
        intercept_se: None,
    }
}

/// IVW over the whole relevant set; the null SD uses the untruncated variance 1.
pub fn overall_ivw(panel: &Panel, direction: Direction, cfg: &FocusConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let tau_s = cfg.tau_s.resolve(panel.len())?;
    let set = relevant_nonzero(panel, direction, tau_s)?;
    let fit = focusing::focused_ivw(panel, &set, direction)?;
    let se = focusing::null_sd_ivw(fit.weight_sum, f64::INFINITY)?;
    Ok(report(
        BenchmarkMethod::OverallIvw,
        panel,
        direction,
        cfg,
        tau_s,
        &set,
        fit.estimate,
        se,
    ))
}

/// Simple median of ratio estimates; SE is the SD of `cfg.bootstrap_reps`
/// SNP-bootstrap medians.
pub fn mr_median(panel: &Panel, direction: Direction, cfg: &FocusConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let tau_s = cfg.tau_s.resolve(panel.len())?;
    let set = relevant_nonzero(panel, direction, tau_s)?;
    let ratios = focusing::ratios(panel, &set, direction);
    let estimate = stats::median(&ratios).expect("nonempty");
    // stream ids 0/1 are used by the focused median
    let stream = match direction {
        Direction::DtoY => 2,
        Direction::YtoD => 3,
    };
    let mut rng = stats::rng_stream(cfg.seed, stream);
    let se = stats::sample_sd(&stats::bootstrap_medians(&ratios, cfg.bootstrap_reps, &mut rng));
    Ok(report(
        BenchmarkMethod::MrMedian,
        panel,
        direction,
        cfg,
        tau_s,
        &set,
        estimate,
        se,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EggerFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub intercept_se: f64,
}

/// Weighted regression of `y` on `x` with intercept and weights `w`, with the
/// classical residual-variance standard errors.
pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<EggerFit> {
    let n = x.len();
    if n < 3 {
        return Err(Error::RankDeficient(format!(
            "intercept regression needs at least 3 SNPs, got {n}"
        )));
    }
    let (mut sw, mut swx, mut swy, mut swxx) = (0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sw += wi;
        swx += wi * xi;
        swy += wi * yi;
        swxx += wi * xi * xi;
    }
    // centered form keeps the determinant accurate
    let xbar = swx / sw;
    let ybar = swy / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (xi - xbar) * (xi - xbar);
        sxy += wi * (xi - xbar) * (yi - ybar);
    }
    if !(sxx > 1e-14 * swxx.max(f64::MIN_POSITIVE)) {
        return Err(Error::RankDeficient(
            "all oriented exposure associations are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&xi, &yi), &wi)| wi * (yi - intercept - slope * xi).powi(2))
        .sum();
    let sigma2 = rss / (n - 2) as f64;
    Ok(EggerFit {
        slope,
        slope_se: (sigma2 / sxx).sqrt(),
        intercept,
        intercept_se: (sigma2 * (1.0 / sw + xbar * xbar / sxx)).sqrt(),
    })
}

/// MR-Egger: SNPs are oriented so the exposure association is nonnegative,
/// then the outcome association is regressed on it with weights `se_out^-2`.
pub fn mr_egger(panel: &Panel, direction: Direction, cfg: &FocusConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let tau_s = cfg.tau_s.resolve(panel.len())?;
    let set = relevant_nonzero(panel, direction, tau_s)?;
    let mut x = Vec::with_capacity(set.len());
    let mut y = Vec::with_capacity(set.len());
    let mut w = Vec::with_capacity(set.len());
    for &j in &set {
        let s = panel.oriented(j, direction);
        let sign = if s.beta_exp < 0.0 { -1.0 } else { 1.0 };
        x.push(sign * s.beta_exp);
        y.push(sign * s.beta_out);
        w.push(1.0 / (s.se_out * s.se_out));
    }
    let fit = weighted_line_fit(&x, &y, &w)?;
    let mut r = report(
        BenchmarkMethod::MrEgger,
        panel,
        direction,
        cfg,
        tau_s,
        &set,
        fit.slope,
        fit.slope_se,
    );
    r.intercept = Some(fit.intercept);
    r.intercept_se = Some(fit.intercept_se);
    Ok(r)
}

pub fn run_benchmark(
    method: BenchmarkMethod,
    panel: &Panel,
    direction: Direction,
    cfg: &FocusConfig,
) -> Result<BenchmarkReport> {
    match method {
        BenchmarkMethod::OverallIvw => overall_ivw(panel, direction, cfg),
        BenchmarkMethod::MrMedian => mr_median(panel, direction, cfg),
        BenchmarkMethod::MrEgger => mr_egger(panel, direction, cfg),
    }
}
