//! Monte-Carlo harness for GWAS-seeded experiments.
//!
//! Each replication draws a ground truth from seed effect sizes (a SNP keeps
//! its seed effect on a trait with probability `(rank / p)^kappa`, where the
//! rank orders `|alpha| / se` ascending), samples summary statistics around the
//! implied marginal associations, and runs every configured method in both
//! directions. Replications use independent RNG streams keyed by their index,
//! so results do not depend on the thread schedule.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{self, BenchmarkMethod};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::focusing::{self, FocusConfig, FocusedEstimator};
use crate::model::{self, IvClass, IvCounts, TruthConfig, DEFAULT_ZERO_TOL};
use crate::panel::{Panel, SnpRecord};
use crate::stats;

/// Per-SNP effect sizes and standard errors from two seed GWASs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEffects {
    pub ids: Vec<String>,
    pub alpha_d: Vec<f64>,
    pub alpha_y: Vec<f64>,
    pub se_d: Vec<f64>,
    pub se_y: Vec<f64>,
}

impl SeedEffects {
    pub fn new(
        ids: Vec<String>,
        alpha_d: Vec<f64>,
        alpha_y: Vec<f64>,
        se_d: Vec<f64>,
        se_y: Vec<f64>,
    ) -> Result<Self> {
        let p = ids.len();
        if p == 0 {
            return Err(Error::InvalidArgument("seed needs at least one SNP".into()));
        }
        if alpha_d.len() != p || alpha_y.len() != p || se_d.len() != p || se_y.len() != p {
            return Err(Error::InvalidArgument("seed vectors differ in length".into()));
        }
        if se_d.iter().chain(&se_y).any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument("seed standard errors must be positive".into()));
        }
        if alpha_d.iter().chain(&alpha_y).any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("seed effects must be finite".into()));
        }
        Ok(Self {
            ids,
            alpha_d,
            alpha_y,
            se_d,
            se_y,
        })
    }

    pub fn p(&self) -> usize {
        self.ids.len()
    }
}

/// Shape of a synthetic seed. Standard errors follow `1 / sqrt(2 n f (1 - f))`
/// for a minor-allele frequency `f ~ U(0.05, 0.5)`; absolute z-scores come
/// from a two-component half-normal mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedProfile {
    pub n_d: f64,
    pub n_y: f64,
    pub large_fraction: f64,
    pub small_snr: f64,
    pub large_snr: f64,
    /// Probability that a SNP's two seed effects share a sign.
    pub sign_concordance: f64,
    /// When set, every absolute z-score is shifted up by this amount.
    pub min_snr: Option<f64>,
}

impl Default for SeedProfile {
    fn default() -> Self {
        Self {
            n_d: 5e5,
            n_y: 1e5,
            large_fraction: 0.25,
            small_snr: 2.0,
            large_snr: 8.0,
            sign_concordance: 0.7,
            min_snr: None,
        }
    }
}

impl SeedProfile {
    /// Profile whose seed effects all satisfy the screening separation
    /// `|alpha / se| >= c1 tau_f sqrt(ln p)`.
    pub fn separated(p: usize, tau_f: f64, c1: f64) -> Self {
        Self {
            min_snr: Some(c1 * tau_f * (p as f64).ln().sqrt()),
            ..Self::default()
        }
    }
}

pub fn synthetic_seed<R: Rng + ?Sized>(p: usize, rng: &mut R, profile: &SeedProfile) -> Result<SeedEffects> {
    if p < 10 {
        return Err(Error::InvalidArgument(format!(
            "synthetic seed needs p >= 10, got {p}"
        )));
    }
    let draw_abs_z = |rng: &mut R| {
        let scale = if rng.random::<f64>() < profile.large_fraction {
            profile.large_snr
        } else {
            profile.small_snr
        };
        let z: f64 = rng.sample::<f64, _>(StandardNormal).abs() * scale;
        z + profile.min_snr.unwrap_or(0.0)
    };
    let mut out = SeedEffects {
        ids: Vec::with_capacity(p),
        alpha_d: Vec::with_capacity(p),
        alpha_y: Vec::with_capacity(p),
        se_d: Vec::with_capacity(p),
        se_y: Vec::with_capacity(p),
    };
    for j in 0..p {
        let maf: f64 = rng.random_range(0.05..0.5);
        let het = 2.0 * maf * (1.0 - maf);
        let se_d = 1.0 / (profile.n_d * het).sqrt();
        let se_y = 1.0 / (profile.n_y * het).sqrt();
        let sign_d = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let sign_y = if rng.random::<f64>() < profile.sign_concordance {
            sign_d
        } else {
            -sign_d
        };
        let zd = draw_abs_z(rng);
        let zy = draw_abs_z(rng);
        out.ids.push(format!("snp{}", j + 1));
        out.alpha_d.push(sign_d * zd * se_d);
        out.alpha_y.push(sign_y * zy * se_y);
        out.se_d.push(se_d);
        out.se_y.push(se_y);
    }
    Ok(out)
}

/// `rank(|alpha_j| / se_j) / p`, rank 1 for the smallest, ties by input order.
pub fn rank_probabilities(alpha: &[f64], se: &[f64]) -> Vec<f64> {
    let p = alpha.len();
    let mut order: Vec<usize> = (0..p).collect();
    let snr: Vec<f64> = alpha.iter().zip(se).map(|(a, s)| a.abs() / s).collect();
    // stable sort keeps input order among ties
    order.sort_by(|&a, &b| snr[a].total_cmp(&snr[b]));
    let mut probs = vec![0.0; p];
    for (rank0, &j) in order.iter().enumerate() {
        probs[j] = (rank0 + 1) as f64 / p as f64;
    }
    probs
}

/// Keeps each seed effect with probability `(rank / p)^kappa`, independently per trait.
pub fn generate_truth<R: Rng + ?Sized>(
    seed: &SeedEffects,
    kappa: f64,
    beta_dy: f64,
    beta_yd: f64,
    rng: &mut R,
) -> Result<TruthConfig> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let keep_d = rank_probabilities(&seed.alpha_d, &seed.se_d);
    let keep_y = rank_probabilities(&seed.alpha_y, &seed.se_y);
    let mut pi_d = Vec::with_capacity(seed.p());
    let mut pi_y = Vec::with_capacity(seed.p());
    for j in 0..seed.p() {
        let d = rng.random::<f64>() < keep_d[j].powf(kappa);
        let y = rng.random::<f64>() < keep_y[j].powf(kappa);
        pi_d.push(if d { seed.alpha_d[j] } else { 0.0 });
        pi_y.push(if y { seed.alpha_y[j] } else { 0.0 });
    }
    TruthConfig::new(pi_d, pi_y, beta_dy, beta_yd, seed.se_d.clone(), seed.se_y.clone())
}

/// Draws `b_D ~ N(gamma_D, se_D^2)` and `b_Y ~ N(gamma_Y, se_Y^2)` independently.
pub fn simulate_panel<R: Rng + ?Sized>(truth: &TruthConfig, rng: &mut R) -> Panel {
    let rf = model::reduced_form(truth);
    let records = (0..truth.len())
        .map(|j| {
            let ed: f64 = rng.sample(StandardNormal);
            let ey: f64 = rng.sample(StandardNormal);
            SnpRecord::new(
                format!("snp{}", j + 1),
                rf.gamma_d[j] + truth.se_d[j] * ed,
                truth.se_d[j],
                rf.gamma_y[j] + truth.se_y[j] * ey,
                truth.se_y[j],
            )
        })
        .collect();
    Panel::new(records).expect("truth invariants make a valid panel")
}

/// One method as run by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Focused { estimator: FocusedEstimator, tau_f: f64 },
    Benchmark(BenchmarkMethod),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Focused { estimator, tau_f } => {
                let name = match estimator {
                    FocusedEstimator::FocusedIvw => "focused-ivw",
                    FocusedEstimator::FocusedMedian => "focused-median",
                };
                write!(f, "{name}:{tau_f}")
            }
            Method::Benchmark(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    /// `focused-ivw:1.5`, `focused-median:1.2`, `overall-ivw`, `mr-median`, `mr-egger`.
    /// A focused method without `:tau` uses 1.5.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (name, tau) = match s.split_once(':') {
            Some((n, t)) => (
                n,
                Some(t.parse::<f64>().map_err(|_| format!("bad tau_f in `{s}`"))?),
            ),
            None => (s, None),
        };
        let tau_f = tau.unwrap_or(focusing::DEFAULT_TAU_F);
        match name {
            "focused-ivw" | "ivw" => Ok(Method::Focused {
                estimator: FocusedEstimator::FocusedIvw,
                tau_f,
            }),
            "focused-median" | "median" => Ok(Method::Focused {
                estimator: FocusedEstimator::FocusedMedian,
                tau_f,
            }),
            other if tau.is_none() => other.parse().map(Method::Benchmark),
            _ => Err(format!("`{s}`: only focused methods take a tau_f")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kappa: f64,
    pub beta_dy: f64,
    pub beta_yd: f64,
    pub n_reps: usize,
    /// Shared settings; each focused method overrides `tau_f`.
    pub cfg: FocusConfig,
    pub methods: Vec<Method>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IvProportions {
    pub null: f64,
    pub valid_dy: f64,
    pub valid_yd: f64,
    pub pleiotropic: f64,
}

impl IvProportions {
    pub fn from_counts(c: &IvCounts) -> Self {
        let p = c.total() as f64;
        Self {
            null: c.null as f64 / p,
            valid_dy: c.valid_dy as f64 / p,
            valid_yd: c.valid_yd as f64 / p,
            pleiotropic: c.pleiotropic as f64 / p,
        }
    }

    pub fn sum(&self) -> f64 {
        self.null + self.valid_dy + self.valid_yd + self.pleiotropic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSummary {
    pub direction: Direction,
    pub rejection_rate: f64,
    /// Replications that produced a decision.
    pub completed: usize,
    pub errors: usize,
    pub empty_set_rate: f64,
    /// Mean share of the focused (or relevant) set that is valid for this
    /// direction, over replications with a nonempty set.
    pub mean_valid_proportion: Option<f64>,
    pub mean_set_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub dy: DirectionSummary,
    pub yd: DirectionSummary,
    /// Bonferroni joint test of no effect in either direction.
    pub joint_rejection_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub p: usize,
    pub kappa: f64,
    pub beta_dy: f64,
    pub beta_yd: f64,
    pub n_reps: usize,
    pub alpha: f64,
    pub tau_s: f64,
    pub rng_seed: u64,
    pub methods: Vec<MethodSummary>,
    pub mean_iv_proportions: IvProportions,
    pub mean_pi_correlation: Option<f64>,
}

impl ScenarioReport {
    pub fn method(&self, label: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == label)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    ok: bool,
    reject: bool,
    p_value: f64,
    empty: bool,
    valid_proportion: Option<f64>,
    set_size: usize,
}

struct RepResult {
    proportions: IvProportions,
    pi_correlation: Option<f64>,
    // [method][direction]
    outcomes: Vec<[Outcome; 2]>,
}

fn valid_proportion(set: &[usize], classes: &[IvClass], direction: Direction) -> Option<f64> {
    if set.is_empty() {
        return None;
    }
    let valid = set.iter().filter(|&&j| classes[j].is_valid_for(direction)).count();
    Some(valid as f64 / set.len() as f64)
}

fn run_method(
    method: Method,
    panel: &Panel,
    direction: Direction,
    cfg: &FocusConfig,
    tau_s: f64,
    classes: &[IvClass],
) -> Outcome {
    match method {
        Method::Focused { estimator, tau_f } => {
            let cfg = cfg.clone().with_tau_f(tau_f);
            let set = focusing::focused_set(panel, direction, tau_f, tau_s);
            match focusing::test_direction(panel, direction, &cfg, estimator) {
                Ok(r) => Outcome {
                    ok: true,
                    reject: r.reject,
                    p_value: r.p_value,
                    empty: r.empty_set_reject,
                    valid_proportion: valid_proportion(&set, classes, direction),
                    set_size: set.len(),
                },
                Err(_) => Outcome::default(),
            }
        }
        Method::Benchmark(b) => {
            let set = focusing::relevant_set(panel, direction, tau_s);
            match benchmarks::run_benchmark(b, panel, direction, cfg) {
                Ok(r) => Outcome {
                    ok: true,
                    reject: r.reject,
                    p_value: r.p_value,
                    empty: false,
                    valid_proportion: valid_proportion(&set, classes, direction),
                    set_size: set.len(),
                },
                Err(_) => Outcome {
                    set_size: set.len(),
                    ..Outcome::default()
                },
            }
        }
    }
}

fn run_rep(seed: &SeedEffects, scenario: &ScenarioConfig, tau_s: f64, rep: u64) -> Result<RepResult> {
    let mut rng = stats::rng_stream(scenario.rng_seed, rep);
    let truth = generate_truth(seed, scenario.kappa, scenario.beta_dy, scenario.beta_yd, &mut rng)?;
    let panel = simulate_panel(&truth, &mut rng);
    let cfg = FocusConfig {
        tau_s: focusing::ScreeningThreshold::Explicit(tau_s),
        seed: rng.random(),
        ..scenario.cfg.clone()
    };
    let classes = truth.classes(DEFAULT_ZERO_TOL);
    let outcomes = scenario
        .methods
        .iter()
        .map(|&m| {
            [
                run_method(m, &panel, Direction::DtoY, &cfg, tau_s, &classes),
                run_method(m, &panel, Direction::YtoD, &cfg, tau_s, &classes),
            ]
        })
        .collect();
    Ok(RepResult {
        proportions: IvProportions::from_counts(&IvCounts::from_classes(&classes)),
        pi_correlation: stats::correlation(&truth.pi_d, &truth.pi_y),
        outcomes,
    })
}

fn summarize(direction: Direction, outcomes: impl Iterator<Item = Outcome>) -> DirectionSummary {
    let (mut completed, mut errors, mut rejects, mut empties) = (0usize, 0usize, 0usize, 0usize);
    let (mut prop_sum, mut prop_n, mut size_sum) = (0.0, 0usize, 0usize);
    for o in outcomes {
        size_sum += o.set_size;
        if !o.ok {
            errors += 1;
            continue;
        }
        completed += 1;
        rejects += o.reject as usize;
        empties += o.empty as usize;
        if let Some(v) = o.valid_proportion {
            prop_sum += v;
            prop_n += 1;
        }
    }
    let denom = completed.max(1) as f64;
    DirectionSummary {
        direction,
        rejection_rate: rejects as f64 / denom,
        completed,
        errors,
        empty_set_rate: empties as f64 / denom,
        mean_valid_proportion: (prop_n > 0).then(|| prop_sum / prop_n as f64),
        mean_set_size: size_sum as f64 / (completed + errors).max(1) as f64,
    }
}

pub fn run_scenario(seed: &SeedEffects, scenario: &ScenarioConfig) -> Result<ScenarioReport> {
    if scenario.n_reps == 0 {
        return Err(Error::InvalidArgument("n_reps must be at least 1".into()));
    }
    if scenario.methods.is_empty() {
        return Err(Error::InvalidArgument("no methods configured".into()));
    }
    scenario.cfg.validate()?;
    let tau_s = scenario.cfg.tau_s.resolve(seed.p())?;

    let reps: Vec<RepResult> = (0..scenario.n_reps as u64)
        .into_par_iter()
        .map(|rep| run_rep(seed, scenario, tau_s, rep))
        .collect::<Result<_>>()?;

    let n = reps.len() as f64;
    let mut props = IvProportions::default();
    let (mut corr_sum, mut corr_n) = (0.0, 0usize);
    for r in &reps {
        props.null += r.proportions.null / n;
        props.valid_dy += r.proportions.valid_dy / n;
        props.valid_yd += r.proportions.valid_yd / n;
        props.pleiotropic += r.proportions.pleiotropic / n;
        if let Some(c) = r.pi_correlation {
            corr_sum += c;
            corr_n += 1;
        }
    }

    let methods = scenario
        .methods
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let joint_alpha = scenario.cfg.alpha / 2.0;
            let (mut joint_rejects, mut joint_n) = (0usize, 0usize);
            for r in &reps {
                let [dy, yd] = r.outcomes[k];
                if dy.ok && yd.ok {
                    joint_n += 1;
                    let hit = |o: Outcome| o.empty || o.p_value <= joint_alpha;
                    joint_rejects += (hit(dy) || hit(yd)) as usize;
                }
            }
            MethodSummary {
                method: m.to_string(),
                dy: summarize(Direction::DtoY, reps.iter().map(|r| r.outcomes[k][0])),
                yd: summarize(Direction::YtoD, reps.iter().map(|r| r.outcomes[k][1])),
                joint_rejection_rate: joint_rejects as f64 / joint_n.max(1) as f64,
            }
        })
        .collect();

    Ok(ScenarioReport {
        p: seed.p(),
        kappa: scenario.kappa,
        beta_dy: scenario.beta_dy,
        beta_yd: scenario.beta_yd,
        n_reps: scenario.n_reps,
        alpha: scenario.cfg.alpha,
        tau_s,
        rng_seed: scenario.rng_seed,
        methods,
        mean_iv_proportions: props,
        mean_pi_correlation: (corr_n > 0).then(|| corr_sum / corr_n as f64),
    })
}

/// Runs the scenario once per `(beta_dy, beta_yd)` pair.
pub fn run_grid(
    seed: &SeedEffects,
    base: &ScenarioConfig,
    grid: &[(f64, f64)],
) -> Result<Vec<ScenarioReport>> {
    grid.iter()
        .map(|&(beta_dy, beta_yd)| {
            run_scenario(
                seed,
                &ScenarioConfig {
                    beta_dy,
                    beta_yd,
                    ..base.clone()
                },
            )
        })
        .collect()
}
