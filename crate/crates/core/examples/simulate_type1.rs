//! Rejection rates on a synthetic 394-SNP seed, with and without a true effect.
//!
//! cargo run --release --example simulate_type1 -- [reps] [kappa] [beta_dy]

use focusmr::simulation::{self, Method, ScenarioConfig, SeedProfile};
use focusmr::stats::rng_stream;
use focusmr::{BenchmarkMethod, FocusConfig, FocusedEstimator};

fn main() -> focusmr::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let reps = arg(0, 500.0) as usize;
    let kappa = arg(1, 1.0);
    let beta_dy = arg(2, 0.0);

    let p = 394;
    let seed = simulation::synthetic_seed(p, &mut rng_stream(2024, u64::MAX), &SeedProfile::separated(p, 1.5, 2.0))?;
    let focused = |estimator, tau_f| Method::Focused { estimator, tau_f };
    let scenario = ScenarioConfig {
        kappa,
        beta_dy,
        beta_yd: 0.0,
        n_reps: reps,
        cfg: FocusConfig {
            bootstrap_reps: 500,
            ..FocusConfig::default()
        },
        methods: vec![
            focused(FocusedEstimator::FocusedIvw, 1.2),
            focused(FocusedEstimator::FocusedIvw, 1.5),
            focused(FocusedEstimator::FocusedMedian, 1.5),
            Method::Benchmark(BenchmarkMethod::OverallIvw),
            Method::Benchmark(BenchmarkMethod::MrMedian),
            Method::Benchmark(BenchmarkMethod::MrEgger),
        ],
        rng_seed: 7,
    };
    let started = std::time::Instant::now();
    let report = simulation::run_scenario(&seed, &scenario)?;
    println!(
        "p = {p}, kappa = {kappa}, beta_dy = {beta_dy}, {reps} reps in {:.1?}",
        started.elapsed()
    );
    let props = report.mean_iv_proportions;
    println!(
        "IV classes: null {:.3}, valid D->Y {:.3}, valid Y->D {:.3}, pleiotropic {:.3}; corr(pi_d, pi_y) {:.3}",
        props.null,
        props.valid_dy,
        props.valid_yd,
        props.pleiotropic,
        report.mean_pi_correlation.unwrap_or(f64::NAN)
    );
    println!("{:<20} {:>8} {:>8} {:>8} {:>10} {:>8}", "method", "rej D->Y", "rej Y->D", "joint", "valid D->Y", "|set|");
    for m in &report.methods {
        println!(
            "{:<20} {:>8.3} {:>8.3} {:>8.3} {:>10.3} {:>8.1}",
            m.method,
            m.dy.rejection_rate,
            m.yd.rejection_rate,
            m.joint_rejection_rate,
            m.dy.mean_valid_proportion.unwrap_or(f64::NAN),
            m.dy.mean_set_size
        );
    }
    Ok(())
}
