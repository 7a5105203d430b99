//! Overall IVW, MR-Median and MR-Egger next to the focused IVW test on one
//! simulated panel with directional pleiotropy.

use focusmr::simulation::{generate_truth, simulate_panel, synthetic_seed, SeedProfile};
use focusmr::stats::rng_stream;
use focusmr::{run_benchmark, test_direction, BenchmarkMethod, Direction, FocusConfig, FocusedEstimator};

fn main() -> focusmr::Result<()> {
    let p = 394;
    let seed = synthetic_seed(p, &mut rng_stream(11, u64::MAX), &SeedProfile::separated(p, 1.5, 2.0))?;
    let mut rng = rng_stream(11, 0);
    // no causal effect in either direction
    let truth = generate_truth(&seed, 0.7, 0.0, 0.0, &mut rng)?;
    let panel = simulate_panel(&truth, &mut rng);
    let cfg = FocusConfig::default().with_seed(11);

    let focused = test_direction(&panel, Direction::DtoY, &cfg, FocusedEstimator::FocusedIvw)?;
    println!("{:<12} estimate {:+.5}  p = {:.4}  ({} SNPs)", "focused-ivw", focused.estimate.unwrap_or(f64::NAN), focused.p_value, focused.n_focused);
    for method in [BenchmarkMethod::OverallIvw, BenchmarkMethod::MrMedian, BenchmarkMethod::MrEgger] {
        let r = run_benchmark(method, &panel, Direction::DtoY, &cfg)?;
        println!("{:<12} estimate {:+.5}  p = {:.4}  ({} SNPs)", method.to_string(), r.estimate, r.p_value, r.n_relevant);
        if let (Some(a), Some(se)) = (r.intercept, r.intercept_se) {
            println!("{:<12} intercept {a:+.5} (se {se:.5})", "");
        }
    }
    Ok(())
}
