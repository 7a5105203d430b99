//! Moments of a unit-variance normal truncated to an interval.

use focusmr::truncnorm::{symmetric_null_variance, TruncSpec};

fn main() -> focusmr::Result<()> {
    println!("null variance of z restricted to [-tau, tau]");
    for tau in [0.5, 1.2, 1.5, 2.0, 3.0] {
        println!("  tau {tau:>3}: {:.10}", symmetric_null_variance(tau)?);
    }

    println!("\nmean and variance on [-1.5, 1.5] as the center moves");
    for mu in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let spec = TruncSpec::symmetric(1.5, mu)?;
        println!("  mu {mu:>3}: mean {:.6}, variance {:.6}", spec.mean()?, spec.variance()?);
    }

    // far tails stay finite
    let tail = TruncSpec::new(10.0, f64::INFINITY, 0.0)?;
    println!("\nE[Z | Z > 10] = {:.6}", tail.mean()?);
    Ok(())
}
