//! Predicted power of the focused IVW test as the causal effect grows.

use focusmr::{power_forecast, Direction, FocusConfig, Panel, SnpRecord};

fn main() -> focusmr::Result<()> {
    let records: Vec<SnpRecord> = (0..20)
        .map(|j| {
            let se_d = 0.01;
            let se_y = 0.02 + 0.002 * (j % 5) as f64;
            let z = if j % 2 == 0 { 6.0 } else { -6.0 } - 0.3 * j as f64;
            SnpRecord::new(format!("snp{j}"), z * se_d, se_d, 0.0, se_y)
        })
        .collect();
    let panel = Panel::new(records)?;
    let set: Vec<usize> = (0..panel.len()).collect();
    let cfg = FocusConfig::default();

    println!("{:>6} {:>10} {:>10} {:>8}", "beta", "mean", "sd", "power");
    for k in 0..=8 {
        let beta = 0.02 * k as f64;
        // outcome signal-to-noise ratio of a valid instrument
        let mus: Vec<f64> = set
            .iter()
            .map(|&j| {
                let s = panel.oriented(j, Direction::DtoY);
                beta * s.beta_exp / s.se_out
            })
            .collect();
        let f = power_forecast(&panel, Direction::DtoY, &set, &mus, &cfg)?;
        println!("{beta:>6.2} {:>10.5} {:>10.5} {:>8.3}", f.mu_alt, f.sigma_alt, f.predicted_power);
    }
    Ok(())
}
