//! Two truths with opposite roles for their instruments and identical
//! summary-level associations.

use focusmr::model::{observationally_equivalent_truth, reduced_form, DEFAULT_ZERO_TOL};
use focusmr::TruthConfig;

fn main() -> focusmr::Result<()> {
    let pi_d = vec![0.10, 0.08, 0.0, 0.0, 0.05];
    let pi_y = vec![0.0, 0.0, 0.07, -0.06, 0.04];
    let se = vec![0.01; 5];
    let truth = TruthConfig::new(pi_d, pi_y, 0.4, 0.5, se.clone(), se)?;
    let twin = observationally_equivalent_truth(&truth)?;

    println!("original: beta_dy {}, beta_yd {}", truth.beta_dy, truth.beta_yd);
    println!("twin:     beta_dy {}, beta_yd {}", twin.beta_dy, twin.beta_yd);
    let (a, b) = (reduced_form(&truth), reduced_form(&twin));
    for j in 0..truth.len() {
        println!(
            "SNP {j}: gamma_d {:+.6} / {:+.6}, gamma_y {:+.6} / {:+.6}, class {:?} -> {:?}",
            a.gamma_d[j],
            b.gamma_d[j],
            a.gamma_y[j],
            b.gamma_y[j],
            truth.classes(DEFAULT_ZERO_TOL)[j],
            twin.classes(DEFAULT_ZERO_TOL)[j]
        );
    }
    Ok(())
}
