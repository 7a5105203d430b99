//! Which identification rules hold for a known bi-directional truth.

use focusmr::model::{diagnose_identification, DEFAULT_ZERO_TOL};
use focusmr::{Direction, TruthConfig};

fn main() -> focusmr::Result<()> {
    // 4 SNPs valid for D -> Y, 2 valid for Y -> D, 2 pleiotropic, 1 null
    let pi_d = vec![0.10, 0.12, -0.08, 0.09, 0.0, 0.0, 0.07, 0.05, 0.0];
    let pi_y = vec![0.0, 0.0, 0.0, 0.0, 0.06, -0.04, 0.03, -0.05, 0.0];
    let se = vec![0.01; 9];
    let truth = TruthConfig::new(pi_d, pi_y, 0.25, -0.1, se.clone(), se)?;

    let report = diagnose_identification(&truth, DEFAULT_ZERO_TOL)?;
    println!("{:?}", report.counts);
    for dir in Direction::BOTH {
        let r = report.rules(dir);
        println!(
            "{dir}: relevant {}, valid {}, valid rule {:?}, majority {:?}, plurality {:?}, InSIDE {:?} (critical value {:?})",
            r.relevant, r.valid_ivs, r.valid_rule, r.majority_rule, r.plurality_rule, r.inside, r.inside_critical_value
        );
    }
    Ok(())
}
