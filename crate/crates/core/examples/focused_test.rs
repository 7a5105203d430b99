//! Focused tests in both directions on a 50-SNP GWAS pair.

use std::path::Path;

use focusmr::focusing::{membership, ScreeningThreshold};
use focusmr::io::{harmonize, load_gwas, ColumnMap, HarmonizeMode};
use focusmr::{test_joint_null, Direction, FocusConfig, FocusedEstimator};

fn main() -> focusmr::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let exposure = load_gwas(dir.join("exposure50.tsv"), &ColumnMap::default())?;
    let outcome = load_gwas(dir.join("outcome50.tsv"), &ColumnMap::default())?;
    let (panel, _) = harmonize(&exposure, &outcome, HarmonizeMode::ByAllele)?;

    let cfg = FocusConfig::default().with_seed(7);
    for estimator in [FocusedEstimator::FocusedIvw, FocusedEstimator::FocusedMedian] {
        let joint = test_joint_null(&panel, &cfg, estimator)?;
        println!("{estimator:?}: joint p = {:.4}, reject = {}", joint.p_value, joint.reject);
        for r in [&joint.dy, &joint.yd] {
            println!(
                "  {}: |F| = {}, estimate {:?}, null sd {:?}, p = {:.4}",
                r.direction, r.n_focused, r.estimate, r.null_sd, r.p_value
            );
        }
    }

    let tau_s = ScreeningThreshold::OneOverP.resolve(panel.len())?;
    let rows = membership(&panel, Direction::DtoY, cfg.tau_f, tau_s);
    let relevant = rows.iter().filter(|r| r.relevant).count();
    let focused = rows.iter().filter(|r| r.focused).count();
    println!("\nD->Y: {relevant} SNPs pass the exposure screen, {focused} remain after focusing");
    Ok(())
}
