//! Joining two GWAS files by variant id and by allele.

use focusmr::io::{harmonize, parse_gwas, ColumnMap, HarmonizeMode};

const EXPOSURE: &str = "rsid\tea\toa\tb\tse
rs1\tA\tG\t0.12\t0.01
rs2\tC\tT\t-0.08\t0.01
rs3\tA\tT\t0.10\t0.01
rs4\tG\tC\t0.05\t0.01
rs5\tT\tC\t0.09\t0.01
";

const OUTCOME: &str = "rsid\tea\toa\tb\tse
rs1\tA\tG\t0.020\t0.02
rs2\tT\tC\t0.015\t0.02
rs3\tA\tT\t0.030\t0.02
rs5\tA\tG\t0.010\t0.02
rs9\tA\tG\t0.050\t0.02
";

fn main() -> focusmr::Result<()> {
    let columns: ColumnMap = "beta=b".parse().map_err(focusmr::Error::InvalidArgument)?;
    let exposure = parse_gwas("exposure", EXPOSURE, &columns)?;
    let outcome = parse_gwas("outcome", OUTCOME, &columns)?;

    for mode in [HarmonizeMode::ById, HarmonizeMode::ByAllele] {
        let (panel, summary) = harmonize(&exposure, &outcome, mode)?;
        println!("{mode:?}: {summary:?}");
        for r in panel.records() {
            println!("  {} beta_d {:+.3} beta_y {:+.3}", r.id, r.beta_d, r.beta_y);
        }
    }
    Ok(())
}
