//! Tab-separated input files, harmonization and deterministic report output.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::benchmarks::BenchmarkReport;
use crate::error::{Error, Result};
use crate::direction::Direction;
use crate::focusing::{JointReport, SnpMembership, TestReport};
use crate::model::TruthConfig;
use crate::panel::{Panel, SnpRecord};
use crate::simulation::{ScenarioReport, SeedEffects};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwasRow {
    pub variant_id: String,
    pub effect_allele: Option<String>,
    pub other_allele: Option<String>,
    pub beta: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwasFile {
    pub path: String,
    pub rows: Vec<GwasRow>,
}

impl GwasFile {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Header names for each field. Unset fields fall back to common aliases.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnMap {
    pub id: Option<String>,
    pub beta: Option<String>,
    pub se: Option<String>,
    pub effect_allele: Option<String>,
    pub other_allele: Option<String>,
}

const ID_ALIASES: &[&str] = &["id", "variant_id", "snp", "rsid", "SNP", "ID"];
const BETA_ALIASES: &[&str] = &["beta", "BETA", "b", "effect"];
const SE_ALIASES: &[&str] = &["se", "SE", "stderr", "standard_error"];
const EA_ALIASES: &[&str] = &["effect_allele", "ea", "EA", "a1", "A1"];
const OA_ALIASES: &[&str] = &["other_allele", "oa", "OA", "a2", "A2"];

impl FromStr for ColumnMap {
    type Err = String;

    /// `beta=b,se=stderr`
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut map = ColumnMap::default();
        for pair in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (field, column) = pair
                .split_once('=')
                .ok_or_else(|| format!("column mapping `{pair}` is not field=column"))?;
            let column = Some(column.trim().to_string());
            match field.trim() {
                "id" => map.id = column,
                "beta" => map.beta = column,
                "se" => map.se = column,
                "effect_allele" => map.effect_allele = column,
                "other_allele" => map.other_allele = column,
                other => return Err(format!("unknown field `{other}` in column mapping")),
            }
        }
        Ok(map)
    }
}

/// The mapped name wins; files that lack it fall back to the aliases, so one
/// mapping can serve an exposure and an outcome file with different headers.
fn find_column(header: &[&str], explicit: &Option<String>, aliases: &[&str]) -> Option<usize> {
    explicit
        .iter()
        .map(String::as_str)
        .chain(aliases.iter().copied())
        .find_map(|name| header.iter().position(|h| *h == name))
}

/// Content lines with their 1-based line numbers; blank and `#` lines skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_real(path: &str, line: usize, field: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("{field} `{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("{field} `{raw}` is not finite")));
    }
    Ok(v)
}

pub fn load_gwas(path: impl AsRef<Path>, columns: &ColumnMap) -> Result<GwasFile> {
    let path_str = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    parse_gwas(&path_str, &text, columns)
}

pub fn parse_gwas(path: &str, text: &str, columns: &ColumnMap) -> Result<GwasFile> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing header line"))?;
    let header: Vec<&str> = header.split('\t').map(str::trim).collect();
    let need = |explicit: &Option<String>, aliases: &[&str], field: &str| {
        find_column(&header, explicit, aliases).ok_or_else(|| {
            parse_err(
                path,
                header_line,
                format!("no column for {field} in header {header:?}"),
            )
        })
    };
    let id_col = need(&columns.id, ID_ALIASES, "id")?;
    let beta_col = need(&columns.beta, BETA_ALIASES, "beta")?;
    let se_col = need(&columns.se, SE_ALIASES, "se")?;
    let ea_col = find_column(&header, &columns.effect_allele, EA_ALIASES);
    let oa_col = find_column(&header, &columns.other_allele, OA_ALIASES);

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split('\t').collect();
        if fields.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let id = fields[id_col].trim();
        if id.is_empty() {
            return Err(parse_err(path, line, "empty variant id"));
        }
        let beta = parse_real(path, line, "beta", fields[beta_col])?;
        let se = parse_real(path, line, "se", fields[se_col])?;
        if se <= 0.0 {
            return Err(Error::NonPositiveSe {
                path: path.to_string(),
                line,
                id: id.to_string(),
                se,
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateVariant {
                path: path.to_string(),
                line,
                id: id.to_string(),
            });
        }
        let allele = |col: Option<usize>| {
            col.map(|c| fields[c].trim().to_ascii_uppercase())
                .filter(|a| !a.is_empty())
        };
        rows.push(GwasRow {
            variant_id: id.to_string(),
            effect_allele: allele(ea_col),
            other_allele: allele(oa_col),
            beta,
            se,
        });
    }
    Ok(GwasFile {
        path: path.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonizeMode {
    ById,
    ByAllele,
}

impl FromStr for HarmonizeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "id" | "by-id" => Ok(HarmonizeMode::ById),
            "allele" | "by-allele" => Ok(HarmonizeMode::ByAllele),
            other => Err(format!("unknown harmonization mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonizeSummary {
    pub exposure_rows: usize,
    pub outcome_rows: usize,
    pub matched: usize,
    pub kept: usize,
    pub flipped: usize,
    pub dropped_palindromic: usize,
    pub dropped_mismatch: usize,
    pub dropped_missing_alleles: usize,
}

fn is_palindromic(a: &str, b: &str) -> bool {
    matches!((a, b), ("A", "T") | ("T", "A") | ("C", "G") | ("G", "C"))
}

enum AlleleMatch {
    Same,
    Swapped,
    Palindromic,
    Mismatch,
    Missing,
}

fn match_alleles(exp: &GwasRow, out: &GwasRow) -> AlleleMatch {
    let (Some(ea), Some(oa), Some(eb), Some(ob)) = (
        exp.effect_allele.as_deref(),
        exp.other_allele.as_deref(),
        out.effect_allele.as_deref(),
        out.other_allele.as_deref(),
    ) else {
        return AlleleMatch::Missing;
    };
    if is_palindromic(ea, oa) {
        return AlleleMatch::Palindromic;
    }
    if ea == eb && oa == ob {
        AlleleMatch::Same
    } else if ea == ob && oa == eb {
        AlleleMatch::Swapped
    } else {
        AlleleMatch::Mismatch
    }
}

/// Inner join on variant id in exposure-file order. The exposure file supplies
/// trait D, the outcome file trait Y. Standard errors are never modified.
pub fn harmonize(
    exposure: &GwasFile,
    outcome: &GwasFile,
    mode: HarmonizeMode,
) -> Result<(Panel, HarmonizeSummary)> {
    let by_id: HashMap<&str, &GwasRow> = outcome
        .rows
        .iter()
        .map(|r| (r.variant_id.as_str(), r))
        .collect();
    let mut summary = HarmonizeSummary {
        exposure_rows: exposure.len(),
        outcome_rows: outcome.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for exp in &exposure.rows {
        let Some(out) = by_id.get(exp.variant_id.as_str()) else {
            continue;
        };
        summary.matched += 1;
        let beta_y = match mode {
            HarmonizeMode::ById => out.beta,
            HarmonizeMode::ByAllele => match match_alleles(exp, out) {
                AlleleMatch::Same => out.beta,
                AlleleMatch::Swapped => {
                    summary.flipped += 1;
                    -out.beta
                }
                AlleleMatch::Palindromic => {
                    summary.dropped_palindromic += 1;
                    continue;
                }
                AlleleMatch::Mismatch => {
                    summary.dropped_mismatch += 1;
                    continue;
                }
                AlleleMatch::Missing => {
                    summary.dropped_missing_alleles += 1;
                    continue;
                }
            },
        };
        records.push(SnpRecord::new(
            exp.variant_id.clone(),
            exp.beta,
            exp.se,
            beta_y,
            out.se,
        ));
    }
    summary.kept = records.len();
    if records.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok((Panel::new(records)?, summary))
}

fn numeric_table<'a>(
    path: &str,
    text: &'a str,
    required: &[&str],
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing header line"))?;
    let header: Vec<&str> = header.split('\t').map(str::trim).collect();
    let cols: Vec<usize> = required
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(path, header_line, format!("missing column `{name}`")))
        })
        .collect::<Result<_>>()?;
    let id_col = find_column(&header, &None, ID_ALIASES);
    let mut columns = vec![Vec::new(); required.len()];
    let mut ids = Vec::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split('\t').collect();
        if fields.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        for (k, &c) in cols.iter().enumerate() {
            columns[k].push(parse_real(path, line, required[k], fields[c])?);
        }
        ids.push(match id_col {
            Some(c) => fields[c].trim().to_string(),
            None => format!("snp{}", ids.len() + 1),
        });
    }
    Ok((columns, ids))
}

/// Seed effects from a TSV with columns `alpha_d se_d alpha_y se_y` and an
/// optional id column.
pub fn load_seed(path: impl AsRef<Path>) -> Result<SeedEffects> {
    let path_str = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    let (mut cols, ids) = numeric_table(&path_str, &text, &["alpha_d", "se_d", "alpha_y", "se_y"])?;
    let se_y = cols.pop().expect("4 columns");
    let alpha_y = cols.pop().expect("4 columns");
    let se_d = cols.pop().expect("4 columns");
    let alpha_d = cols.pop().expect("4 columns");
    SeedEffects::new(ids, alpha_d, alpha_y, se_d, se_y)
}

/// Ground truth from JSON, or from a TSV with columns `pi_d pi_y se_d se_y`
/// plus the causal effects given separately.
pub fn load_truth(path: impl AsRef<Path>, betas: Option<(f64, f64)>) -> Result<TruthConfig> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        return Ok(serde_json::from_str(&text)?);
    }
    let (beta_dy, beta_yd) = betas.ok_or_else(|| {
        Error::InvalidArgument("a TSV truth needs --beta-dy and --beta-yd".into())
    })?;
    let (mut cols, _) = numeric_table(&path_str, &text, &["pi_d", "pi_y", "se_d", "se_y"])?;
    let se_y = cols.pop().expect("4 columns");
    let se_d = cols.pop().expect("4 columns");
    let pi_y = cols.pop().expect("4 columns");
    let pi_d = cols.pop().expect("4 columns");
    TruthConfig::new(pi_d, pi_y, beta_dy, beta_yd, se_d, se_y)
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig12(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with reals rounded to 12 significant digits. Key order follows
/// struct field order, so equal inputs give byte-identical output.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{}", round_sig12(x))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_else(|| "NA".into())
}

/// Everything the `test` subcommand can produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestResult {
    Focused(TestReport),
    Joint(JointReport),
    Benchmark(BenchmarkReport),
    BenchmarkJoint {
        alpha: f64,
        p_value: f64,
        reject: bool,
        dy: BenchmarkReport,
        yd: BenchmarkReport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestDocument {
    pub schema: &'static str,
    pub schema_version: u32,
    pub seed: u64,
    pub panel_size: usize,
    pub harmonization: HarmonizeSummary,
    pub results: Vec<TestResult>,
}

pub const TSV_HEADER: &str =
    "test\tdirection\tmethod\tn_set\testimate\tsd\tz\tp_value\treject\tempty_set_reject";

fn focused_row(r: &TestReport) -> String {
    let method = match r.estimator {
        crate::focusing::FocusedEstimator::FocusedIvw => "focused-ivw",
        crate::focusing::FocusedEstimator::FocusedMedian => "focused-median",
    };
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        r.direction.label(),
        r.direction,
        method,
        r.n_focused,
        fmt_opt(r.estimate),
        fmt_opt(r.null_sd),
        fmt_opt(r.z_score),
        fmt_real(r.p_value),
        r.reject,
        r.empty_set_reject
    )
}

fn benchmark_row(r: &BenchmarkReport) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\tfalse",
        r.direction.label(),
        r.direction,
        r.method,
        r.n_relevant,
        fmt_real(r.estimate),
        fmt_real(r.se),
        fmt_opt(r.z_score),
        fmt_real(r.p_value),
        r.reject
    )
}

/// One row per directional test; joint tests add a `joint` row after their two
/// directional rows.
pub fn results_tsv(results: &[TestResult]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for result in results {
        match result {
            TestResult::Focused(r) => {
                out.push_str(&focused_row(r));
                out.push('\n');
            }
            TestResult::Benchmark(r) => {
                out.push_str(&benchmark_row(r));
                out.push('\n');
            }
            TestResult::Joint(j) => {
                for r in [&j.dy, &j.yd] {
                    out.push_str(&focused_row(r));
                    out.push('\n');
                }
                let empty = j.dy.empty_set_reject || j.yd.empty_set_reject;
                let method = focused_row(&j.dy).split('\t').nth(2).unwrap_or("").to_string();
                out.push_str(&format!(
                    "joint\tboth\t{}\t{}\tNA\tNA\tNA\t{}\t{}\t{}\n",
                    method,
                    j.dy.n_focused + j.yd.n_focused,
                    fmt_real(j.p_value),
                    j.reject,
                    empty
                ));
            }
            TestResult::BenchmarkJoint {
                p_value,
                reject,
                dy,
                yd,
                ..
            } => {
                for r in [dy, yd] {
                    out.push_str(&benchmark_row(r));
                    out.push('\n');
                }
                out.push_str(&format!(
                    "joint\tboth\t{}\t{}\tNA\tNA\tNA\t{}\t{}\tfalse\n",
                    dy.method,
                    dy.n_relevant + yd.n_relevant,
                    fmt_real(*p_value),
                    reject
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

pub fn render_test_document(doc: &TestDocument, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => to_json(doc),
        ReportFormat::Tsv => Ok(results_tsv(&doc.results)),
    }
}

/// Writes `contents` to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit(contents: &str, path: Option<&Path>) -> Result<()> {
    use std::io::Write;
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, contents)?,
        _ => std::io::stdout().lock().write_all(contents.as_bytes())?,
    }
    Ok(())
}

/// Rejection-rate table, one row per scenario, method and direction.
pub fn scenario_table_tsv(reports: &[ScenarioReport]) -> String {
    let mut out = String::from(
        "beta_dy\tbeta_yd\tmethod\tdirection\trejection_rate\tmean_valid_proportion\tmean_set_size\tempty_set_rate\terrors\n",
    );
    for r in reports {
        for m in &r.methods {
            for d in [&m.dy, &m.yd] {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    fmt_real(r.beta_dy),
                    fmt_real(r.beta_yd),
                    m.method,
                    d.direction.label(),
                    fmt_real(d.rejection_rate),
                    fmt_opt(d.mean_valid_proportion),
                    fmt_real(d.mean_set_size),
                    fmt_real(d.empty_set_rate),
                    d.errors
                ));
            }
        }
    }
    out
}

/// Per-SNP focused-set membership for one direction.
pub fn membership_tsv(tables: &[(Direction, Vec<SnpMembership>)]) -> String {
    let mut out = String::from("direction\tid\texposure_z\toutcome_z\trelevant\tfocused\tratio\tweight\n");
    for (direction, r) in tables.iter().flat_map(|(d, rows)| rows.iter().map(move |r| (d, r))) {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            direction.label(),
            r.id,
            fmt_real(r.exposure_z),
            fmt_real(r.outcome_z),
            r.relevant,
            r.focused,
            fmt_opt(r.ratio),
            fmt_real(r.weight)
        ));
    }
    out
}

/// Ratio estimates and normalized IVW weights of the focused set, ready for a
/// weighted density plot.
pub fn density_tsv(tables: &[(Direction, Vec<(String, f64, f64)>)]) -> String {
    let mut out = String::from("direction\tid\tx\tweight\n");
    for (direction, (id, x, w)) in tables.iter().flat_map(|(d, rows)| rows.iter().map(move |r| (d, r))) {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            direction.label(),
            id,
            fmt_real(*x),
            fmt_real(*w)
        ));
    }
    out
}
