//! Batch convergence studies and their tabular output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{error_report, observed_order, ErrorReport};
use crate::error::{HdgError, Result};
use crate::hdg::{solve, DiscretizationConfig, MethodVariant};
use crate::mesh::Mesh;
use crate::problem::Problem;

pub const MAX_K: usize = 3;
pub const MAX_VECTOR_DEGREE: usize = 6;
/// Errors at or below this are treated as exact; no order is reported.
pub const ZERO_ERROR: f64 = 1e-12;
/// An order below `expected - ORDER_SLACK` is flagged by `compare`.
pub const ORDER_SLACK: f64 = 0.2;

pub const CSV_HEADER: &str = "variant,k,l,n,err_q,order_q,err_u,order_u,err_jump,order_jump";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    #[serde(alias = "markdown")]
    Md,
}

impl FromStr for OutputFormat {
    type Err = HdgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Md),
            _ => Err(HdgError::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

fn default_levels() -> Vec<usize> {
    vec![10, 20, 40, 80]
}

fn default_tau() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub problem: String,
    pub variants: Vec<MethodVariant>,
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_tau")]
    pub tau_coeff: f64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<Problem> {
        let bad = |m: String| Err(HdgError::InvalidConfig(m));
        let problem: Problem = self.problem.parse()?;
        if self.variants.is_empty() || self.k.is_empty() || self.l.is_empty() {
            return bad("variants, k and l must be non-empty".into());
        }
        if self.levels.is_empty() || self.levels[0] == 0 {
            return bad("levels must be non-empty and positive".into());
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "levels must be strictly increasing: {:?}",
                self.levels
            ));
        }
        for &k in &self.k {
            if k > MAX_K {
                return bad(format!("k = {k} exceeds {MAX_K}"));
            }
            for &l in &self.l {
                if k + l > MAX_VECTOR_DEGREE {
                    return bad(format!("k + l = {} exceeds {MAX_VECTOR_DEGREE}", k + l));
                }
            }
        }
        if !(self.tau_coeff.is_finite() && self.tau_coeff > 0.0) {
            return bad(format!(
                "tau coefficient must be positive, got {}",
                self.tau_coeff
            ));
        }
        Ok(problem)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub variant: MethodVariant,
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub report: ErrorReport,
    pub order_q: Option<f64>,
    pub order_u: Option<f64>,
    pub order_jump: Option<f64>,
}

impl ConvergenceRecord {
    fn group(&self) -> (MethodVariant, usize) {
        (self.variant, self.k)
    }

    fn series(&self) -> (MethodVariant, usize, usize) {
        (self.variant, self.k, self.l)
    }
}

fn guarded_order(coarse: (f64, f64), fine: (f64, f64)) -> Option<f64> {
    if coarse.1 <= ZERO_ERROR || fine.1 <= ZERO_ERROR {
        return None;
    }
    observed_order(coarse, fine).ok()
}

/// Solve one tuple and report its errors.
pub fn run_single(
    problem: &Problem,
    variant: MethodVariant,
    config: &DiscretizationConfig,
    n: usize,
) -> Result<ErrorReport> {
    let mesh = Mesh::generate_structured(n)?;
    let solution = solve(&mesh, config, variant, |x| problem.f(x), |x| problem.g(x))?;
    Ok(error_report(n, &mesh, config, &solution, problem))
}

/// One record per (variant, k, l, n) in config order.
pub fn run_study(config: &StudyConfig) -> Result<Vec<ConvergenceRecord>> {
    let problem = config.validate()?;
    let tuples: Vec<(MethodVariant, usize, usize, usize)> = config
        .variants
        .iter()
        .flat_map(|&v| {
            config.k.iter().flat_map(move |&k| {
                config
                    .l
                    .iter()
                    .flat_map(move |&l| config.levels.iter().map(move |&n| (v, k, l, n)))
            })
        })
        .collect();

    let reports = tuples
        .par_iter()
        .map(|&(variant, k, l, n)| {
            let disc = DiscretizationConfig::new(k, l).with_tau_coeff(config.tau_coeff);
            run_single(&problem, variant, &disc, n).map_err(|e| HdgError::Study {
                variant: variant.to_string(),
                k,
                l,
                n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records: Vec<ConvergenceRecord> = Vec::with_capacity(reports.len());
    for (&(variant, k, l, n), report) in tuples.iter().zip(reports) {
        let prev = records
            .last()
            .filter(|r| r.series() == (variant, k, l))
            .map(|r| r.report);
        let order = |pick: fn(&ErrorReport) -> f64| {
            prev.and_then(|p| {
                guarded_order((p.h_global, pick(&p)), (report.h_global, pick(&report)))
            })
        };
        records.push(ConvergenceRecord {
            variant,
            k,
            l,
            n,
            report,
            order_q: order(|r| r.err_q),
            order_u: order(|r| r.err_u),
            order_jump: order(|r| r.err_jump),
        });
    }
    Ok(records)
}

/// C-style `%.6e`: six fractional digits and an exponent of at least two
/// digits.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(format_sci).unwrap_or_default()
}

fn check_single_group(records: &[ConvergenceRecord]) -> Result<()> {
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.group() != first.group()) {
            return Err(HdgError::Table(format!(
                "records mix groups ({}, k={}) and ({}, k={})",
                first.variant, first.k, other.variant, other.k
            )));
        }
    }
    Ok(())
}

/// Render one (variant, k) group.
pub fn emit_table(records: &[ConvergenceRecord], format: OutputFormat) -> Result<String> {
    check_single_group(records)?;
    Ok(match format {
        OutputFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            s.push_str(&csv_rows(records));
            s
        }
        OutputFormat::Md => markdown(records),
    })
}

fn csv_rows(records: &[ConvergenceRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.variant,
            r.k,
            r.l,
            r.n,
            format_sci(r.report.err_q),
            opt_sci(r.order_q),
            format_sci(r.report.err_u),
            opt_sci(r.order_u),
            format_sci(r.report.err_jump),
            opt_sci(r.order_jump),
        );
    }
    s
}

fn markdown(records: &[ConvergenceRecord]) -> String {
    let mut s = String::new();
    let Some(first) = records.first() else {
        return s;
    };
    let _ = writeln!(s, "### {}, k = {}\n", first.variant, first.k);
    s.push_str(
        "| l | n | ‖q − q_h‖ | order | ‖u − u_h‖ | order | ‖h^{-1/2}(P_M u_h − û_h)‖ | order |\n",
    );
    s.push_str("|---|---|---|---|---|---|---|---|\n");
    let ord = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "--".into());
    let mut last_l = None;
    for r in records {
        let l = if last_l == Some(r.l) {
            String::new()
        } else {
            r.l.to_string()
        };
        last_l = Some(r.l);
        let _ = writeln!(
            s,
            "| {l} | {} | {:.3e} | {} | {:.3e} | {} | {:.3e} | {} |",
            r.n,
            r.report.err_q,
            ord(r.order_q),
            r.report.err_u,
            ord(r.order_u),
            r.report.err_jump,
            ord(r.order_jump),
        );
    }
    s
}

/// Render a whole study: one CSV with a single header, or one markdown
/// table per (variant, k) group.
pub fn emit_study(records: &[ConvergenceRecord], format: OutputFormat) -> Result<String> {
    let mut groups: Vec<&[ConvergenceRecord]> = Vec::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || records[i].group() != records[start].group() {
            groups.push(&records[start..i]);
            start = i;
        }
    }
    Ok(match format {
        OutputFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for g in groups {
                s.push_str(&csv_rows(g));
            }
            s
        }
        OutputFormat::Md => groups
            .into_iter()
            .map(markdown)
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

/// Finest-pair orders of one (variant, k, l) series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub variant: MethodVariant,
    pub k: usize,
    pub l: usize,
    pub finest: ErrorReport,
    pub order_q: Option<f64>,
    pub order_u: Option<f64>,
    pub order_jump: Option<f64>,
    pub flag_q: bool,
    pub flag_u: bool,
    pub flag_jump: bool,
}

impl ComparisonRow {
    pub fn flagged(&self) -> bool {
        self.flag_q || self.flag_u || self.flag_jump
    }
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub text: String,
}

impl Comparison {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(ComparisonRow::flagged)
    }
}

/// Side-by-side finest-pair orders, flagged against the optimal rates
/// k+1 (q), k+2 (u) and k+1 (jump).
pub fn compare_methods(config: &StudyConfig) -> Result<Comparison> {
    if config.variants.len() < 2 {
        return Err(HdgError::InvalidConfig(
            "compare needs at least two variants".into(),
        ));
    }
    if config.levels.len() < 2 {
        return Err(HdgError::InvalidConfig(
            "compare needs at least two mesh levels".into(),
        ));
    }
    let records = run_study(config)?;
    let below =
        |o: Option<f64>, expected: usize| o.is_some_and(|o| o < expected as f64 - ORDER_SLACK);

    let mut rows = Vec::new();
    for &k in &config.k {
        for &l in &config.l {
            for &variant in &config.variants {
                let last = records
                    .iter()
                    .rev()
                    .find(|r| r.series() == (variant, k, l))
                    .expect("every series has records");
                rows.push(ComparisonRow {
                    variant,
                    k,
                    l,
                    finest: last.report,
                    order_q: last.order_q,
                    order_u: last.order_u,
                    order_jump: last.order_jump,
                    flag_q: below(last.order_q, k + 1),
                    flag_u: below(last.order_u, k + 2),
                    flag_jump: below(last.order_jump, k + 1),
                });
            }
        }
    }

    let levels = &config.levels;
    let mut text = format!(
        "finest-pair orders (n = {} -> {}); `!` marks an order below expected - {ORDER_SLACK}\n\n",
        levels[levels.len() - 2],
        levels[levels.len() - 1]
    );
    text.push_str(
        "| k | l | variant | err_q | order_q | err_u | order_u | err_jump | order_jump |\n",
    );
    text.push_str("|---|---|---|---|---|---|---|---|---|\n");
    let cell = |o: Option<f64>, flag: bool| {
        let v = o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "--".into());
        if flag {
            format!("{v} !")
        } else {
            v
        }
    };
    for r in &rows {
        let _ = writeln!(
            text,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.k,
            r.l,
            r.variant,
            format_sci(r.finest.err_q),
            cell(r.order_q, r.flag_q),
            format_sci(r.finest.err_u),
            cell(r.order_u, r.flag_u),
            format_sci(r.finest.err_jump),
            cell(r.order_jump, r.flag_jump),
        );
    }
    Ok(Comparison { rows, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize, l: usize, order: Option<f64>) -> ConvergenceRecord {
        ConvergenceRecord {
            variant: MethodVariant::Proj,
            k: 1,
            l,
            n,
            report: ErrorReport {
                n,
                h_global: 1.0 / n as f64,
                err_q: 1.0 / (n * n) as f64,
                err_u: 0.5 / (n * n * n) as f64,
                err_jump: 2.0 / (n * n) as f64,
            },
            order_q: order,
            order_u: order,
            order_jump: order,
        }
    }

    #[test]
    fn sci_format_matches_c() {
        assert_eq!(format_sci(1.236e-2), "1.236000e-02");
        assert_eq!(format_sci(0.0), "0.000000e+00");
        assert_eq!(format_sci(12345.678), "1.234568e+04");
        assert_eq!(format_sci(3.0e-123), "3.000000e-123");
    }

    #[test]
    fn single_record_csv() {
        let csv = emit_table(&[record(10, 0, None)], OutputFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "PROJ,1,0,10,1.000000e-02,,5.000000e-04,,2.000000e-02,"
        );
    }

    #[test]
    fn mixed_groups_rejected() {
        let mut other = record(20, 0, Some(2.0));
        other.k = 2;
        assert!(emit_table(&[record(10, 0, None), other], OutputFormat::Csv).is_err());
        other.k = 1;
        other.variant = MethodVariant::Ls;
        assert!(emit_table(&[record(10, 0, None), other], OutputFormat::Md).is_err());
    }

    #[test]
    fn markdown_groups_by_l() {
        let recs = [
            record(10, 0, None),
            record(20, 0, Some(2.0)),
            record(10, 1, None),
            record(20, 1, Some(2.0)),
        ];
        let md = emit_table(&recs, OutputFormat::Md).unwrap();
        let rows: Vec<&str> = md
            .lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| l"))
            .collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("| 0 | 10 |"));
        assert!(rows[1].starts_with("|  | 20 |"));
        assert!(rows[2].starts_with("| 1 | 10 |"));
        assert!(rows[1].contains("| 2.00 |"));
        assert!(rows[0].contains("| -- |"));
    }

    #[test]
    fn config_validation() {
        let base = StudyConfig {
            problem: "paper-sin".into(),
            variants: vec![MethodVariant::Proj],
            k: vec![1],
            l: vec![0],
            levels: vec![2, 4],
            tau_coeff: 1.0,
            format: OutputFormat::Csv,
            output: None,
        };
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.levels = vec![4, 4];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.k = vec![4];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.k = vec![3];
        c.l = vec![4];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.problem = "nope".into();
        assert!(c.validate().is_err());
        let mut c = base;
        c.tau_coeff = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults_and_unknown_fields() {
        let c = StudyConfig::from_json(
            r#"{"problem":"paper-sin","variants":["proj","ls"],"k":[1],"l":[0,1]}"#,
        )
        .unwrap();
        assert_eq!(c.levels, vec![10, 20, 40, 80]);
        assert_eq!(c.tau_coeff, 1.0);
        assert_eq!(c.format, OutputFormat::Csv);
        assert!(StudyConfig::from_json(
            r#"{"problem":"paper-sin","variants":["proj"],"k":[1],"l":[0],"extra":1}"#
        )
        .is_err());
    }
}
