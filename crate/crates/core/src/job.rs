//! Jobs, reports and parameter sweeps.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{stabilized_h1, OracleConfig, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};
use crate::ext::{ExtensionSpec, LocalExtension};
use crate::sen::{example_closed_form, sen_partition, ExampleComparison};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Formula,
    Oracle,
    #[default]
    Both,
}

impl Mode {
    fn formula(self) -> bool {
        matches!(self, Mode::Formula | Mode::Both)
    }

    fn oracle(self) -> bool {
        matches!(self, Mode::Oracle | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Mode::Formula),
            "oracle" => Ok(Mode::Oracle),
            "both" => Ok(Mode::Both),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Formula => "formula",
            Mode::Oracle => "oracle",
            Mode::Both => "both",
        })
    }
}

/// Working precision of the extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    /// Start at the floor and raise it whenever a query runs out.
    #[default]
    Auto,
    /// Use exactly this many valuation units and fail when they run out.
    Fixed(usize),
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Precision::Auto);
        }
        s.parse()
            .map(Precision::Fixed)
            .map_err(|_| Error::Parse(format!("precision must be 'auto' or an integer, got {s:?}")))
    }
}

/// One computation request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub mode: Mode,
    pub p: u64,
    /// Pole order of the Artin–Schreier part.
    pub m: Option<u64>,
    pub d: u64,
    /// Explicit breaks; only the formula accepts more than one.
    pub breaks: Option<Vec<u64>>,
    pub precision: Precision,
    pub max_dim: usize,
    /// Record wall-clock time in the report.
    pub timing: bool,
}

impl JobSpec {
    pub fn new(mode: Mode, p: u64, d: u64, m: Option<u64>) -> Self {
        Self {
            mode,
            p,
            m,
            d,
            breaks: None,
            precision: Precision::Auto,
            max_dim: DEFAULT_MAX_DIM,
            timing: false,
        }
    }

    /// Formula-only job from explicit breaks.
    pub fn formula(p: u64, d: u64, breaks: Vec<u64>) -> Self {
        Self {
            breaks: Some(breaks),
            ..Self::new(Mode::Formula, p, d, None)
        }
    }

    /// Break sequence fed to the formula.
    fn formula_breaks(&self) -> Result<Vec<u64>> {
        match (&self.breaks, self.m) {
            (Some(b), None) => Ok(b.clone()),
            (Some(b), Some(m)) if b.as_slice() == [m] => Ok(b.clone()),
            (Some(b), Some(m)) => Err(Error::InvalidJob(format!(
                "breaks {b:?} contradict m = {m}"
            ))),
            (None, Some(m)) => Ok(vec![m]),
            (None, None) => Ok(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let breaks = self.formula_breaks()?;
        if self.mode.oracle() && breaks.len() > 1 {
            return Err(Error::InvalidJob(
                "the oracle only handles a single wild break".into(),
            ));
        }
        if self.mode.oracle() && self.m.is_none() && !breaks.is_empty() {
            return Err(Error::InvalidJob(
                "the oracle needs m to build the extension".into(),
            ));
        }
        if self.mode.oracle() {
            ExtensionSpec::new(self.p, self.d, self.m)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportError {
    pub code: String,
    pub exit_code: i32,
    pub message: String,
}

impl From<&Error> for ReportError {
    fn from(e: &Error) -> Self {
        Self {
            code: e.code().to_string(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

/// Label attached to results the oracle cannot check.
pub const UNVERIFIED: &str = "unverified-by-oracle";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub p: u64,
    /// Exponent of the wild part, `|G_1| = p^n`.
    pub n: u32,
    pub d: u64,
    pub m: Option<u64>,
    pub breaks: Vec<u64>,
    /// Oracle partition when available, else the formula partition.
    pub partition: Vec<u64>,
    pub agree: Option<bool>,
    #[serde(rename = "stabilization_N")]
    pub stabilization_n: Option<usize>,
    pub elapsed_ms: Option<u64>,
    pub formula_partition: Option<Vec<u64>>,
    pub oracle_partition: Option<Vec<u64>>,
    pub lift_level: Option<usize>,
    pub i_table: Vec<u64>,
    pub label: Option<String>,
    pub closed_form: Option<ExampleComparison>,
    pub error: Option<ReportError>,
}

impl Report {
    fn empty(spec: &JobSpec) -> Self {
        let breaks = spec.formula_breaks().unwrap_or_default();
        Self {
            mode: spec.mode,
            p: spec.p,
            n: breaks.len() as u32,
            d: spec.d,
            m: spec.m,
            breaks,
            partition: Vec::new(),
            agree: None,
            stabilization_n: None,
            elapsed_ms: None,
            formula_partition: None,
            oracle_partition: None,
            lift_level: None,
            i_table: Vec::new(),
            label: None,
            closed_form: None,
            error: None,
        }
    }

    /// Report for a job that failed.
    pub fn failed(spec: &JobSpec, err: &Error) -> Self {
        Self {
            error: Some(err.into()),
            ..Self::empty(spec)
        }
    }

    pub fn is_mismatch(&self) -> bool {
        self.agree == Some(false)
    }

    /// 0 ok, 1 mismatch, otherwise the error's code.
    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.is_mismatch()) {
            (Some(e), _) => e.exit_code,
            (None, true) => 1,
            (None, false) => 0,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One line of text.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} p={} d={}", self.mode, self.p, self.d);
        if let Some(m) = self.m {
            out.push_str(&format!(" m={m}"));
        }
        out.push_str(&format!(" n={} breaks={}", self.n, list(&self.breaks)));
        if let Some(e) = &self.error {
            out.push_str(&format!(" error[{}]: {}", e.code, e.message));
            return out;
        }
        if let Some(f) = &self.formula_partition {
            out.push_str(&format!(" formula={}", list(f)));
        }
        if let Some(o) = &self.oracle_partition {
            out.push_str(&format!(" oracle={}", list(o)));
        }
        if let Some(a) = self.agree {
            out.push_str(if a { " agree=yes" } else { " agree=NO" });
        }
        if let Some(n) = self.stabilization_n {
            out.push_str(&format!(" N={n}"));
        }
        if let Some(c) = &self.closed_form {
            out.push_str(&format!(
                " displayed={} ({})",
                list(&c.displayed),
                if c.agree { "matches" } else { "differs" }
            ));
        }
        if let Some(l) = &self.label {
            out.push_str(&format!(" [{l}]"));
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!(" {ms}ms"));
        }
        out
    }
}

fn list(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("[{}]", items.join(","))
}

/// Parses a stream of json-lines reports, skipping blank lines.
pub fn parse_json_lines(text: &str) -> Result<Vec<Report>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(Report::from_json_line)
        .collect()
}

fn build(spec: &JobSpec, ext_spec: ExtensionSpec) -> Result<LocalExtension> {
    match spec.precision {
        Precision::Auto => LocalExtension::build(ext_spec, ext_spec.precision_floor()),
        Precision::Fixed(n) => LocalExtension::build(ext_spec, n),
    }
}

pub fn run_job(spec: &JobSpec) -> Result<Report> {
    let start = Instant::now();
    spec.validate()?;
    let mut report = Report::empty(spec);
    let breaks = spec.formula_breaks()?;

    if spec.mode.formula() {
        let formula = if breaks.is_empty() {
            Vec::new()
        } else {
            sen_partition(spec.p, breaks.len() as u32, spec.d, &breaks)?.lengths
        };
        report.formula_partition = Some(formula.clone());
        report.partition = formula;
        if breaks.len() > 1 {
            report.label = Some(UNVERIFIED.to_string());
        }
        if let (Some(m), 1) = (spec.m, spec.d) {
            report.closed_form = Some(example_closed_form(spec.p, m)?);
        }
    }

    if spec.mode.oracle() {
        let ext_spec = ExtensionSpec::new(spec.p, spec.d, spec.m)?;
        let ext = build(spec, ext_spec)?;
        if ext_spec.is_wild() {
            let profile = match spec.precision {
                Precision::Auto => ext.ramification_profile_with_retry()?,
                Precision::Fixed(_) => ext.ramification_profile()?,
            };
            if Some(profile.breaks.as_slice()) != spec.m.as_ref().map(std::slice::from_ref) {
                return Err(Error::InvalidExtension(format!(
                    "computed breaks {:?} differ from m = {:?}",
                    profile.breaks, spec.m
                )));
            }
            report.i_table = profile.i_table;
        }
        let config = OracleConfig {
            max_dim: spec.max_dim,
            fixed_precision: matches!(spec.precision, Precision::Fixed(_)),
            ..OracleConfig::default()
        };
        let stable = stabilized_h1(&ext, &config)?;
        let oracle: Vec<u64> = stable.result.partition.iter().map(|&x| x as u64).collect();
        report.stabilization_n = Some(stable.result.level);
        report.lift_level = Some(stable.result.lift_level);
        report.oracle_partition = Some(oracle.clone());
        if let Some(f) = &report.formula_partition {
            report.agree = Some(*f == oracle);
        }
        report.partition = oracle;
    }

    if spec.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// [`run_job`] with the error folded into the report.
pub fn run_job_reported(spec: &JobSpec) -> Report {
    run_job(spec).unwrap_or_else(|e| Report::failed(spec, &e))
}

/// Parameter grid; points with `gcd(m, p) > 1` or `gcd(d, p) > 1` are
/// skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Grid {
    pub primes: Vec<u64>,
    pub poles: Vec<u64>,
    pub tame: Vec<u64>,
}

impl Grid {
    /// Jobs sorted by `(p, d, m)`.
    pub fn jobs(&self, template: &JobSpec) -> Vec<JobSpec> {
        let mut primes = self.primes.clone();
        let mut tame = self.tame.clone();
        let mut poles = self.poles.clone();
        for v in [&mut primes, &mut tame, &mut poles] {
            v.sort_unstable();
            v.dedup();
        }
        let mut jobs = Vec::new();
        for &p in &primes {
            for &d in tame.iter().filter(|&&d| d % p != 0) {
                for &m in poles.iter().filter(|&&m| m % p != 0) {
                    jobs.push(JobSpec {
                        p,
                        d,
                        m: Some(m),
                        breaks: None,
                        ..template.clone()
                    });
                }
            }
        }
        jobs
    }
}

/// Parses `"1,3,5-9"` into a list of integers.
pub fn parse_int_list(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let num = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("not an integer: {x:?}")))
        };
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Error::Parse(format!("empty range {part:?}")));
                }
                if b - a > 100_000 {
                    return Err(Error::Parse(format!("range {part:?} too large")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub points: usize,
    pub mismatches: usize,
    pub errors: usize,
}

/// Runs every grid point, in parallel, returning reports in grid order.
pub fn sweep(grid: &Grid, template: &JobSpec) -> (Vec<Report>, SweepSummary) {
    let reports: Vec<Report> = grid
        .jobs(template)
        .par_iter()
        .map(run_job_reported)
        .collect();
    let summary = SweepSummary {
        points: reports.len(),
        mismatches: reports.iter().filter(|r| r.is_mismatch()).count(),
        errors: reports.iter().filter(|r| r.error.is_some()).count(),
    };
    (reports, summary)
}

/// Exit code for a batch: the largest error code if any job failed, else
/// 1 on a mismatch, else 0.
pub fn batch_exit_code(reports: &[Report]) -> i32 {
    let worst_error = reports
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| e.exit_code))
        .max();
    match worst_error {
        Some(c) => c,
        None if reports.iter().any(Report::is_mismatch) => 1,
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn artin_schreier_both() {
        let r = run_job(&JobSpec::new(Mode::Both, 3, 1, Some(4))).unwrap();
        assert_eq!(r.partition, vec![2, 1]);
        assert_eq!(r.agree, Some(true));
        assert_eq!(r.i_table, vec![4, 4]);
        assert_eq!(r.breaks, vec![4]);
        assert!(r.stabilization_n.is_some());
        assert_eq!(r.elapsed_ms, None);
    }

    #[test]
    fn formula_only_two_breaks() {
        let r = run_job(&JobSpec::formula(2, 1, vec![1, 3])).unwrap();
        assert_eq!(r.partition, vec![1, 1]);
        assert_eq!(r.n, 2);
        assert_eq!(r.label.as_deref(), Some(UNVERIFIED));
        assert_eq!(r.agree, None);
    }

    #[test]
    fn tame_job() {
        let r = run_job(&JobSpec::new(Mode::Both, 7, 3, None)).unwrap();
        assert!(r.partition.is_empty());
        assert_eq!(r.agree, Some(true));
        assert_eq!(r.n, 0);
    }

    #[test]
    fn invalid_jobs() {
        let mut spec = JobSpec::formula(2, 1, vec![1, 3]);
        spec.mode = Mode::Both;
        assert!(matches!(run_job(&spec), Err(Error::InvalidJob(_))));
        let spec = JobSpec::new(Mode::Oracle, 4, 1, Some(1));
        assert_eq!(run_job(&spec).unwrap_err().exit_code(), 2);
        let mut spec = JobSpec::new(Mode::Oracle, 3, 1, Some(4));
        spec.precision = Precision::Fixed(10);
        assert!(matches!(
            run_job(&spec),
            Err(Error::PrecisionBelowFloor { .. })
        ));
    }

    #[test]
    fn fixed_precision_fails_fast() {
        let mut spec = JobSpec::new(Mode::Oracle, 3, 1, Some(4));
        spec.precision = Precision::Fixed(ExtensionSpec::new(3, 1, Some(4)).unwrap().precision_floor());
        assert!(run_job(&spec).is_ok());
        let mut spec = JobSpec::new(Mode::Oracle, 5, 2, Some(19));
        spec.precision = Precision::Fixed(ExtensionSpec::new(5, 2, Some(19)).unwrap().precision_floor());
        // the lift level stays below the floor for these sizes
        assert!(run_job(&spec).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let r = run_job(&JobSpec::new(Mode::Both, 2, 1, Some(1))).unwrap();
        let line = r.to_json_line();
        assert!(line.contains("\"stabilization_N\""));
        assert_eq!(Report::from_json_line(&line).unwrap(), r);
        let failed = run_job_reported(&JobSpec::new(Mode::Both, 2, 3, Some(1)));
        assert_eq!(failed.error.as_ref().unwrap().code, "not_galois");
        assert_eq!(
            parse_json_lines(&format!("{}\n\n{}\n", line, failed.to_json_line())).unwrap(),
            vec![r, failed]
        );
    }

    #[test]
    fn int_lists() {
        assert_eq!(parse_int_list("1,3,5-7").unwrap(), vec![1, 3, 5, 6, 7]);
        assert_eq!(parse_int_list("").unwrap(), Vec::<u64>::new());
        assert!(parse_int_list("3-1").is_err());
        assert!(parse_int_list("x").is_err());
    }

    #[test]
    fn sweep_order_and_summary() {
        let grid = Grid {
            primes: vec![3],
            poles: vec![5, 1, 2, 3, 4],
            tame: vec![2],
        };
        let (reports, summary) = sweep(&grid, &JobSpec::new(Mode::Both, 0, 1, None));
        let ms: Vec<u64> = reports.iter().map(|r| r.m.unwrap()).collect();
        assert_eq!(ms, vec![1, 2, 4, 5]);
        assert_eq!(summary.points, 4);
        let (empty, s) = sweep(&Grid::default(), &JobSpec::new(Mode::Both, 0, 1, None));
        assert!(empty.is_empty());
        assert_eq!(s, SweepSummary::default());
        assert_eq!(batch_exit_code(&empty), 0);
    }
}
