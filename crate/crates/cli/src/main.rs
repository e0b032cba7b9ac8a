use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torsion_core::job::{
    batch_exit_code, parse_int_list, run_job_reported, sweep, Grid, JobSpec, Mode, Precision,
    Report,
};
use torsion_core::Error;

mod selftest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

/// Torsion of H^1(G, R') for totally ramified extensions of k[[t]].
#[derive(Debug, Parser)]
#[command(name = "torsion", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Working precision in valuation units: `auto` or an integer.
    #[arg(long, default_value = "auto", value_parser = parse_precision, global = true)]
    precision: Precision,

    /// Largest linear system the oracle may build.
    #[arg(long, default_value_t = torsion_core::cohomology::DEFAULT_MAX_DIM, global = true)]
    max_dim: usize,

    /// Record elapsed time in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Artin–Schreier extension y^p - y = π^-m, optionally over s^d = t.
    As(AsArgs),
    /// Kummer extension s^d = t.
    Tame(TameArgs),
    /// Closed form from explicit breaks.
    Formula(FormulaArgs),
    /// Run a grid of Artin–Schreier instances.
    Sweep(SweepArgs),
    /// Run the built-in consistency checks.
    Selftest,
}

#[derive(Debug, Args)]
struct AsArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    d: u64,
    #[arg(long, default_value = "both", value_parser = parse_mode)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct TameArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u64,
    #[arg(long, default_value = "both", value_parser = parse_mode)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct FormulaArgs {
    #[arg(long)]
    p: u64,
    /// Number of breaks; defaults to the length of `--breaks`.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    d: u64,
    /// Comma-separated lower breaks b_1 < … < b_n.
    #[arg(long, value_parser = parse_list)]
    breaks: IntList,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Primes, e.g. `2,3,5`.
    #[arg(long, value_parser = parse_list)]
    p: IntList,
    /// Pole orders, e.g. `1-20`; values divisible by p are skipped.
    #[arg(long, value_parser = parse_list)]
    m: IntList,
    /// Tame degrees; values divisible by p are skipped.
    #[arg(long, value_parser = parse_list, default_value = "1")]
    d: IntList,
    #[arg(long, default_value = "both", value_parser = parse_mode)]
    mode: Mode,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated integers and inclusive ranges `a-b`.
#[derive(Debug, Clone)]
struct IntList(Vec<u64>);

fn parse_list(s: &str) -> Result<IntList, String> {
    parse_int_list(s).map(IntList).map_err(|e| e.to_string())
}

impl Cli {
    fn template(&self, mode: Mode, p: u64, d: u64, m: Option<u64>) -> JobSpec {
        JobSpec {
            precision: self.precision,
            max_dim: self.max_dim,
            timing: self.timing,
            ..JobSpec::new(mode, p, d, m)
        }
    }
}

fn emit(out: &mut impl Write, format: Format, reports: &[Report]) -> io::Result<()> {
    for r in reports {
        match format {
            Format::Text => writeln!(out, "{}", r.to_text())?,
            Format::JsonLines => writeln!(out, "{}", r.to_json_line())?,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let reports = match &cli.command {
        Command::As(a) => vec![run_job_reported(&cli.template(a.mode, a.p, a.d, Some(a.m)))],
        Command::Tame(a) => vec![run_job_reported(&cli.template(a.mode, a.p, a.d, None))],
        Command::Formula(a) => {
            let mut spec = cli.template(Mode::Formula, a.p, a.d, None);
            spec.breaks = Some(a.breaks.0.clone());
            let report = match a.n {
                Some(n) if n as usize != a.breaks.0.len() => Report::failed(
                    &spec,
                    &Error::MalformedBreaks(format!(
                        "n = {n} but {} breaks were given",
                        a.breaks.0.len()
                    )),
                ),
                _ => run_job_reported(&spec),
            };
            vec![report]
        }
        Command::Sweep(a) => {
            let grid = Grid {
                primes: a.p.0.clone(),
                poles: a.m.0.clone(),
                tame: a.d.0.clone(),
            };
            let (reports, summary) = sweep(&grid, &cli.template(a.mode, 0, 1, None));
            eprintln!(
                "summary: points={} mismatches={} errors={}",
                summary.points, summary.mismatches, summary.errors
            );
            reports
        }
        Command::Selftest => {
            let ok = selftest::run(&mut out, cli.format == Format::JsonLines);
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    if emit(&mut out, cli.format, &reports).is_err() {
        return ExitCode::from(2);
    }
    if cli.format == Format::Text && reports.len() == 1 {
        if let Some(e) = &reports[0].error {
            eprintln!("error: {}", e.message);
        }
    }
    ExitCode::from(batch_exit_code(&reports) as u8)
}
