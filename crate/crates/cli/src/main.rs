//! `quotbetti`: command-line front end for catalog lookups, stratum tables,
//! quotient reports, finite-field counts and the verification suites.

use std::fmt::Write as _;
use std::io::{IsTerminal, Write as _};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use quotbetti::catalog::{self, SpaceId};
use quotbetti::engine::{EngineError, QuotientReport};
use quotbetti::oracle::{self, OracleError};
use quotbetti::series::coeff_string;
use quotbetti::strata::{self, StrataError, StratumIndex};
use quotbetti::verify::{self, Suite, VerifyScope};
use quotbetti::{Engine, Flavor, Polynomial, PowerSeries, SystemSpec};

const EXIT_OK: u8 = 0;
const EXIT_INVARIANT: u8 = 1;
const EXIT_OBSTRUCTION: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// A stratum's equivariant series vanishes iff its constant term does.
const PROBE_CAP: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "quotbetti",
    version,
    about = "Betti numbers of polygon-space quotients via equivariant Morse recursion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factored Poincaré series of a catalog space and its expansion.
    Catalog {
        /// e.g. BU(3), BO(2), BSO(4), BT(2), BE2(1), GrassC(4,2), GrassR(5,2), Point
        space: String,
        #[arg(long, default_value_t = 64)]
        max_degree: usize,
    },
    /// Poincaré polynomial of a Grassmannian.
    Grassmann {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Field::Q)]
        field: Field,
    },
    /// Stratum indices with half-indices and codimensions.
    Strata {
        #[arg(short)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Equivariant series and quotient Poincaré polynomial.
    Quotient {
        #[arg(short)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        #[arg(long, value_enum, default_value_t = FlavorArg::Complex)]
        flavor: FlavorArg,
        /// Truncation degree of the equivariant series.
        #[arg(long, default_value_t = 64)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[arg(long, conflicts_with_all = ["csv", "format"])]
        json: bool,
        #[arg(long, conflicts_with = "format")]
        csv: bool,
    },
    /// Point counts of r points on the projective line over prime fields.
    Oracle {
        #[arg(short)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        primes: Vec<u64>,
    },
    /// Run the verification suites and print a pass/fail table.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long)]
        parallel: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Field {
    Q,
    Z2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    Complex,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    All,
    Catalog,
    Strata,
    Engine,
    Oracle,
}

/// Rendered output and exit status of one invocation.
struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn invariant(stdout: String, msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INVARIANT,
            stdout,
            stderr: format!("invariant violation: {msg}\n"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let outcome = run(cli.command);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Catalog { space, max_degree } => run_catalog(&space, max_degree),
        Command::Grassmann { n, k, field } => run_grassmann(n, k, field),
        Command::Strata { n, weights, json } => run_strata(n, weights, json),
        Command::Quotient {
            n,
            weights,
            flavor,
            max_degree,
            format,
            json,
            csv,
        } => {
            let format = if json {
                Format::Json
            } else if csv {
                Format::Csv
            } else {
                format
            };
            run_quotient(n, weights, flavor, max_degree, format)
        }
        Command::Oracle { r, primes } => run_oracle(r, &primes),
        Command::Verify {
            suite,
            max_n,
            parallel,
            inject_fault,
        } => run_verify(suite, max_n, parallel, inject_fault),
    }
}

fn run_catalog(space: &str, max_degree: usize) -> Outcome {
    let id: SpaceId = match space.parse() {
        Ok(id) => id,
        Err(e) => return Outcome::usage(e),
    };
    let entry = match catalog::entry(id) {
        Ok(entry) => entry,
        Err(e) => return Outcome::usage(e),
    };
    let mut out = String::new();
    writeln!(out, "space: {}", entry.space).unwrap();
    writeln!(out, "cohomology: {}", entry.cohomology).unwrap();
    writeln!(out, "factored: {}", entry.form).unwrap();
    writeln!(out, "expansion (to t^{max_degree}): {}", entry.form.expand(max_degree)).unwrap();
    Outcome::ok(out)
}

fn run_grassmann(n: usize, k: usize, field: Field) -> Outcome {
    let poly = match field {
        Field::Q => catalog::grass_c(n, k),
        Field::Z2 => catalog::grass_r_mod2(n, k),
    };
    match poly {
        Ok(p) => Outcome::ok(format!("{p}\n")),
        Err(e) => Outcome::usage(e),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StratumRow {
    blocks: Vec<(usize, usize)>,
    matrix: Vec<Vec<usize>>,
    half_index: usize,
    codim_complex: i64,
    codim_real: i64,
    empty: bool,
}

fn run_strata(n: usize, weights: Vec<usize>, json: bool) -> Outcome {
    let spec = match SystemSpec::complex(n, weights) {
        Ok(spec) => spec,
        Err(e) => return Outcome::usage(e),
    };
    let engine = Engine::new();
    let mut rows = Vec::new();
    for index in strata::enumerate_indices(&spec) {
        let codim = match strata::codims(&index, n) {
            Ok(data) => data.codim_complex as i64,
            Err(StrataError::NegativeCodimension { codim, .. }) => codim,
            Err(e) => return Outcome::invariant(String::new(), e),
        };
        let empty = match engine.stratum_contribution(Flavor::Complex, n, &index, PROBE_CAP) {
            Ok(series) => series.is_zero(),
            Err(e) => return Outcome::invariant(String::new(), e),
        };
        if codim < 0 && !empty {
            return Outcome::invariant(String::new(), format!("index {index} has negative codimension {codim}"));
        }
        rows.push(stratum_row(&index, codim, empty));
    }
    if json {
        return Outcome::ok(to_json(&rows));
    }
    let mut out = String::new();
    writeln!(
        out,
        "{:<40}  {:>4}  {:>8}  {:>8}  stratum",
        "index", "m", "codim_C", "codim_R"
    )
    .unwrap();
    for row in &rows {
        let index = format_index(row);
        let state = if row.empty { "empty" } else { "nonempty" };
        writeln!(
            out,
            "{index:<40}  {:>4}  {:>8}  {:>8}  {state}",
            row.half_index, row.codim_complex, row.codim_real
        )
        .unwrap();
    }
    writeln!(out, "{} indices", rows.len()).unwrap();
    Outcome::ok(out)
}

fn stratum_row(index: &StratumIndex, codim: i64, empty: bool) -> StratumRow {
    StratumRow {
        blocks: index.blocks.iter().map(|b| (b.k, b.m)).collect(),
        matrix: index.matrix.clone(),
        half_index: strata::morse_half_index(index),
        codim_complex: codim,
        codim_real: codim / 2,
        empty,
    }
}

fn format_index(row: &StratumRow) -> String {
    let blocks: Vec<String> = row.blocks.iter().map(|(k, m)| format!("({k},{m})")).collect();
    let matrix: Vec<String> = row
        .matrix
        .iter()
        .map(|r| format!("[{}]", r.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{} {}", blocks.join(""), matrix.join(";"))
}

fn run_quotient(n: usize, weights: Vec<usize>, flavor: FlavorArg, max_degree: usize, format: Format) -> Outcome {
    let flavor = match flavor {
        FlavorArg::Complex => Flavor::Complex,
        FlavorArg::Real => Flavor::Real,
    };
    let spec = match SystemSpec::new(n, weights, flavor) {
        Ok(spec) => spec,
        Err(e) => return Outcome::usage(e),
    };
    match Engine::new().quotient(&spec, Some(max_degree)) {
        Ok(report) => {
            let stdout = render_report(&report, format);
            if report.all_checks_pass() {
                Outcome::ok(stdout)
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                Outcome::invariant(stdout, format!("failed checks: {}", failed.join(", ")))
            }
        }
        Err(e) if e.is_obstruction() => {
            let report = e.report().expect("obstructions carry a report");
            Outcome {
                code: EXIT_OBSTRUCTION,
                stdout: render_report(report, format),
                stderr: format!("obstruction: {e}\n"),
            }
        }
        Err(e @ EngineError::CapTooSmall { .. }) => Outcome::usage(format!("{e}; raise --max-degree")),
        Err(e) => Outcome::invariant(String::new(), e),
    }
}

fn render_report(report: &QuotientReport, format: Format) -> String {
    match format {
        Format::Json => to_json(&report.to_json_model()),
        Format::Csv => match &report.quotient {
            Some(p) => csv_polynomial(p),
            None => csv_series(&report.equivariant),
        },
        Format::Plain => {
            let mut out = String::new();
            let spec = &report.spec;
            let weights: Vec<String> = spec.weights().iter().map(usize::to_string).collect();
            writeln!(
                out,
                "system: n={} weights={} flavor={}",
                spec.rank(),
                weights.join(","),
                spec.flavor()
            )
            .unwrap();
            writeln!(
                out,
                "equivariant (to t^{}): {}",
                report.equivariant.cap(),
                report.equivariant
            )
            .unwrap();
            match &report.quotient {
                Some(p) => writeln!(out, "quotient: {p}").unwrap(),
                None => writeln!(out, "quotient: none").unwrap(),
            }
            writeln!(out, "dimension: {}", report.dimension).unwrap();
            writeln!(
                out,
                "flags: gcdFree={} nOdd={}",
                report.flags.gcd_free, report.flags.n_odd
            )
            .unwrap();
            for check in &report.checks {
                let status = if check.pass { "pass" } else { "FAIL" };
                writeln!(out, "check {}: {status} ({})", check.name, check.detail).unwrap();
            }
            out
        }
    }
}

fn csv_polynomial(p: &Polynomial) -> String {
    csv_rows(p.coeffs().iter().enumerate())
}

fn csv_series(s: &PowerSeries) -> String {
    csv_rows(s.coeffs().iter().enumerate())
}

fn csv_rows<'a>(terms: impl Iterator<Item = (usize, &'a BigRational)>) -> String {
    let mut out = String::from("degree,coefficient\n");
    for (d, c) in terms {
        if !c.is_zero() {
            writeln!(out, "{d},{}", coeff_string(c)).unwrap();
        }
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run_oracle(r: usize, primes: &[u64]) -> Outcome {
    let table = match oracle::count_table(r, primes) {
        Ok(table) => table,
        Err(e @ OracleError::InexactDivision { .. }) => return Outcome::invariant(String::new(), e),
        Err(e) => return Outcome::usage(e),
    };
    let mut out = String::new();
    writeln!(out, "{:>4}  {:>14}  {:>10}", "p", "stable_tuples", "points").unwrap();
    for row in &table.rows {
        writeln!(
            out,
            "{:>4}  {:>14}  {:>10}",
            row.p, row.stable_tuples, row.quotient_points
        )
        .unwrap();
    }
    writeln!(
        out,
        "interpolant (q = p): {}",
        table.interpolant.to_string().replace('t', "q")
    )
    .unwrap();
    Outcome::ok(out)
}

fn run_verify(suite: SuiteArg, max_n: usize, parallel: bool, inject_fault: Option<String>) -> Outcome {
    let suites = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Catalog => vec![Suite::Catalog],
        SuiteArg::Strata => vec![Suite::Strata],
        SuiteArg::Engine => vec![Suite::Engine],
        SuiteArg::Oracle => vec![Suite::Oracle],
    };
    let report = verify::run(&VerifyScope {
        suites,
        max_n,
        parallel,
        inject_fault,
    });
    let rendered = report.render();
    let stdout = if use_color() { colorize(&rendered) } else { rendered };
    if report.all_pass() {
        Outcome::ok(stdout)
    } else {
        Outcome::invariant(stdout, "verification failed")
    }
}

fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

fn colorize(table: &str) -> String {
    table
        .lines()
        .map(|line| {
            if let Some(head) = line.strip_suffix("PASS") {
                format!("{head}\x1b[32mPASS\x1b[0m\n")
            } else if let Some(head) = line.strip_suffix("FAIL") {
                format!("{head}\x1b[31mFAIL\x1b[0m\n")
            } else {
                format!("{line}\n")
            }
        })
        .collect()
}
