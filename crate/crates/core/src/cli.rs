//! The `mixed-shor` command-line front end.
//!
//! Every subcommand writes one report to stdout, or to `--output`. JSON is
//! the default except for `dist`, which defaults to a `c,probability` CSV.
//! Exit codes: 0 on success, 1 on a domain failure (factoring budget
//! exhausted, a failed `verify` check), 2 on invalid arguments.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::densmat::{negativity_scan, NptEntry};
use crate::error::Error;
use crate::numtheory::gcd;
use crate::orbits::{decompose, theorem1_count, theorem1_sweep};
use crate::pipeline::{factor, repetition_experiment, write_stats_csv, FactorOptions, Instance};
use crate::qpe::{
    analytic_distribution, choose_l, empirical_distribution, l_in_standard_range, sample_shot,
    statevector_run, Distribution, ShotEngine,
};
use crate::rng::stream;
use crate::verify::{self, Check, VerifyConfig};

/// Environment variable supplying the default `--seed`.
pub const SEED_ENV: &str = "MIXED_SHOR_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "mixed-shor",
    version,
    about = "Shor order finding with a maximally mixed register"
)]
struct Cli {
    /// RNG seed; every shot and trial derives its own stream from it.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Output format; defaults to csv for `dist`, json elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Analytic,
    Statevector,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Eigenphase,
    Trajectory,
    Auto,
}

impl From<Engine> for ShotEngine {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Eigenphase => ShotEngine::Eigenphase,
            Engine::Trajectory => ShotEngine::Trajectory,
            Engine::Auto => ShotEngine::Auto,
        }
    }
}

#[derive(Debug, Args)]
struct LArgs {
    /// Control rounds; defaults to the smallest L with N^2 < 2^L.
    #[arg(long = "L")]
    l: Option<u32>,
    /// Accept an L with 2^L outside (N^2, 2N^2).
    #[arg(long)]
    allow_small_t: bool,
}

impl LArgs {
    fn resolve(&self, n: u64) -> Result<u32, Error> {
        match self.l {
            None => Ok(choose_l(n)),
            Some(l) if l == 0 || l >= 63 => {
                Err(Error::InvalidArgument(format!("L={l} is out of range")))
            }
            Some(l) if !self.allow_small_t && !l_in_standard_range(n, l) => {
                Err(Error::InvalidArgument(format!(
                    "2^{l} is outside (N^2, 2N^2) for N={n}; pass --allow-small-t to override"
                )))
            }
            Some(l) => Ok(l),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cycle decomposition of x -> a*x mod N.
    Orbits {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
    },
    /// Short-period residue counts against p+q-1: one instance with --p/--q,
    /// otherwise every semiprime below --max.
    Theorem1 {
        #[arg(long, requires = "q")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        q: Option<u64>,
        /// Single base; all coprime bases when absent.
        #[arg(long, requires = "p")]
        a: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        max: u64,
    },
    /// Outcome distribution of c.
    Dist {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[command(flatten)]
        l: LArgs,
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
        /// Shots for --mode sample.
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Individual shots through the recycled-qubit circuit.
    Sample {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[command(flatten)]
        l: LArgs,
        #[arg(long, default_value_t = 10)]
        shots: u64,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Factor N end to end.
    Factor {
        #[arg(long)]
        n: u64,
        /// Fixed base; drawn at random when absent.
        #[arg(long)]
        a: Option<u64>,
        /// Shot budget; defaults to 64 * ceil(N/phi(N) * ln ln N).
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        l: LArgs,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Repetition statistics over many factoring trials.
    Bench {
        /// Instance p,q,a (repeatable); a default family when absent.
        #[arg(long = "instance", value_parser = parse_instance)]
        instances: Vec<Instance>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Partial-transpose minimum eigenvalues along the L'-qubit circuit.
    Npt {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        /// Control qubits L'.
        #[arg(long, default_value_t = 2)]
        controls: u32,
        /// Circuit step to scan (repeatable); all steps when absent.
        #[arg(long = "step")]
        steps: Vec<usize>,
        /// Qubit bitmask to transpose (repeatable); every bipartition when absent.
        #[arg(long = "cut")]
        cuts: Vec<u64>,
    },
    /// Run the invariant suite; exits 1 if any check fails.
    Verify {
        /// Minimum shots per sampler comparison.
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Exclusive bound of the semiprime sweep.
        #[arg(long, default_value_t = 1000)]
        max: u64,
    },
}

const DEFAULT_BENCH: [Instance; 6] = [
    Instance { p: 3, q: 5, a: 2 },
    Instance { p: 3, q: 5, a: 7 },
    Instance { p: 3, q: 7, a: 2 },
    Instance { p: 5, q: 7, a: 2 },
    Instance { p: 5, q: 11, a: 2 },
    Instance { p: 7, q: 13, a: 2 },
];

fn parse_instance(s: &str) -> Result<Instance, String> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [p, q, a] => Ok(Instance { p, q, a }),
        _ => Err(format!("expected p,q,a, got {s:?}")),
    }
}

/// A finished report plus whether it records a domain failure.
struct Report {
    body: Vec<u8>,
    failed: bool,
}

impl Report {
    fn ok(body: Vec<u8>) -> Self {
        Report {
            body,
            failed: false,
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolation(_) => Failure::Domain(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Domain(format!("csv: {e}"))
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Failure::Domain(e.to_string()))
}

#[derive(Serialize)]
struct DistReport<'a> {
    #[serde(rename = "N")]
    n: u64,
    a: u64,
    #[serde(rename = "L")]
    l: u32,
    t: u64,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    probs: &'a [f64],
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OrbitRow {
    leader: u64,
    period: u64,
    members: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Theorem1Row {
    #[serde(rename = "N")]
    n: u64,
    a: u64,
    count: u64,
    bound: u64,
}

#[derive(Serialize)]
struct ShotRow {
    g: u64,
    d: usize,
    j: Option<u64>,
    bits: String,
    c: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NptJson<'a> {
    #[serde(rename = "N")]
    n: u64,
    a: u64,
    controls: u32,
    entries: &'a [NptEntry],
    strongest: Option<&'a NptEntry>,
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let format = cli.format;
    let is_csv = |default: Format| format.unwrap_or(default) == Format::Csv;
    let seed = cli.seed;
    match &cli.command {
        Command::Orbits { n, a } => {
            let table = decompose(*n, *a)?;
            if is_csv(Format::Json) {
                let rows: Vec<OrbitRow> = table
                    .orbits()
                    .iter()
                    .map(|o| OrbitRow {
                        leader: o.leader,
                        period: o.period,
                        members: o
                            .members
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join(" "),
                    })
                    .collect();
                return Ok(Report::ok(csv_rows(&rows)?));
            }
            Ok(Report::ok(json(&table)))
        }
        Command::Theorem1 { p, q, a, max } => match (p, q) {
            (Some(p), Some(q)) => {
                let n = p * q;
                let bases: Vec<u64> = match a {
                    Some(a) => vec![*a],
                    None => (2..n).filter(|&b| gcd(b, n) == 1).collect(),
                };
                let rows = bases
                    .iter()
                    .map(|&b| {
                        Ok(Theorem1Row {
                            n,
                            a: b,
                            count: theorem1_count(*p, *q, b)?,
                            bound: p + q - 1,
                        })
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                Ok(Report::ok(if is_csv(Format::Json) {
                    csv_rows(&rows)?
                } else {
                    json(&rows)
                }))
            }
            _ => {
                let sweep = theorem1_sweep(*max);
                Ok(Report {
                    failed: !sweep.violations.is_empty(),
                    body: json(&sweep),
                })
            }
        },
        Command::Dist {
            n,
            a,
            l,
            mode,
            shots,
            engine,
        } => {
            let l = l.resolve(*n)?;
            let table = decompose(*n, *a)?;
            let (dist, label, shots) = match mode {
                Mode::Analytic => (analytic_distribution(&table, l)?, "analytic", None),
                Mode::Statevector => {
                    let mut total = Distribution {
                        t: 1 << l,
                        probs: vec![0.0; 1 << l],
                    };
                    for orbit in table.orbits() {
                        let part = statevector_run(orbit, l)?;
                        let w = orbit.period as f64 / *n as f64;
                        total
                            .probs
                            .iter_mut()
                            .zip(&part.probs)
                            .for_each(|(x, p)| *x += w * p);
                    }
                    (total, "statevector", None)
                }
                Mode::Sample => (
                    empirical_distribution(&table, l, (*engine).into(), *shots, seed)?,
                    "sample",
                    Some(*shots),
                ),
            };
            if is_csv(Format::Csv) {
                let mut body = Vec::new();
                dist.write_csv(&mut body)?;
                return Ok(Report::ok(body));
            }
            Ok(Report::ok(json(&DistReport {
                n: *n,
                a: *a,
                l,
                t: dist.t,
                mode: label,
                shots,
                probs: &dist.probs,
            })))
        }
        Command::Sample {
            n,
            a,
            l,
            shots,
            engine,
        } => {
            let l = l.resolve(*n)?;
            let table = decompose(*n, *a)?;
            let engine: ShotEngine = (*engine).into();
            let drawn: Vec<_> = (0..*shots)
                .into_par_iter()
                .map(|i| sample_shot(&table, l, engine, &mut stream(seed, i)))
                .collect();
            if is_csv(Format::Json) {
                let rows: Vec<ShotRow> = drawn
                    .iter()
                    .map(|s| ShotRow {
                        g: s.g,
                        d: s.d,
                        j: s.label.map(|x| x.j),
                        bits: s.shot.bits.iter().map(|b| char::from(b'0' + b)).collect(),
                        c: s.shot.c,
                    })
                    .collect();
                return Ok(Report::ok(csv_rows(&rows)?));
            }
            let mut body = Vec::new();
            for s in &drawn {
                body.extend_from_slice(s.to_json_line().as_bytes());
                body.push(b'\n');
            }
            Ok(Report::ok(body))
        }
        Command::Factor {
            n,
            a,
            budget,
            l,
            engine,
        } => {
            let options = FactorOptions {
                a: *a,
                budget: *budget,
                l: l.l,
                allow_small_t: l.allow_small_t,
                engine: (*engine).into(),
                skip_classical_guards: false,
            };
            let attempt = factor(*n, &options, seed)?;
            Ok(Report {
                failed: !attempt.succeeded(),
                body: json(&attempt),
            })
        }
        Command::Bench {
            instances,
            trials,
            engine,
        } => {
            let instances = if instances.is_empty() {
                &DEFAULT_BENCH[..]
            } else {
                &instances[..]
            };
            let stats = repetition_experiment(instances, *trials, seed, (*engine).into())?;
            if is_csv(Format::Json) {
                let mut body = Vec::new();
                write_stats_csv(&stats, &mut body)?;
                return Ok(Report::ok(body));
            }
            Ok(Report::ok(json(&stats)))
        }
        Command::Npt {
            n,
            a,
            controls,
            steps,
            cuts,
        } => {
            let steps = (!steps.is_empty()).then_some(&steps[..]);
            let cuts = (!cuts.is_empty()).then_some(&cuts[..]);
            let report = negativity_scan(*n, *a, *controls, steps, cuts)?;
            if is_csv(Format::Json) {
                return Ok(Report::ok(csv_rows(&report.entries)?));
            }
            Ok(Report::ok(json(&NptJson {
                n: *n,
                a: *a,
                controls: *controls,
                entries: &report.entries,
                strongest: report.strongest(),
            })))
        }
        Command::Verify { shots, max } => {
            let checks = verify::run_all(&VerifyConfig {
                shots: *shots,
                theorem1_max: *max,
                seed,
            });
            let failed = checks.iter().any(|c| !c.passed);
            let body = match format {
                Some(Format::Json) => json(&checks),
                Some(Format::Csv) => csv_rows(&checks)?,
                None => verify_text(&checks),
            };
            Ok(Report { body, failed })
        }
    }
}

fn verify_text(checks: &[Check]) -> Vec<u8> {
    let mut out = String::new();
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out.into_bytes()
}

/// Parses `argv` (program name first), runs the command and writes the
/// report to `out` or the `--output` file. Diagnostics go to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };

    let outcome = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Failure::Domain(format!("thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 1;
        }
    };

    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report.body),
        None => out.write_all(&report.body).and_then(|_| out.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing report: {e}");
        return 1;
    }
    i32::from(report.failed)
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
