#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod manifest;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use manifest::{sha256_hex, Manifest};
use output::{json_text, Format, Report};

/// Exit statuses.
const EXIT_USAGE: u8 = 1;
const EXIT_CAPABILITY: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "spinglass",
    version,
    about = "Numerical laboratory for mean-field spin glasses",
    after_help = "Exit status: 0 success, 1 usage or invalid argument, 2 capability limit \
                  (e.g. n too large for exact methods), 3 numerical failure, 4 oracle check failed.\n\
                  Numbers are written with 17 significant digits. With --out, a manifest with the \
                  config echo, version, wall time and SHA-256 checksums is written to \
                  <out>.manifest.json unless --manifest is given."
)]
pub struct Cli {
    /// Master seed for every stochastic step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; tables default to csv, documents to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Manifest path
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Phase diagram on a (beta, lambda) grid. Columns: beta,lambda,phase,b,q,psi
    PhaseDiagram(PhaseDiagramArgs),
    /// Replica-symmetric stationary point. Columns: model,k,beta,lambda,h,b,q,psi
    FixedPoint(FixedPointArgs),
    /// Annealed complexity S(x) of critical points. Columns: x,S
    Complexity(ComplexityArgs),
    /// Monasson complexity curve at temperature T. Columns: m,f,sigma
    Monasson(MonassonArgs),
    /// Parisi functional minimised over measures with a given number of atoms (JSON)
    Parisi(ParisiArgs),
    /// Bayes AMP against state evolution. Columns: t,a_t,q_t,empirical_overlap,empirical_sqnorm
    AmpSim(AmpArgs),
    /// Max-cut on a random or given graph (JSON)
    Maxcut(MaxcutArgs),
    /// Exact-enumeration and Poisson-process checks with a pass/fail verdict (JSON)
    OracleCheck(OracleArgs),
}

/// Closed interval "lo:hi", or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("range ends must be finite".into());
    }
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(Range { lo, hi })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    PspinK2,
    Sk,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseDiagramArgs {
    #[arg(long, value_enum)]
    pub model: PhaseModel,
    /// Inverse temperature, "lo:hi" or a single value
    #[arg(long, value_parser = parse_range)]
    pub beta: Range,
    /// Signal strength, "lo:hi" or a single value
    #[arg(long, value_parser = parse_range)]
    pub lambda: Range,
    /// Points per non-degenerate axis
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedModel {
    Pspin,
    Sk,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchArg {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Args, Serialize)]
pub struct FixedPointArgs {
    #[arg(long, value_enum)]
    pub model: FixedModel,
    /// Tensor order (pspin only)
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// Stationary branch (pspin only)
    #[arg(long, value_enum, default_value_t = BranchArg::Nontrivial)]
    pub branch: BranchArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MonassonArgs {
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    /// Temperature T
    #[arg(long)]
    pub temperature: f64,
    /// Samples of the Parisi parameter m in (m_min(T), 1]
    #[arg(long, default_value_t = 100)]
    pub m_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ParisiArgs {
    #[arg(long)]
    pub beta: f64,
    /// Number of atoms of the order parameter
    #[arg(long, default_value_t = 3)]
    pub atoms: usize,
    /// Half-width of the PDE grid (default chosen from beta)
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Odd number of PDE grid points (default chosen from beta)
    #[arg(long)]
    pub nx: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct AmpArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 1.5)]
    pub lambda: f64,
    /// Side-information strength
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    /// Iterations T
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Erdős–Rényi with average degree d
    Er,
    /// Uniform d-regular (configuration model)
    Regular,
    /// Edge list read from --input
    File,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Brute,
    LocalSearch,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct MaxcutArgs {
    #[arg(long, value_enum, default_value_t = GraphKind::Er)]
    pub graph: GraphKind,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Average degree
    #[arg(long, default_value_t = 4.0)]
    pub d: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    pub method: MethodArg,
    /// Local-search restarts
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Edge list ("u v" per line, 0-indexed) for --graph file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Also write the graph as an edge list
    #[arg(long)]
    pub write_graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    /// MC mean of (1/n) log Z against the RS bound
    Guerra,
    /// d/dh of the free energy against the magnetisation
    HDerivative,
    /// I-MMSE relation in the spiked model
    Immse,
    /// E[sum w^2] = 1 - m for Poisson-Dirichlet weights
    PdWeights,
    /// Invariance of the Poisson process under Gaussian marks
    PppShift,
    /// Law of the largest Poisson point
    PppMax,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub check: CheckName,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Parisi parameter for the Poisson-process checks
    #[arg(long)]
    pub m: Option<f64>,
    /// Mark standard deviation for ppp-shift
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of Poisson points kept
    #[arg(long)]
    pub points: Option<usize>,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<spinglass::Error> for Failure {
    fn from(e: spinglass::Error) -> Self {
        use spinglass::Error as E;
        let code = match e {
            E::Capability(_) => EXIT_CAPABILITY,
            E::InvalidArgument(_) | E::Grid(_) | E::Truncation(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced: the main report, extra files, and whether
/// every requested check passed.
pub struct Produced {
    pub report: Report,
    pub extra_files: Vec<(PathBuf, String)>,
    pub checks_passed: bool,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::PhaseDiagram(_) => "phase-diagram",
        Command::FixedPoint(_) => "fixed-point",
        Command::Complexity(_) => "complexity",
        Command::Monasson(_) => "monasson",
        Command::Parisi(_) => "parisi",
        Command::AmpSim(_) => "amp-sim",
        Command::Maxcut(_) => "maxcut",
        Command::OracleCheck(_) => "oracle-check",
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    match threads {
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        #[cfg(feature = "parallel")]
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot configure thread pool: {e}"))),
        _ => Ok(()),
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    configure_threads(cli.threads)?;
    let start = Instant::now();
    let produced = commands::run(&cli.command, cli.seed)?;
    let format = cli.format.unwrap_or(match produced.report {
        Report::Table(_) => Format::Csv,
        Report::Doc(_) => Format::Json,
    });
    let text = produced.report.render(format);
    let mut outputs = Vec::new();
    for (path, body) in &produced.extra_files {
        write_file(path, body)?;
        outputs.push((path.display().to_string(), sha256_hex(body.as_bytes())));
    }
    match &cli.out {
        Some(path) => {
            write_file(path, &text)?;
            outputs.push((path.display().to_string(), sha256_hex(text.as_bytes())));
        }
        None => print!("{text}"),
    }
    let manifest_path = cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        if cli.out.is_none() {
            outputs.push(("<stdout>".into(), sha256_hex(text.as_bytes())));
        }
        let m = Manifest {
            command: command_name(&cli.command).into(),
            argv: std::env::args().collect(),
            config: serde_json::to_value(cli).expect("serialisable config"),
            seed: cli.seed,
            threads: cli.threads,
            wall_time: start.elapsed().as_secs_f64(),
            outputs,
        };
        write_file(&path, &json_text(&m.to_json()))?;
    }
    Ok(produced.checks_passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
