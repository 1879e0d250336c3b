//! The `sts` command line: argument parsing, dispatch, exit codes and run
//! manifests. Commands return their report as a string so they can be
//! driven in-process.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use sts_core::Error;

mod commands;
pub mod demos;
pub mod report;

pub use report::{Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PROPERTY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sts", version, about = "Closure, spreading and saturating sets in Steiner triple systems")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a system and write it in the text format.
    Construct(ConstructArgs),
    /// Run an analysis on a system file.
    Analyze {
        #[arg(long)]
        system: PathBuf,
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
    /// Spreading-set searches on a system file.
    Spread {
        #[command(subcommand)]
        what: SpreadCmd,
        #[arg(long, global = true)]
        system: Option<PathBuf>,
    },
    /// Saturating sets and hyperplane counting in PG(n,2).
    Saturate {
        #[command(subcommand)]
        what: SaturateCmd,
    },
    /// Embed a partial system into a Steiner system of the given order.
    Embed(EmbedArgs),
    /// End-to-end checks of the main results.
    Demo {
        #[command(subcommand)]
        what: DemoCmd,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    Pg2,
    Ag3,
    Sts15Free,
    PerturbedPg,
    Section4,
    Random,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Output file; a `.labels` sidecar and a `.manifest` are written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    Closure {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        set: Vec<usize>,
        #[arg(long)]
        trace: bool,
    },
    Spread {
        #[command(subcommand)]
        what: SpreadCmd,
    },
    /// Nontrivial closed sets.
    Subsystems {
        #[arg(long, default_value_t = sts_core::closure::DEFAULT_CLOSED_SET_BUDGET)]
        budget: usize,
    },
    Projective,
    /// Closed-set dimension checks on a tagged PG(d,2).
    Dimension {
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    Saturate {
        #[command(subcommand)]
        what: AnalyzeSaturateCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpreadCmd {
    Greedy {
        /// Starting pair, default `0,1`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        pair: Option<Vec<usize>>,
    },
    Min,
    Enumerate {
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    Projective,
    /// Full-subset minimality check of a set.
    Minimal {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        set: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeSaturateCmd {
    Min,
    Check {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        set: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SaturateCmd {
    /// Exhaustive minimum saturating set of PG(dim,2).
    Min {
        #[arg(long)]
        dim: usize,
    },
    Bounds {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
    },
    Variance {
        #[arg(long)]
        n: usize,
        /// Check this set instead of random ones.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        set: Option<Vec<usize>>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    Extremes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Target order.
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Allow a target order below 2u + 1.
    #[arg(long)]
    pub allow_small: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub moves: u64,
}

#[derive(Debug, Subcommand)]
pub enum DemoCmd {
    /// Greedy spreading sets stay within floor(log2(n + 1)).
    Maxofmin {
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
    },
    /// Minimum spreading size log2(n + 1) exactly for projective spaces.
    Unicity {
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// A perturbed projective space has a minimal spreading set one short of the maximum.
    Almostmax {
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
    /// A Steiner system with minimal spreading sets of sizes 3 and n.
    TwoSizes {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 3)]
        max_orders: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperplane intersection variance identity in PG(n,2).
    Szoras {
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Saturating-set bounds and exhaustive minima.
    Bounds {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
}

/// What a command produced: the report, files it wrote, and files it read.
pub struct Output {
    pub report: Report,
    pub code: i32,
    pub written: Vec<(PathBuf, String)>,
    pub inputs: Vec<PathBuf>,
}

impl Output {
    fn new(report: Report) -> Self {
        let code = if report.all_checks_pass() { EXIT_OK } else { EXIT_PROPERTY };
        Output {
            report,
            code,
            written: Vec::new(),
            inputs: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                Error::SearchExhausted(_) | Error::BudgetExhausted(_) | Error::NoTriangleAlignment => EXIT_BUDGET,
                _ => EXIT_VALIDATION,
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => format!("error: {e}"),
            CliError::Io(m) => format!("error: {m}"),
            CliError::Usage(m) => format!("usage error: {m}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let started = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => return failure(CliError::Usage(format!("cannot start {} workers: {e}", cli.jobs))),
    };
    let result = pool.install(|| dispatch(&cli));
    let mut out = match result {
        Ok(out) => out,
        Err(e) => return failure(e),
    };
    let stdout = out.report.render(cli.format);
    let mut stderr = String::new();
    for (path, contents) in &out.written {
        if let Err(e) = fs::write(path, contents) {
            return failure(CliError::Io(format!("cannot write {}: {e}", path.display())));
        }
    }
    let manifest_path = cli.manifest.clone().or_else(|| match &cli.command {
        Command::Construct(ConstructArgs { out: Some(p), .. }) => Some(with_suffix(p, "manifest")),
        _ => None,
    });
    if let Some(path) = manifest_path {
        let text = manifest(&args, &cli, &out, &stdout, started);
        if let Err(e) = fs::write(&path, text) {
            stderr.push_str(&format!("warning: cannot write manifest {}: {e}\n", path.display()));
            out.code = out.code.max(EXIT_VALIDATION);
        }
    }
    Outcome {
        code: out.code,
        stdout,
        stderr,
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome {
        code: e.code(),
        stdout: String::new(),
        stderr: format!("{}\n", e.message()),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Construct(a) => commands::construct(a, cli.seed),
        Command::Analyze { system, what } => commands::analyze(system, what, cli.seed),
        Command::Spread { what, system } => {
            let path = system
                .as_ref()
                .ok_or_else(|| CliError::Usage("spread needs --system <FILE>".into()))?;
            let (ts, inputs) = commands::load(path)?;
            let mut out = commands::spread(&ts, what)?;
            out.inputs = inputs;
            Ok(out)
        }
        Command::Saturate { what } => commands::saturate(what, cli.seed),
        Command::Embed(a) => commands::embed(a, cli.seed),
        Command::Demo { what } => demos::run_demo(what, cli.seed),
    }
}

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Result digest: the report followed by every written file, in order.
pub fn result_digest(stdout: &str, written: &[(PathBuf, String)]) -> String {
    let mut h = Sha256::new();
    h.update(stdout.as_bytes());
    for (_, contents) in written {
        h.update(contents.as_bytes());
    }
    format!("{:x}", h.finalize())
}

fn manifest(args: &[OsString], cli: &Cli, out: &Output, stdout: &str, started: Instant) -> String {
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut m = String::new();
    m.push_str(&format!("command={}\n", command.join(" ")));
    m.push_str(&format!("seed={}\n", cli.seed));
    m.push_str(&format!("version=sts {}\n", env!("CARGO_PKG_VERSION")));
    for path in &out.inputs {
        let digest = fs::read(path).map(|b| sha256_hex(&b)).unwrap_or_else(|_| "unreadable".into());
        m.push_str(&format!("input={} sha256:{digest}\n", path.display()));
    }
    for (path, _) in &out.written {
        m.push_str(&format!("output={}\n", path.display()));
    }
    m.push_str(&format!("elapsed_ms={}\n", started.elapsed().as_millis()));
    m.push_str(&format!("exit={}\n", out.code));
    m.push_str(&format!("result_sha256={}\n", result_digest(stdout, &out.written)));
    m
}
