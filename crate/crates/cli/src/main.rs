//! `contraction-kit`: exact verification, reductions, metric synthesis and
//! power-iteration analysis from the command line.
//!
//! Exit codes: 0 pass or solved, 1 violation or reject, 2 input error.

mod commands;
mod power_cmd;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::RunReport;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "contraction-kit", version, about)]
struct Cli {
    /// Worker threads for pair and sample suites (output order is fixed)
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Grid resolution r of the brute-force solver, points {0, 1/r, .., 1}^3
    #[arg(long, global = true, default_value_t = 16)]
    grid: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Also write a JSON run report to this path
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a circuit file on rational inputs
    Eval {
        circuit: PathBuf,
        /// Input values, e.g. `1/2 0 3`
        #[arg(allow_hyphen_values = true)]
        inputs: Vec<String>,
    },
    /// Emit a power or interpolation circuit
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Check a claimed solution against an instance
    Verify { instance: PathBuf, solution: PathBuf },
    /// Reduce an instance and write the target plus a provenance sidecar
    Reduce(ReduceArgs),
    /// Search the grid for a verified solution
    Solve {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Map a target solution back to the source instance of a reduction
    Backmap {
        source: PathBuf,
        provenance: PathBuf,
        solution: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build and certify a contraction metric for a finite self-map
    Synthesize {
        selfmap: PathBuf,
        #[arg(long)]
        c: String,
        #[arg(long)]
        eps: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Power iteration: eigen-metric certificate, lp counterexample, iteration bound
    Power {
        #[command(subcommand)]
        action: PowerAction,
    },
    /// Run the basic iterative procedure
    Bip(BipArgs),
}

#[derive(Subcommand)]
enum BuildKind {
    /// Circuit computing c^k for integer inputs k in [0, max_exp]
    Power {
        #[arg(long)]
        c: String,
        #[arg(long)]
        max_exp: u64,
    },
    /// One-input circuit for the interpolated power B(w) on [-magnitude, 0]
    Interpolation {
        #[arg(long)]
        c: String,
        #[arg(long)]
        magnitude: String,
        #[arg(long, value_enum, default_value_t = Rule::Printed)]
        rule: Rule,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Printed,
    Chord,
}

impl From<Rule> for contraction_kit::circuit::InterpolationRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Printed => Self::Printed,
            Rule::Chord => Self::Chord,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    BanachToClsLocal,
    ClsLocalToBanach,
}

#[derive(Args)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub direction: DirectionArg,
    pub instance: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Build the hardness metric for eps/2 so back-mapped points meet eps
    #[arg(long)]
    pub halve_eps: bool,
    #[arg(long, value_enum, default_value_t = Rule::Printed)]
    pub rule: Rule,
}

#[derive(Subcommand)]
pub enum PowerAction {
    /// Eigenpairs plus a contraction certificate on random unit pairs
    Analyze {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
    /// Expanding pair for diag(2, 1) under an lp norm
    Counterexample {
        #[arg(long, default_value = "2")]
        norm: String,
    },
    /// Predicted step count and the verified trace
    Bound {
        matrix: PathBuf,
        /// Start vector; normalized before use
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Args)]
pub struct BipArgs {
    /// Instance file, or a finite self-map with --selfmap
    pub input: PathBuf,
    #[arg(long)]
    pub selfmap: bool,
    /// Start point: a triple for circuit instances, a label for self-maps
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Contraction factor for the predicted budget. Self-maps synthesize
    /// their metric with it; circuit instances assume d already contracts.
    #[arg(long)]
    pub budget_c: Option<String>,
}

pub struct Ctx {
    pub report: RunReport,
    pub format: Format,
    pub grid: u32,
    pub seed: u64,
}

fn run(cli: Cli, ctx: &mut Ctx) -> anyhow::Result<u8> {
    match cli.command {
        Command::Eval { circuit, inputs } => commands::eval(ctx, &circuit, &inputs),
        Command::Build { kind } => match kind {
            BuildKind::Power { c, max_exp } => commands::build_power(ctx, &c, max_exp),
            BuildKind::Interpolation { c, magnitude, rule } => {
                commands::build_interpolation(ctx, &c, &magnitude, rule.into())
            }
        },
        Command::Verify { instance, solution } => commands::verify(ctx, &instance, &solution),
        Command::Reduce(args) => commands::reduce(ctx, &args),
        Command::Solve { instance, out } => commands::solve(ctx, &instance, out.as_deref()),
        Command::Backmap {
            source,
            provenance,
            solution,
            out,
        } => commands::backmap(ctx, &source, &provenance, &solution, out.as_deref()),
        Command::Synthesize { selfmap, c, eps, out } => commands::synthesize(ctx, &selfmap, &c, &eps, out.as_deref()),
        Command::Power { action } => power_cmd::power(ctx, action),
        Command::Bip(args) => commands::bip(ctx, &args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match std::env::var("CONTRACTION_KIT_SEED") {
        Ok(s) => match s.trim().parse() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("error: CONTRACTION_KIT_SEED must be an unsigned integer, got {s:?}");
                return ExitCode::from(2);
            }
        },
        Err(_) => 0,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let report_path = cli.report.clone();
    let mut ctx = Ctx {
        report: RunReport::new(std::env::args()),
        format: cli.format,
        grid: cli.grid.max(1),
        seed,
    };
    let code = match run(cli, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ctx.report.result = serde_json::json!({ "error": format!("{e:#}") });
            2
        }
    };
    ctx.report.exit_code = code;
    if let Some(path) = report_path {
        if let Err(e) = ctx.report.write(&path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
