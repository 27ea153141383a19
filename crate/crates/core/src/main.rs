use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use whitney_lab::harness::{emit, run_suite, ExperimentConfig, HarnessError, OutputFormat, Suite};

const THREADS_ENV: &str = "WHITNEY_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "whitney-lab", version, about = "Whitney and Johnen-type inequality checks on coordinate boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Best approximation against Omega and W over box shrinks.
    Whitney(RunArgs),
    /// K-functional brackets over a t sweep.
    Johnen(RunArgs),
    /// Taylor remainder against its bound over box shrinks.
    Taylor(RunArgs),
    /// Derivative-inequality and subdivision constants.
    Lemma21(RunArgs),
    /// Single modulus evaluation.
    Modulus(RunArgs),
    /// Single best-approximation evaluation.
    Bestapprox(RunArgs),
    /// Single K-functional bracket.
    Kfunc(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's output path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads for row-level parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Command {
    fn split(self) -> (Suite, RunArgs) {
        match self {
            Command::Whitney(a) => (Suite::Whitney, a),
            Command::Johnen(a) => (Suite::Johnen, a),
            Command::Taylor(a) => (Suite::Taylor, a),
            Command::Lemma21(a) => (Suite::Lemma21, a),
            Command::Modulus(a) => (Suite::Modulus, a),
            Command::Bestapprox(a) => (Suite::Bestapprox, a),
            Command::Kfunc(a) => (Suite::Kfunc, a),
        }
    }
}

fn format_for(args: &RunArgs, cfg: &ExperimentConfig, out: Option<&Path>) -> OutputFormat {
    if let Some(f) = args.format {
        return f;
    }
    if let Some(f) = cfg.output.as_ref().and_then(|o| o.format) {
        return f;
    }
    match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    }
}

fn jobs(args: &RunArgs) -> Result<Option<usize>, HarnessError> {
    if let Some(n) = args.jobs {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Config(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(suite: Suite, args: RunArgs) -> Result<ExitCode, HarnessError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone()));
    let format = format_for(&args, &cfg, out.as_deref());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs(&args)? {
        if n == 0 {
            return Err(HarnessError::Config("--jobs must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    info!("running {} with {} threads", suite.name(), pool.current_num_threads());
    let output = pool.install(|| run_suite(suite, &cfg));
    emit(&output.rows, format, out.as_deref())?;
    if output.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &output.violations {
            error!("{v}");
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (suite, args) = cli.command.split();
    match run(suite, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("whitney-lab: {e}");
            ExitCode::from(2)
        }
    }
}
