use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use obde::harness::{
    self, compare, read_runs_csv, run_experiment, timing_protocol, workers_from_env, write_all,
    write_comparison_csv, write_friedman_csv, ExperimentConfig, PRESETS,
};
use obde::objective::TestFunction;
use obde::obl::OblVariant;
use obde::stats::sci;
use obde::RNG_VERSION;

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "obde", version, about = "Differential evolution with opposition-based learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write run, summary and JSON files.
    Run(RunArgs),
    /// Compare algorithms from a run CSV (Wilcoxon, Hochberg, Friedman).
    Compare(CompareArgs),
    /// Measure T0/T1/T2 and (T2 - T1) / T0 for each algorithm.
    Timing(TimingArgs),
    /// List functions, algorithm presets and opposition variants.
    List,
}

#[derive(Args)]
struct Overrides {
    /// Config file in `key = value` format.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set de.NP=50`. Repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(obde::Error::from).with_context(|| format!("reading {}", p.display()))?;
                ExperimentConfig::from_kv(&text)?
            }
            None => ExperimentConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| obde::Error::Parse(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Output directory.
    #[arg(short, long, default_value = "results")]
    out: PathBuf,
    /// File name stem for the outputs.
    #[arg(long, default_value = "runs")]
    stem: String,
    /// Worker threads (default: OBDE_WORKERS, then all cores).
    #[arg(short, long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Run CSV written by `obde run`.
    input: PathBuf,
    /// Reference algorithm; symbols read from the other algorithms' side.
    #[arg(short, long, default_value = "ibetacobl")]
    reference: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the comparison table here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write the Friedman rank table here.
    #[arg(long)]
    friedman_out: Option<PathBuf>,
}

#[derive(Args)]
struct TimingArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Function name.
    #[arg(short, long, default_value = "shifted-sphere")]
    function: String,
    #[arg(short, long, default_value_t = 50)]
    dim: usize,
    /// Comma-separated presets.
    #[arg(short, long, default_value = "de,ibetacobl,betacobl")]
    algorithms: String,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let workers = match args.workers {
        Some(w) => Some(w),
        None => workers_from_env()?,
    };
    let res = run_experiment(&cfg, workers)?;
    write_all(&args.out, &args.stem, &cfg, &res.records, &res.summary)?;
    say!("{:<32} {:>4} {:<18} {:>5}  MEAN (STD DEV)", "function", "D", "algorithm", "runs");
    for r in &res.summary {
        say!("{:<32} {:>4} {:<18} {:>5}  {}", r.function, r.dimension, r.algorithm, r.runs, r.cell);
    }
    say!(
        "wrote {} records to {}",
        res.records.len(),
        args.out.join(format!("{}.csv", args.stem)).display()
    );
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let file = fs::File::open(&args.input).map_err(obde::Error::from).with_context(|| format!("opening {}", args.input.display()))?;
    let rows = read_runs_csv(file)?;
    let cmp = compare(&rows, &args.reference, args.alpha)?;
    match &args.out {
        Some(p) => write_comparison_csv(&cmp, fs::File::create(p).map_err(obde::Error::from)?)?,
        None => write_comparison_csv(&cmp, std::io::stdout())?,
    }
    if let Some(f) = &cmp.friedman {
        eprintln!(
            "Friedman: chi-square {:.2}, df {}, p {}",
            f.result.chi_square,
            f.result.df,
            sci(f.result.p_value)
        );
        if let Some(p) = &args.friedman_out {
            write_friedman_csv(f, fs::File::create(p).map_err(obde::Error::from)?)?;
        }
    }
    Ok(())
}

fn cmd_timing(args: &TimingArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let problem = TestFunction::from_name(&args.function, args.dim, cfg.problem_seed)?;
    say!("{:<18} {:>10} {:>10} {:>10} {:>12}", "algorithm", "T0 ms", "T1 ms", "T2 ms", "(T2-T1)/T0");
    for name in args.algorithms.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec = cfg.algorithm(name)?;
        let de = cfg.de_config(cfg.base_seed, harness::timing::TIMING_EVALUATIONS)?;
        let strategy = spec.strategy()?;
        let t = timing_protocol(&de, &problem, strategy.as_ref())?;
        say!(
            "{:<18} {:>10.1} {:>10.1} {:>10.1} {:>12.2}",
            name, t.t0_ms, t.t1_ms, t.t2_ms, t.complexity
        );
    }
    Ok(())
}

fn cmd_list() {
    say!("functions:");
    for f in TestFunction::registry_names() {
        say!("  {f}");
    }
    say!("algorithms:");
    for p in PRESETS {
        say!("  {p}");
    }
    say!("opposition variants:");
    for v in OblVariant::ALL {
        say!("  {v}");
    }
    say!("rng: {RNG_VERSION}");
}

fn category(e: &anyhow::Error) -> &'static str {
    e.chain()
        .find_map(|c| c.downcast_ref::<obde::Error>())
        .map_or("cli", obde::Error::category)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Timing(a) => cmd_timing(a),
        Command::List => {
            cmd_list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e:#}", category(&e));
            ExitCode::FAILURE
        }
    }
}
