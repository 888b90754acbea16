use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use spinprep::config::{ConfigFile, ExperimentConfig, Method, MitigationArg, ShotsArg, System};
use spinprep::error::{CliError, EXIT_CONFIG, Result};
use spinprep::output::emit;
use spinprep::pipeline::{cmd_gatecount, cmd_list, cmd_measure, cmd_optimize, cmd_prepare, cmd_tomo, parse_range};

/// Prepare, optimize and benchmark total-spin eigenstate circuits.
///
/// Exit status: 0 on success, 1 when output cannot be written, 2 for invalid
/// flags, config, labels or noise files, 3 for numerical failures.
#[derive(Parser)]
#[command(name = "spinprep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every coupling labeling and projection of a system.
    List {
        #[arg(long)]
        system: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build circuits and report gate counts, fidelity and spin expectations.
    Prepare(ExperimentArgs),
    /// Run the variational optimizer and report every restart.
    Optimize(ExperimentArgs),
    /// Estimate spin observables with raw, em, re and em_re estimators.
    Measure(ExperimentArgs),
    /// Reconstruct prepared states by tomography.
    Tomo(ExperimentArgs),
    /// Compare the gate-count model with compiled chain circuits.
    Gatecount {
        /// Inclusive qubit range such as `2..6`.
        #[arg(long, default_value = "2..6")]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON file with the same field names as these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `chain-N` or `bowtie-5`.
    #[arg(long)]
    system: Option<String>,
    /// Labels such as `l01=1,l=3/2,m=-1/2`; all states when absent.
    #[arg(long)]
    target: Option<String>,
    /// `erc`, `vqe-ry` or `vqe-timeevo`.
    #[arg(long)]
    method: Option<String>,
    /// Ansatz layer count.
    #[arg(long)]
    depth: Option<usize>,
    /// Repetitions of shot-based estimates, for standard errors.
    #[arg(long)]
    reps: Option<usize>,
    /// Noise model JSON; the bundled default when absent.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Shot count per setting, or `exact`.
    #[arg(long)]
    shots: Option<String>,
    /// CNOT fold levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Readout mitigation.
    #[arg(long, overrides_with = "no_em")]
    em: bool,
    #[arg(long)]
    no_em: bool,
    /// Richardson extrapolation.
    #[arg(long, overrides_with = "no_re")]
    re: bool,
    #[arg(long)]
    no_re: bool,
    /// `cls` or `inversion`.
    #[arg(long)]
    mitigation: Option<String>,
    /// CSV path; a `.json` sidecar is written next to it. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn flag(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

impl ExperimentArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            system: self.system,
            target: self.target,
            method: self.method.as_deref().map(str::parse::<Method>).transpose()?,
            depth: self.depth,
            reps: self.reps,
            noise: self.noise,
            shots: self.shots.as_deref().map(str::parse::<ShotsArg>).transpose()?,
            ks: self.ks,
            seed: self.seed,
            restarts: self.restarts,
            em: flag(self.em, self.no_em),
            re: flag(self.re, self.no_re),
            mitigation: self.mitigation.as_deref().map(str::parse::<MitigationArg>).transpose()?,
            out: self.out,
        };
        ExperimentConfig::resolve(base.overlay(flags))
    }
}

fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("SPINPREP_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.parse().map_err(|_| CliError::config(format!("SPINPREP_THREADS must be a count, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::List { system, out } => {
            let system: System = system.parse()?;
            let config = json!({ "system": system.to_string() });
            emit("list", &config, None, &cmd_list(system)?, out.as_deref())
        }
        Command::Gatecount { n, out } => {
            let range = parse_range(&n)?;
            let config = json!({ "n": n });
            emit("gatecount", &config, None, &cmd_gatecount(range)?, out.as_deref())
        }
        Command::Prepare(args) => {
            let cfg = args.resolve()?;
            emit("prepare", &cfg, Some(cfg.seed), &cmd_prepare(&cfg)?, cfg.out.as_deref())
        }
        Command::Optimize(args) => {
            let cfg = args.resolve()?;
            emit("optimize", &cfg, Some(cfg.seed), &cmd_optimize(&cfg)?, cfg.out.as_deref())
        }
        Command::Measure(args) => {
            let cfg = args.resolve()?;
            emit("measure", &cfg, Some(cfg.seed), &cmd_measure(&cfg)?, cfg.out.as_deref())
        }
        Command::Tomo(args) => {
            let cfg = args.resolve()?;
            emit("tomo", &cfg, Some(cfg.seed), &cmd_tomo(&cfg)?, cfg.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinprep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
