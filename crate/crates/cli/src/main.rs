use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dsfusion::Mode;
use dsfusion_cli::commands::{load_spec, modes_for, run_evaluate, run_gen, run_train};
use dsfusion_cli::config::parse_combiners;
use dsfusion_cli::fixtures::{self, FixtureSet};
use dsfusion_cli::{report, CliError, ExperimentConfig, Result, SubsetPolicy};

#[derive(Parser)]
#[command(
    name = "dsfusion",
    version,
    about = "Dempster-Shafer classifier fusion experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train DS1/DS2 evidence and fit the baseline tables on a training set.
    Train {
        /// Training manifest (overrides `train_manifest` in the config).
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Experiment config JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Artifact directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated combiners whose state should be fitted.
        #[arg(long)]
        combiners: Option<String>,
        /// Train only this evidence mode.
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Evaluate combiners over classifier subsets of a test set.
    Evaluate {
        /// Test manifest (overrides `test_manifest` in the config).
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory holding the trained artifacts (defaults to --out).
        #[arg(long)]
        artifacts: Option<PathBuf>,
        /// Report directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        combiners: Option<String>,
        /// `auto`, `all`, `paper-style` or `explicit:1,2;1,3,5` (ranks, 1 = best).
        #[arg(long)]
        subset_policy: Option<SubsetPolicy>,
        /// Evaluate only this evidence mode among DS1/DS2.
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Write a seeded synthetic dataset and its manifest.
    Gen {
        /// Synthetic spec JSON.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the published metric fixtures.
    FixtureCheck {
        /// Alternative fixture JSON (defaults to the built-in set).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn base_config(path: Option<&PathBuf>, combiners: Option<&str>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(list) = combiners {
        cfg.combiners = parse_combiners(list)?;
    }
    Ok(cfg)
}

/// Keep DS1/DS2 only if they match `mode`.
fn restrict_mode(cfg: &mut ExperimentConfig, mode: Option<Mode>) {
    if let Some(mode) = mode {
        cfg.combiners
            .retain(|c| c.evidence_mode().is_none_or(|m| m == mode));
    }
}

fn required(value: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    value.ok_or_else(|| CliError::Config(format!("{what} is required")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            manifest,
            config,
            seed,
            out,
            combiners,
            mode,
        } => {
            let mut cfg = base_config(config.as_ref(), combiners.as_deref())?;
            if let Some(seed) = seed {
                cfg.train_config.seed = seed;
            }
            let modes = match mode {
                Some(m) => vec![m],
                None => modes_for(&cfg.combiners),
            };
            restrict_mode(&mut cfg, mode);
            let manifest = required(manifest.or(cfg.train_manifest.clone()), "--manifest")?;
            let out = required(out.or(cfg.output_dir.clone()), "--out")?;
            let outcome = run_train(&cfg, &manifest, &out, &modes)?;
            for (mode, trace) in &outcome.traces {
                println!(
                    "{mode}: {} epochs ({:?}), mse {:.6} -> {:.6}",
                    trace.epochs_run, trace.stop_reason, trace.initial_mse, trace.best_mse
                );
            }
            for path in outcome.written {
                println!("wrote {}", path.display());
            }
        }
        Command::Evaluate {
            manifest,
            config,
            artifacts,
            out,
            combiners,
            subset_policy,
            mode,
        } => {
            let mut cfg = base_config(config.as_ref(), combiners.as_deref())?;
            if let Some(policy) = subset_policy {
                cfg.subset_policy = policy;
            }
            restrict_mode(&mut cfg, mode);
            let manifest = required(manifest.or(cfg.test_manifest.clone()), "--manifest")?;
            let out = required(out.or(cfg.output_dir.clone()), "--out")?;
            let artifacts = artifacts.unwrap_or_else(|| out.clone());
            let result = run_evaluate(&cfg, &manifest, &artifacts)?;
            print!("{}", report::report_text(&result)?);
            for path in report::write_all(&result, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Gen { config, seed, out } => {
            let mut spec = load_spec(&config)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            for path in run_gen(&spec, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::FixtureCheck { config } => {
            let set = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<FixtureSet>(&text)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
                }
                None => FixtureSet::stock(),
            };
            for outcome in fixtures::evaluate(&set) {
                println!("{outcome}");
            }
            fixtures::check(&set)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
