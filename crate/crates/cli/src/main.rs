use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unibandit_cli::demos::{run_demo, DEMOS};
use unibandit_cli::runner::OUTPUT_ROOT_VAR;
use unibandit_cli::{output_dir, run_experiment, summarize, CliError, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "unibandit", version, about = "Contextual bandit consistency experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every replica of a config and write traces, summaries and a manifest.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a run directory into per-checkpoint regret statistics.
    Summarize { dir: PathBuf },
    /// Parse and check a config; prints its hash.
    Validate { config: PathBuf },
    /// Run a bundled construction demo.
    Demo {
        #[arg(value_parser = DEMOS.map(|(n, _)| n))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| output_dir(&cfg));
            let m = run_experiment(&cfg, &dir, RunOptions::default())?;
            println!(
                "{}: {} replica(s) written to {} (config {})",
                m.name,
                m.replicas.len(),
                dir.display(),
                &m.config_hash[..16]
            );
        }
        Command::Summarize { dir } => {
            let rep = summarize(&dir)?;
            println!("checkpoint_T,comparator,replicas,mean_average_regret,stdev_average_regret");
            for r in &rep.rows {
                println!(
                    "{},{},{},{},{}",
                    r.checkpoint,
                    r.comparator,
                    r.replicas,
                    r.mean_average_regret,
                    r.stdev_average_regret
                );
            }
            if let Some(f) = rep.certificate_fraction {
                println!("certificate held in {:.1}% of replicas", 100.0 * f);
            }
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("ok {}", cfg.hash());
        }
        Command::Demo { name, out } => {
            let dir = out.unwrap_or_else(|| {
                let root = std::env::var(OUTPUT_ROOT_VAR).unwrap_or_else(|_| "runs".into());
                PathBuf::from(root).join(format!("demo-{name}"))
            });
            print!("{}", run_demo(&name, &dir)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
