use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use bsclust::io::{self, Manifest};
use bsclust::{run_experiment, summarize, ExperimentConfig, Preset};
use bsclust_core::partitions::bell_number;
use bsclust_core::MethodId;
use clap::{Args, Parser, Subcommand};

/// Base station clustering simulator.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write results, summary and manifest.
    Simulate(SimulateArgs),
    /// Recompute a summary CSV from a results CSV.
    Summarize {
        /// Results CSV written by `simulate`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Summary CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the number of set partitions of K users.
    Bell {
        #[arg(long)]
        k: usize,
    },
    /// Print the TOML configuration of a built-in preset.
    Preset {
        /// Preset name: A, B or C.
        name: Preset,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Experiment configuration file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: A, B or C.
    #[arg(long)]
    preset: Option<Preset>,
    /// Output directory; defaults to `output_dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the method list (comma separated).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodId>>,
    /// Override the number of drops per sweep point.
    #[arg(long)]
    drops: Option<usize>,
    /// Also write the formation attempt log as JSON lines.
    #[arg(long)]
    traces: bool,
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(preset)) => preset.config(),
        (None, None) => bail!("either --config or --preset is required"),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(methods) = args.methods {
        config.methods = methods;
    }
    if let Some(drops) = args.drops {
        config.num_drops = drops;
    }
    let Some(out) = args.out.or_else(|| config.output_dir.clone()) else {
        bail!("no output directory: pass --out or set output_dir");
    };
    config.validate()?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let output = run_experiment(&config, args.traces)?;
    io::write_results_file(&out.join(io::RESULTS_FILE), &output.rows)?;
    io::write_summary_file(&out.join(io::SUMMARY_FILE), &summarize(&output.rows))?;
    Manifest::new(&config, output.rows.len())?.write(&out.join(io::MANIFEST_FILE))?;
    if args.traces {
        io::write_traces_file(&out.join(io::TRACES_FILE), &output.traces)?;
    }
    eprintln!("wrote {} rows to {}", output.rows.len(), out.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Summarize { input, out } => {
            let rows = io::read_results_file(&input)?;
            io::write_summary_file(&out, &summarize(&rows))?;
            Ok(())
        }
        Command::Bell { k } => {
            println!("{}", bell_number(k)?);
            Ok(())
        }
        Command::Preset { name } => {
            print!("{}", name.config().to_toml()?);
            Ok(())
        }
    }
}
