use std::path::PathBuf;
use std::process::ExitCode;

use beamlab::config::parse_methods;
use beamlab::output::write_outputs;
use beamlab::plot::write_plot_script;
use beamlab::{run_experiment, Experiment, ExperimentConfig, HarnessError, LSetting};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beamlab", version, about = "Robust adaptive beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write CSV results.
    Run(RunArgs),
    /// Write a matplotlib script that plots the CSV results.
    PlotScript {
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// beampattern, sinr_vs_snr, sinr_vs_snapshots or sinr_vs_inr.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Pin the extended dimension.
    #[arg(long, conflicts_with = "auto_l")]
    fix_l: Option<usize>,
    /// Search the extended dimension by normalized error.
    #[arg(long)]
    auto_l: bool,
    /// Comma-separated subset of optimal,scm_mvdr,diagonal_loading,capon_integral,lcssp.
    #[arg(long)]
    methods: Option<String>,
    /// Apply sensor-position errors to the virtual elements too.
    #[arg(long)]
    perturb_virtual: bool,
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(name) = &args.experiment {
        cfg.experiment = name.parse::<Experiment>()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(l) = args.fix_l {
        cfg.l = LSetting::Fixed(l);
    }
    if args.auto_l {
        cfg.l = LSetting::Auto;
    }
    if let Some(list) = &args.methods {
        cfg.methods = parse_methods(list.split(',')).map_err(HarnessError::Config)?;
    }
    if args.perturb_virtual {
        cfg.perturb_virtual = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e @ (HarnessError::Config(_) | HarnessError::ConfigParse { .. } | HarnessError::Core(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match write_outputs(&result, &args.out) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    for s in &result.series {
        let means: Vec<String> = s.points.iter().map(|p| format!("{:.2}", p.mean_db)).collect();
        println!("{:>18}: {}", s.method.name(), means.join(" "));
    }
    if result.all_ok() {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{} failed trial evaluations ({} optimum-dominance violations)",
            result.failures.len(),
            result.dominance_violations
        );
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::PlotScript { out } => match write_plot_script(&out) {
            Ok(path) => {
                println!("wrote {}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
