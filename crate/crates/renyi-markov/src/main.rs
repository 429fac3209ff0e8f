//! Command-line front end; all logic lives in the library's `runner` module.

use clap::{Args, Parser, Subcommand};
use renyi_markov::runner::{
    run_cmi, run_fit, run_ground, run_oracle, run_stabilizer_check, run_sweep, Engine, RunConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "renyi-markov", version, about = "Second Renyi conditional mutual information and Markov lengths for decohered spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's out_dir, else ./runs).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel jobs; defaults to the config value, then all cores.
    #[arg(long, env = "RENYI_MARKOV_JOBS")]
    jobs: Option<usize>,
    /// Override the truncation bond cap.
    #[arg(long)]
    chi_max: Option<usize>,
    /// Override the truncation cutoff.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Override the engine.
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Memory budget for dense-engine jobs, in GiB.
    #[arg(long, default_value_t = 8.0)]
    mem_gb: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and checkpoint every ground state in the sweep.
    Ground {
        #[command(flatten)]
        opts: RunOpts,
        /// Recompute checkpoints that already exist.
        #[arg(long)]
        force: bool,
    },
    /// Run the decoherence + CMI pipeline over the sweep; writes cmi.csv.
    Cmi {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Fit Markov lengths from an existing CSV; writes <stem>_fit.{csv,txt}.
    Fit {
        /// CSV produced by the cmi subcommand.
        csv: PathBuf,
    },
    /// Cross-check the matrix-product pipeline against dense diagonalization.
    Oracle {
        #[command(flatten)]
        opts: RunOpts,
        /// Largest tolerated entropy difference between the engines.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Run the closed-form stabilizer suite.
    StabilizerCheck,
    /// Composite: ground, then cmi, then fit.
    Sweep {
        #[command(flatten)]
        opts: RunOpts,
        /// Recompute checkpoints that already exist.
        #[arg(long)]
        force: bool,
    },
}

/// Load the config, apply command-line overrides, resolve the output
/// directory, and size the global thread pool.
fn prepare(opts: &RunOpts) -> Result<(RunConfig, PathBuf), String> {
    let mut config = RunConfig::from_path(&opts.config).map_err(|e| e.to_string())?;
    if let Some(chi_max) = opts.chi_max {
        config.policy.chi_max = chi_max;
    }
    if let Some(cutoff) = opts.cutoff {
        config.policy.cutoff = cutoff;
    }
    if let Some(engine) = opts.engine {
        config.engine = engine;
    }
    if let Some(jobs) = opts.jobs {
        config.jobs = Some(jobs);
    }
    config.validate().map_err(|e| e.to_string())?;

    let mut jobs = config.jobs.unwrap_or_else(num_cpus);
    if config.engine == Engine::Ed {
        // Three dense 4^L matrices of complex doubles per in-flight job.
        let max_len = config.n_a + 3 * config.r_values[config.r_values.len() - 1];
        let per_job = 3.0 * 16.0 * 4f64.powi(max_len as i32);
        let budget = (opts.mem_gb * (1u64 << 30) as f64 / per_job).floor() as usize;
        jobs = jobs.min(budget.max(1));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| e.to_string())?;

    let out_dir = opts
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs"));
    Ok((config, out_dir))
}

fn num_cpus() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Ground { opts, force } => {
            let (config, out_dir) = prepare(&opts)?;
            let summary = run_ground(&config, &out_dir, force).map_err(|e| e.to_string())?;
            println!("built {} checkpoint(s), skipped {}", summary.built, summary.skipped);
            for stem in &summary.unconverged {
                println!("warning: {stem} did not converge (see its metadata)");
            }
            Ok(())
        }
        Command::Cmi { opts } => {
            let (config, out_dir) = prepare(&opts)?;
            let path = run_cmi(&config, &out_dir).map_err(|e| e.to_string())?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Fit { csv } => {
            let groups = run_fit(&csv).map_err(|e| e.to_string())?;
            for group in &groups {
                match &group.fit {
                    Some(fit) => println!(
                        "{}: xi2 = {:.4} (c0 = {:.6}, c1 = {:.6}, rms = {:.3e}){}",
                        group.key,
                        fit.xi2,
                        fit.c0,
                        fit.c1,
                        fit.rms_residual,
                        if group.flags.is_empty() {
                            String::new()
                        } else {
                            format!("  [{}]", group.flags)
                        },
                    ),
                    None => println!("{}: {}", group.key, group.flags),
                }
            }
            Ok(())
        }
        Command::Oracle { opts, tol } => {
            let (config, out_dir) = prepare(&opts)?;
            let (path, worst) = run_oracle(&config, &out_dir, tol).map_err(|e| e.to_string())?;
            println!("engines agree: max |delta| = {worst:.3e} <= {tol:.1e}");
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::StabilizerCheck => {
            let lines = run_stabilizer_check().map_err(|e| e.to_string())?;
            for line in lines {
                println!("pass: {line}");
            }
            Ok(())
        }
        Command::Sweep { opts, force } => {
            let (config, out_dir) = prepare(&opts)?;
            let groups = run_sweep(&config, &out_dir, force).map_err(|e| e.to_string())?;
            for group in &groups {
                if let Some(fit) = &group.fit {
                    println!("{}: xi2 = {:.4}", group.key, fit.xi2);
                }
            }
            println!("report in {}", out_dir.join("cmi_fit.txt").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
