use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mhdbl::config::RunConfig;
use mhdbl::verify::{
    bench_commutator, bench_energy_inequality, bench_hardy, bench_heat_oracle, run_mms_spatial,
    run_mms_temporal, VerificationReport,
};
use mhdbl::{runner, MhdError};

#[derive(Parser)]
#[command(name = "mhdbl", about = "Boundary-layer simulator and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured initial data and write timeseries + snapshots
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run a verification suite: mms, commutator, hardy, energy, oracle-heat, all
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, MhdError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn resolve_output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run_suite(
    name: &str,
    config: &RunConfig,
    seed: u64,
) -> Result<Vec<VerificationReport>, MhdError> {
    let nys = [config.ny / 4, config.ny / 2, config.ny];
    let solver = config.solver();
    match name {
        "mms" => {
            let case = Default::default();
            let cfg = mhdbl::dynamics::SolverConfig {
                dt: solver.dt.min(1e-4),
                tend: solver.tend.min(0.02),
                f_floor: 1e-4,
                ..solver.clone()
            };
            let spatial = run_mms_spatial(&case, &nys, config.nx, config.ymax, &cfg)?;
            let dts = [4.0 * cfg.dt, 2.0 * cfg.dt, cfg.dt];
            let temporal =
                run_mms_temporal(&case, &dts, 16, config.ny / 2, config.ymax, cfg.tend)?;
            Ok(vec![spatial, temporal])
        }
        "commutator" => Ok(vec![bench_commutator(0.5, &[64, 128, 256, 512], 100, seed)?]),
        "hardy" => Ok(vec![bench_hardy(&nys, config.nx, config.ymax)?]),
        "energy" => {
            let resolutions = [(config.nx / 2, config.ny / 2), (config.nx, config.ny)];
            Ok(vec![bench_energy_inequality(
                &config.initial_data(),
                &resolutions,
                config.ymax,
                &solver,
            )?])
        }
        "oracle-heat" => {
            Ok(vec![bench_heat_oracle(config.ny, config.ymax, solver.dt.min(1e-4), 0.1)?])
        }
        "all" => {
            let mut reports = Vec::new();
            for suite in ["oracle-heat", "mms", "commutator", "hardy", "energy"] {
                reports.extend(run_suite(suite, config, seed)?);
            }
            Ok(reports)
        }
        other => Err(MhdError::InvalidParameter {
            name: "suite",
            reason: format!("unknown suite `{other}`"),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let out = resolve_output_dir(output_dir, &cfg);
            match runner::run(&cfg, &out) {
                Ok(outcome) => {
                    if let Some(t) = outcome.positivity_lost {
                        eprintln!("positivity lost at t = {t:.6e}; partial output in {}", out.display());
                        ExitCode::from(2)
                    } else {
                        println!(
                            "run complete: t = {:.6e}, output in {}",
                            outcome.final_state.t,
                            out.display()
                        );
                        ExitCode::SUCCESS
                    }
                }
                Err(MhdError::PositivityLost { t, .. }) => {
                    eprintln!("positivity lost at t = {t:.6e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { suite, config, output_dir, seed } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let out = resolve_output_dir(output_dir, &cfg);
            let seed = seed.unwrap_or(cfg.seed);
            match run_suite(&suite, &cfg, seed) {
                Ok(reports) => {
                    if let Err(e) = std::fs::create_dir_all(&out) {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                    let mut all_pass = true;
                    for report in &reports {
                        print!("{}", report.to_text());
                        if let Err(e) = report.write_files(&out) {
                            eprintln!("error: {e}");
                            return ExitCode::from(1);
                        }
                        all_pass &= report.pass;
                    }
                    if all_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(MhdError::PositivityLost { t, .. }) => {
                    eprintln!("positivity lost at t = {t:.6e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
