use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use revsol::error::AppError;
use revsol::manifest::RunManifest;
use revsol::runner;

/// Rotational solitons of the curve shortening flow on surfaces of
/// revolution: integration, verification and discrete-flow cross-checks.
#[derive(Parser)]
#[command(name = "revsol", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one run manifest and write its run directory.
    Integrate {
        /// Run manifest (TOML).
        #[arg(long)]
        manifest: PathBuf,
        /// Override the output directory from the manifest.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the built-in gallery of initial conditions.
    Gallery {
        /// torus | catenoid | all
        #[arg(long, default_value = "all")]
        surface: String,
        #[arg(long)]
        out_dir: PathBuf,
        /// Concurrent runs.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        /// Torus major radius.
        #[arg(long = "R", default_value_t = 2.0)]
        big_r: f64,
        /// Torus minor radius.
        #[arg(long = "r", default_value_t = 1.0)]
        minor_r: f64,
        /// Override the per-run arc-length budget.
        #[arg(long)]
        s_max: Option<f64>,
    },
    /// Run the invariant suite on a manifest, or re-check an existing run
    /// directory against its recorded content hashes.
    Verify {
        #[arg(long, conflicts_with = "run_dir")]
        manifest: Option<PathBuf>,
        #[arg(long)]
        run_dir: Option<PathBuf>,
    },
    /// Convergence study of the discrete curve-shortening flow against the
    /// rigid soliton rotation.
    EvolveCheck {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t_final: f64,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-3, 5e-4, 2.5e-4])]
        dt: Vec<f64>,
        /// Fix the resampling spacing instead of deriving it from dt.
        #[arg(long)]
        spacing: Option<f64>,
        /// Arc length of the evolved curve segment.
        #[arg(long, default_value_t = 12.0)]
        arc_span: f64,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Export this many curve snapshots at fixed time intervals.
        #[arg(long, default_value_t = 0)]
        snapshots: usize,
        /// Directory for snapshot OBJ polylines.
        #[arg(long, requires = "snapshots")]
        snapshot_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Integrate { manifest, out_dir } => {
            let m = RunManifest::from_path(&manifest)?;
            let outcome = runner::cmd_integrate(&m, out_dir.as_deref())?;
            println!(
                "wrote {} ({} samples, forward {})",
                outcome.dir.display(),
                outcome.traj.len(),
                outcome.traj.forward_term.label()
            );
            Ok(())
        }
        Cmd::Gallery {
            surface,
            out_dir,
            jobs,
            big_r,
            minor_r,
            s_max,
        } => {
            let summary = runner::cmd_gallery(&surface, &out_dir, jobs, big_r, minor_r, s_max)?;
            print!("{}", summary.render());
            if summary.all_succeeded() {
                Ok(())
            } else {
                Err(AppError::numerical("one or more gallery runs failed".into()))
            }
        }
        Cmd::Verify { manifest, run_dir } => match (manifest, run_dir) {
            (Some(path), None) => {
                let m = RunManifest::from_path(&path)?;
                let report = runner::cmd_verify_manifest(&m)?;
                for c in &report.checks {
                    println!(
                        "{:<22} residual {:>12.4e}  tol {:>8.1e}  {}",
                        c.name,
                        c.residual,
                        c.tolerance,
                        if c.pass { "pass" } else { "FAIL" }
                    );
                }
                if report.passed() {
                    Ok(())
                } else {
                    Err(AppError::verification("checks failed".into()))
                }
            }
            (None, Some(dir)) => {
                let failures = runner::cmd_verify_run_dir(&dir)?;
                if failures.is_empty() {
                    println!("integrity ok: {}", dir.display());
                    Ok(())
                } else {
                    for f in &failures {
                        eprintln!("integrity: {f}");
                    }
                    Err(AppError::verification(format!(
                        "{} integrity failure(s) in {}",
                        failures.len(),
                        dir.display()
                    )))
                }
            }
            _ => Err(AppError::usage(
                "verify: pass exactly one of --manifest or --run-dir".into(),
            )),
        },
        Cmd::EvolveCheck {
            manifest,
            t_final,
            dt,
            spacing,
            arc_span,
            out,
            snapshots,
            snapshot_dir,
        } => {
            let m = RunManifest::from_path(&manifest)?;
            let snap = match (snapshots, &snapshot_dir) {
                (0, _) => None,
                (n, Some(dir)) => Some((n, dir.as_path())),
                (_, None) => {
                    return Err(AppError::usage(
                        "--snapshot-dir: required with --snapshots".into(),
                    ))
                }
            };
            let table = runner::cmd_evolve_check(&m, t_final, &dt, spacing, arc_span, snap)?;
            print!("{}", table.render());
            if let Some(path) = out {
                std::fs::write(&path, table.csv())?;
            }
            if table.rows.iter().any(|r| r.outcome.is_err()) {
                return Err(AppError::numerical("some rows failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("revsol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
