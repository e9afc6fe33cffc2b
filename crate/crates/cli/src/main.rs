use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ssqc_cli::{
    exit, parse_config, presets, run_json, run_single, run_sweep, sweep_json, write_failures_csv,
    write_sweep_csv, write_trajectory_csv, CliError, ConfigDoc,
};
use ssqc_core::{l1_coherence, markov_steady_state_analytic};

#[derive(Parser)]
#[command(name = "ssqc", version, about = "Steady-state coherence of qubits in a common bath")]
struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "SSQC_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one configuration and write the trajectory as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep in parallel and write one CSV row per point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "SSQC_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a bundled configuration; lists the names when none is given.
    Preset { name: Option<String> },
    /// Closed-form reference results.
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Subcommand)]
enum Oracle {
    /// Markovian steady state of two qubits under collective sigma_x coupling.
    MarkovN2 {
        #[arg(long, allow_hyphen_values = true)]
        omega1: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega2: f64,
    },
}

fn read_config(path: &Path) -> Result<ConfigDoc, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_config(&text)?)
}

fn resolve(out_dir: Option<&Path>, flag: Option<PathBuf>, from_config: Option<PathBuf>) -> Option<PathBuf> {
    let p = flag.or(from_config)?;
    Some(match out_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn csv_err(path: Option<&Path>, e: csv::Error) -> CliError {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    CliError::io(label, io::Error::other(e))
}

/// Write to `path`, or stdout when there is none.
fn emit<F>(path: Option<&Path>, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> csv::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w).map_err(|e| csv_err(Some(p), e))?;
            w.flush().map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| csv_err(None, e))
        }
    }
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let Some(path) = path else {
        log::warn!("json mirror needs an output path; skipped");
        return Ok(());
    };
    let target = path.with_extension("json");
    let mut w = create(&target)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(&target, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&target, e))
}

fn real() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let _ = e.print();
            return Err(CliError::Usage("invalid arguments".into()));
        }
    };
    let out_dir = cli.out_dir.as_deref();

    match cli.command {
        Command::Run { config, out } => {
            let cfg = match read_config(&config)? {
                ConfigDoc::Run(c) => c,
                ConfigDoc::Sweep(_) => {
                    return Err(CliError::Usage(format!(
                        "{} describes a sweep; use `ssqc sweep`",
                        config.display()
                    )))
                }
            };
            let path = resolve(out_dir, out, cfg.output.path.clone());
            let result = run_single(&cfg)?;
            log::info!(
                "C = {:.6} (converged: {}, t = {:.2}) in {:.2?}",
                result.steady.ssqc,
                result.steady.converged,
                result.steady.t_converged,
                result.elapsed
            );
            emit(path.as_deref(), |w| write_trajectory_csv(&result.trajectory, w))?;
            if cfg.output.json {
                write_json(path.as_deref(), &run_json(&cfg, &result))?;
            }
        }
        Command::Sweep { config, workers, out } => {
            let spec = match read_config(&config)? {
                ConfigDoc::Sweep(s) => s,
                ConfigDoc::Run(_) => {
                    return Err(CliError::Usage(format!(
                        "{} has no [sweep] section; use `ssqc run`",
                        config.display()
                    )))
                }
            };
            let workers = match workers {
                Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
                Some(k) => k,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            let path = resolve(out_dir, out, spec.base.output.path.clone());
            let outcome = run_sweep(&spec, workers)?;
            emit(path.as_deref(), |w| write_sweep_csv(&spec, &outcome, w))?;
            if spec.base.output.json {
                write_json(path.as_deref(), &sweep_json(&spec, &outcome))?;
            }
            if !outcome.failures.is_empty() {
                match &path {
                    Some(p) => {
                        let manifest = p.with_extension("failures.csv");
                        emit(Some(&manifest), |w| write_failures_csv(&outcome, w))?;
                        log::error!("failure manifest written to {}", manifest.display());
                    }
                    None => {
                        let mut stderr = io::stderr().lock();
                        write_failures_csv(&outcome, &mut stderr).map_err(|e| csv_err(None, e))?;
                    }
                }
                return Err(CliError::PartialSweep {
                    failed: outcome.failures.len(),
                    total: outcome.total(),
                });
            }
        }
        Command::Preset { name: None } => {
            for n in presets::NAMES {
                println!("{n}");
            }
        }
        Command::Preset { name: Some(name) } => match presets::preset(&name) {
            Some(text) => print!("{text}"),
            None => {
                return Err(CliError::Usage(format!(
                    "unknown preset {name:?}; available: {}",
                    presets::NAMES.join(", ")
                )))
            }
        },
        Command::Oracle(Oracle::MarkovN2 { omega1, omega2 }) => {
            let rho = markov_steady_state_analytic(omega1, omega2);
            println!("rho (real part; imaginary part is zero):");
            for i in 0..rho.dim() {
                let row: Vec<String> = (0..rho.dim()).map(|j| format!("{:.16}", rho.get(i, j).re)).collect();
                println!("  {}", row.join("  "));
            }
            println!("C = {:.16}", l1_coherence(&rho));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real() {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            if !matches!(e, CliError::Usage(ref m) if m == "invalid arguments") {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
