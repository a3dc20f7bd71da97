use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catsim::config::{parse_scenario, ConfigError, Scenario};
use catsim::export::{parse_state_dump, wigner_pgm, wigner_text, write_bytes, write_run, write_text};
use catsim::scenario::{run_scenario, validity_gate, validity_report, RunError};
use catsim::sweep::{fidelity_map_text, run_sweep};
use catsim_core::analysis::{wigner, GridSpec};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "catsim", version, about = "Cat-state generation in driven qubit/qutrit-resonator systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one scenario and write its artifacts.
    Simulate {
        cfg: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run even if a validity condition fails.
        #[arg(long)]
        force: bool,
    },
    /// Fidelity map over the scenario's [sweep] axes.
    Sweep {
        cfg: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        force: bool,
    },
    /// Wigner function of a dumped state.
    Wigner {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 161)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
        /// Half-width of the square grid; sized from the photon number if omitted.
        #[arg(long)]
        extent: Option<f64>,
        /// Also write a PGM image next to the text grid.
        #[arg(long)]
        pgm: bool,
    },
    /// Print the validity report.
    Check { cfg: PathBuf },
}

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.display().to_string(), source })
}

fn load(path: &Path) -> Result<Scenario, RunError> {
    let src = read(path)?;
    parse_scenario(&src).map_err(|e| RunError::Config(ConfigError { line: e.line, message: format!("{}: {}", path.display(), e.message) }))
}

fn run(cli: Cli) -> Result<i32, RunError> {
    match cli.cmd {
        Cmd::Simulate { cfg, out, force } => {
            let s = load(&cfg)?;
            let a = run_scenario(&s, force)?;
            for p in write_run(&a, &out)? {
                log::info!("wrote {}", p.display());
            }
            if let Some(m) = &a.measurement {
                println!("measured {} at t = {:.6e} s: probability {:.6}", m.atom.label(), m.time, m.probability);
                if let Some(p) = m.parity {
                    println!("conditional parity {p:.6}");
                }
            }
            Ok(0)
        }
        Cmd::Sweep { cfg, out, jobs, force } => {
            let s = load(&cfg)?;
            if !force {
                if let Some(e) = validity_gate(&validity_report(&s)) {
                    return Err(e);
                }
            }
            let m = run_sweep(&s, jobs)?;
            let path = if out.extension().is_some() { out } else { out.join("fidelity_map.txt") };
            write_text(&path, &fidelity_map_text(&m, &s))?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Cmd::Wigner { state, grid, out, extent, pgm } => {
            let st = parse_state_dump(&read(&state)?)?;
            let spec = match extent {
                Some(e) => GridSpec::square(e, grid),
                None => GridSpec::for_alpha(st.mean_photon_number().sqrt(), grid),
            };
            let w = wigner(&st, &spec)?;
            write_text(&out, &wigner_text(&w))?;
            if pgm {
                write_bytes(&out.with_extension("pgm"), &wigner_pgm(&w))?;
            }
            Ok(0)
        }
        Cmd::Check { cfg } => {
            let s = load(&cfg)?;
            let report = validity_report(&s);
            println!("{report}");
            Ok(if validity_gate(&report).is_some() { 3 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
