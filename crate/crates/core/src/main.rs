use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rhd_lwfr::basis::CorrectionKind;
use rhd_lwfr::harness::config::{parse_cells, parse_resolution, ConfigFile};
use rhd_lwfr::harness::output::{write_reference_csv, write_solution_csv, write_table_csv};
use rhd_lwfr::harness::problems::ProblemId;
use rhd_lwfr::harness::reference::reference_solution;
use rhd_lwfr::harness::{calibrate_cfl, convergence_study, run, RunConfig};
use rhd_lwfr::{EosModel, Error, Result};

/// Prints a line to stdout; a closed pipe (e.g. `| head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "rhd", version, about = "Lax-Wendroff flux reconstruction solver for relativistic hydrodynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem to its final time.
    Run {
        #[command(flatten)]
        common: Common,
        /// Cells per axis: NX or NX,NY.
        #[arg(long)]
        cells: Option<String>,
        /// Write the final nodal solution here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study of a smooth problem.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Doubling list of cells per axis, e.g. 8,16,32,64.
        #[arg(long)]
        cells: String,
        /// Write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-order Rusanov reference solution of a 1-D problem.
    Reference {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20000)]
        cells: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest stable CFL of the unlimited scheme on the smooth advection test.
    CalibrateCfl {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value = "id")]
        eos: String,
        #[arg(long, default_value_t = 5.0 / 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 32)]
        cells: usize,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
    },
}

#[derive(Args)]
struct Common {
    /// key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// id, tm, ip or rc.
    #[arg(long)]
    eos: Option<String>,
    /// Adiabatic index of the ideal gas.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Safety factor l_s.
    #[arg(long)]
    safety: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    /// radau or g2.
    #[arg(long)]
    correction: Option<String>,
    /// Turn the smoothness indicator on or off (default depends on the problem).
    #[arg(long)]
    blending: Option<bool>,
    #[arg(long)]
    jet_pressure: Option<f64>,
}

impl Common {
    fn resolve(&self) -> Result<(RunConfig, ConfigFile)> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let problem = match self.problem.as_deref().or(file.get("problem")) {
            Some(p) => ProblemId::parse(p)?,
            None => return Err(Error::Config("--problem is required".into())),
        };
        let mut cfg = if file.values.is_empty() {
            RunConfig::new(problem, EosModel::ideal(problem.default_gamma())?)
        } else {
            let mut f = file.clone();
            f.values.insert("problem".into(), problem.to_string());
            RunConfig::from_file(&f)?
        };
        if self.eos.is_some() || self.gamma.is_some() {
            let gamma = match self.gamma {
                Some(g) => g,
                None => file.get_f64("gamma")?.unwrap_or(problem.default_gamma()),
            };
            let name = self.eos.as_deref().or(file.get("eos")).unwrap_or("id");
            cfg.eos = EosModel::parse(name, gamma)?;
        }
        cfg.degree = self.degree.or(cfg.degree);
        cfg.t_final = self.tfinal.or(cfg.t_final);
        cfg.safety = self.safety.or(cfg.safety);
        cfg.cfl = self.cfl.or(cfg.cfl);
        cfg.alpha_max = self.alpha_max.or(cfg.alpha_max);
        cfg.jet_pressure = self.jet_pressure.or(cfg.jet_pressure);
        if let Some(c) = &self.correction {
            cfg.correction = CorrectionKind::parse(c)?;
        }
        cfg.blending = self.blending.or(cfg.blending);
        Ok((cfg, file))
    }
}

fn out_path(flag: &Option<PathBuf>, file: &ConfigFile) -> Option<PathBuf> {
    flag.clone().or_else(|| file.get("out").map(PathBuf::from))
}

fn configure_threads(file: Option<&ConfigFile>) -> Result<()> {
    let from_env = std::env::var("RHD_THREADS").ok();
    let from_file = file.and_then(|f| f.get("threads").map(str::to_string));
    if let Some(v) = from_env.or(from_file) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("RHD_THREADS: expected a count, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn report_written(path: &Path) {
    say!("wrote {}", path.display());
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, cells, out } => {
            let (mut cfg, file) = common.resolve()?;
            configure_threads(Some(&file))?;
            if let Some(c) = cells {
                cfg.cells = Some(parse_resolution(&c)?);
            }
            let result = run(&cfg)?;
            let s = &result.stats;
            say!(
                "{} eos={} N={} cells={:?} t={:.6} steps={} wall={:.2}s",
                cfg.problem,
                cfg.eos,
                result.solver.scheme.degree(),
                &result.solver.field.mesh.cells[..result.solver.scheme.dim],
                result.solver.time,
                s.steps,
                s.wall_time.as_secs_f64()
            );
            say!(
                "blended elements={} flux corrections={} low-order fallbacks={} zhang-shu={} argument scalings={}",
                s.totals.blended_elements,
                s.totals.flux_corrections,
                s.totals.low_order_fallbacks,
                s.totals.zhang_shu_activations,
                s.totals.scaling_activations
            );
            if let Some(p) = out_path(&out, &file) {
                write_solution_csv(&result.solver.field, &result.solver.scheme.basis, cfg.eos, &p)?;
                report_written(&p);
            }
        }
        Command::Converge { common, cells, out } => {
            let (cfg, file) = common.resolve()?;
            configure_threads(Some(&file))?;
            let list: Vec<usize> = parse_cells(&cells)?.iter().map(|c| c[0]).collect();
            let rows = convergence_study(&cfg, &list)?;
            say!("{:>6} {:>14} {:>8} {:>14} {:>8} {:>14} {:>8}", "cells", "L1", "order", "L2", "order", "Linf", "order");
            for r in &rows {
                let o = |k: usize| r.orders.map(|o| format!("{:.3}", o[k])).unwrap_or_else(|| "-".into());
                say!(
                    "{:>6} {:>14.6e} {:>8} {:>14.6e} {:>8} {:>14.6e} {:>8}",
                    r.cells,
                    r.norms.l1,
                    o(0),
                    r.norms.l2,
                    o(1),
                    r.norms.linf,
                    o(2)
                );
            }
            if let Some(p) = out_path(&out, &file) {
                write_table_csv(&rows, &p)?;
                report_written(&p);
            }
        }
        Command::Reference { common, cells, out } => {
            let (cfg, file) = common.resolve()?;
            // Rusanov's first-order scheme is stable up to CFL 1.
            let cfl = cfg.cfl.unwrap_or(0.9);
            let mut spec = cfg.spec()?;
            if let Some(t) = cfg.t_final {
                spec.t_final = t;
            }
            let r = reference_solution(&spec, cells, cfl)?;
            say!("{} eos={} reference with {} cells at t={}", cfg.problem, cfg.eos, cells, spec.t_final);
            if let Some(p) = out_path(&out, &file) {
                write_reference_csv(&r, &p)?;
                report_written(&p);
            }
        }
        Command::CalibrateCfl {
            degree,
            eos,
            gamma,
            cells,
            steps,
        } => {
            configure_threads(None)?;
            let model = EosModel::parse(&eos, gamma)?;
            let cfl = calibrate_cfl(model, degree, cells, steps)?;
            say!("N={degree} calibrated CFL {cfl:.4}");
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
            if e.is_admissibility() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["rhd", "reference", "--problem", "rp1", "--cfl", "0.5"]).unwrap();
        assert!(matches!(cli.command, Command::Reference { .. }));
    }
}
