//! Validation harness: problems, boundaries, the run driver, norms,
//! convergence studies, the reference solver and CSV output.

pub mod boundary;
pub mod config;
pub mod norms;
pub mod output;
pub mod problems;
pub mod reference;

use std::time::{Duration, Instant};

use crate::basis::{build_basis_with, CorrectionKind};
use crate::blending::{IndicatorParams, DEFAULT_CFL};
use crate::eos::{self, EosModel};
use crate::error::{Error, Result};
use crate::lwfr::Scheme;
use crate::solver::{Field, LimiterParams, Solver, StepStats};
use config::{parse_list_f64, parse_resolution, ConfigFile};
use norms::{check_doubling, convergence_rows, error_norms, ConvergenceRow, ErrorNorms};
use problems::{init_field, ProblemId, ProblemSpec};

/// Everything needed to set up and run one simulation. `None` fields fall
/// back to the problem defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub eos: EosModel,
    pub degree: Option<usize>,
    pub cells: Option<[usize; 2]>,
    pub t_final: Option<f64>,
    pub safety: Option<f64>,
    /// Overrides the CFL table entry for the chosen degree.
    pub cfl: Option<f64>,
    pub cfl_table: [f64; 4],
    pub alpha_max: Option<f64>,
    /// Smoothness indicator on or off; `None` uses the problem default.
    pub blending: Option<bool>,
    /// Indicator constants; `enabled` is taken from `blending`.
    pub indicator: IndicatorParams,
    pub correction: CorrectionKind,
    pub scaling: bool,
    pub flux_correction: bool,
    pub zhang_shu: bool,
    pub check_means: bool,
    pub jet_pressure: Option<f64>,
    /// Stop after this many steps even if t_final is not reached.
    pub max_steps: Option<usize>,
}

impl RunConfig {
    pub fn new(problem: ProblemId, eos: EosModel) -> Self {
        RunConfig {
            problem,
            eos,
            degree: None,
            cells: None,
            t_final: None,
            safety: None,
            cfl: None,
            cfl_table: DEFAULT_CFL,
            alpha_max: None,
            blending: None,
            indicator: IndicatorParams::default(),
            correction: CorrectionKind::Radau,
            scaling: true,
            flux_correction: true,
            zhang_shu: true,
            check_means: false,
            jet_pressure: None,
            max_steps: None,
        }
    }

    /// Builds a config from a parsed file. `problem` is required.
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let problem = ProblemId::parse(
            file.get("problem")
                .ok_or_else(|| Error::Config("config needs a 'problem' key".into()))?,
        )?;
        let gamma = file.get_f64("gamma")?.unwrap_or(problem.default_gamma());
        let eos = EosModel::parse(file.get("eos").unwrap_or("id"), gamma)?;
        let mut cfg = RunConfig::new(problem, eos);
        cfg.degree = file.get_usize("degree")?;
        if let Some(c) = file.get("cells") {
            cfg.cells = Some(parse_resolution(c)?);
        }
        cfg.t_final = file.get_f64("tfinal")?;
        cfg.safety = file.get_f64("safety")?.or(file.get_f64("safety_factor")?);
        cfg.cfl = file.get_f64("cfl")?;
        if let Some(t) = file.get("cfl_table") {
            let v = parse_list_f64("cfl_table", t)?;
            cfg.cfl_table = v
                .try_into()
                .map_err(|_| Error::Config("cfl_table: expected four values for N = 1..4".into()))?;
        }
        cfg.alpha_max = file.get_f64("alpha_max")?;
        let ind = &mut cfg.indicator;
        if let Some(v) = file.get_f64("indicator.a")? {
            ind.a = v;
        }
        if let Some(v) = file.get_f64("indicator.c")? {
            ind.c = v;
        }
        if let Some(v) = file.get_f64("indicator.s")? {
            ind.s = v;
        }
        if let Some(v) = file.get_f64("indicator.alpha_min")? {
            ind.alpha_min = v;
        }
        cfg.blending = file.get_bool("indicator.enabled")?;
        if let Some(c) = file.get("correction") {
            cfg.correction = CorrectionKind::parse(c)?;
        }
        if let Some(v) = file.get_bool("scaling")? {
            cfg.scaling = v;
        }
        if let Some(v) = file.get_bool("flux_correction")? {
            cfg.flux_correction = v;
        }
        if let Some(v) = file.get_bool("zhang_shu")? {
            cfg.zhang_shu = v;
        }
        cfg.jet_pressure = file.get_f64("jet.pressure")?;
        Ok(cfg)
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        ProblemSpec::with_jet_pressure(self.problem, self.eos, self.jet_pressure)
    }
}

/// Totals over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub wall_time: Duration,
    pub min_dt: f64,
    pub totals: StepStats,
}

pub struct RunOutput {
    pub spec: ProblemSpec,
    pub solver: Solver,
    pub stats: RunStats,
}

/// Sets up the solver for a config without stepping.
pub fn build_solver(cfg: &RunConfig) -> Result<(ProblemSpec, Solver)> {
    let spec = cfg.spec()?;
    let degree = cfg.degree.unwrap_or(spec.default_degree);
    let basis = build_basis_with(degree, cfg.correction)?;
    let cells = cfg.cells.unwrap_or(spec.default_cells);
    let mesh = spec.mesh(cells)?;
    let field = init_field(&spec, &mesh, &basis)?;
    let scheme = Scheme::new(cfg.eos, basis, spec.dim(), cfg.scaling)?;
    let cfl = cfg.cfl.unwrap_or(cfg.cfl_table[degree - 1]);
    let safety = cfg.safety.unwrap_or(spec.safety);
    if !(cfl > 0.0 && safety > 0.0) {
        return Err(Error::Config(format!("cfl ({cfl}) and safety ({safety}) must be positive")));
    }
    let mut indicator = cfg.indicator;
    indicator.alpha_max = cfg.alpha_max.unwrap_or(spec.alpha_max);
    indicator.enabled = cfg.blending.unwrap_or(spec.blending);
    let limiter = LimiterParams {
        indicator,
        flux_correction: cfg.flux_correction,
        zhang_shu: cfg.zhang_shu,
        check_means: cfg.check_means,
    };
    let solver = Solver::new(scheme, field, spec.boundaries, limiter, cfl, safety)?;
    Ok((spec, solver))
}

/// Steps until `t_final` (or `max_steps`), calling `observe` after every step.
pub fn advance_to<F: FnMut(&Solver, &StepStats)>(
    solver: &mut Solver,
    t_final: f64,
    max_steps: Option<usize>,
    mut observe: F,
) -> Result<RunStats> {
    let start = Instant::now();
    let mut stats = RunStats {
        min_dt: f64::INFINITY,
        ..Default::default()
    };
    while solver.time < t_final && max_steps.map_or(true, |m| stats.steps < m) {
        let s = solver.step(t_final)?;
        if !(s.dt > 0.0) {
            return Err(Error::Domain(format!("non-positive time step {}", s.dt)));
        }
        stats.steps += 1;
        stats.min_dt = stats.min_dt.min(s.dt);
        stats.totals.accumulate(&s);
        observe(solver, &s);
        // Guard against a final step that rounds short of t_final.
        if t_final - solver.time < 1e-14 * t_final.abs().max(1.0) {
            solver.time = t_final;
        }
    }
    stats.wall_time = start.elapsed();
    Ok(stats)
}

/// Runs a configured problem to its final time.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let (spec, mut solver) = build_solver(cfg)?;
    let t_final = cfg.t_final.unwrap_or(spec.t_final);
    let stats = advance_to(&mut solver, t_final, cfg.max_steps, |_, _| {})?;
    Ok(RunOutput { spec, solver, stats })
}

/// Nodal densities of a field.
pub fn densities(field: &Field, model: EosModel) -> Result<Vec<f64>> {
    field.u.iter().map(|u| eos::recover(model, u).map(|p| p.rho)).collect()
}

/// Σ_e |K_e| Σ_i w_i D_i.
pub fn total_mass(solver: &Solver) -> f64 {
    let sp = solver.field.mesh.spacing;
    let area = if solver.scheme.dim == 2 { sp[0] * sp[1] } else { sp[0] };
    let nn = solver.field.nodes_per_element();
    (0..solver.field.mesh.n_elements())
        .map(|e| area * solver.scheme.element_mean(&solver.field.u[e * nn..(e + 1) * nn]).d)
        .sum()
}

/// Density error norms of a finished smooth run against its exact solution.
pub fn density_errors(out: &RunOutput) -> Result<ErrorNorms> {
    let field = &out.solver.field;
    let rho = densities(field, out.spec.eos)?;
    let t = out.solver.time;
    let spec = &out.spec;
    if spec.exact(0.0, 0.0, 0.0).is_none() {
        return Err(Error::Config(format!("problem {} has no exact solution", spec.id)));
    }
    Ok(error_norms(field, &out.solver.scheme.basis, &rho, |x, y| {
        spec.exact(x, y, t).map(|p| p.rho).unwrap_or(f64::NAN)
    }))
}

/// Runs `cfg` at each resolution and tabulates density errors and orders.
/// Resolutions must double; in 2-D each entry is the cell count per axis.
pub fn convergence_study(cfg: &RunConfig, cells: &[usize]) -> Result<Vec<ConvergenceRow>> {
    check_doubling(cells)?;
    let mut data = Vec::with_capacity(cells.len());
    for &n in cells {
        let mut c = cfg.clone();
        c.cells = Some([n, n]);
        let out = run(&c)?;
        data.push((n, density_errors(&out)?));
    }
    Ok(convergence_rows(&data))
}

/// Largest CFL (× 0.98) for which the smooth advection test with the
/// indicator switched off stays bounded for `steps` steps at Δt = CFL·Δx/Λ.
pub fn calibrate_cfl(model: EosModel, degree: usize, cells: usize, steps: usize) -> Result<f64> {
    let stable = |cfl: f64| -> Result<bool> {
        let mut cfg = RunConfig::new(ProblemId::Smooth1d, model);
        cfg.degree = Some(degree);
        cfg.cells = Some([cells, 1]);
        cfg.cfl = Some(cfl);
        cfg.safety = Some(1.0);
        cfg.blending = Some(false);
        let (spec, mut solver) = build_solver(&cfg)?;
        let res = advance_to(&mut solver, f64::INFINITY, Some(steps), |_, _| {});
        if res.is_err() {
            return Ok(false);
        }
        let rho = match densities(&solver.field, model) {
            Ok(r) => r,
            Err(_) => return Ok(false),
        };
        let t = solver.time;
        let errs = error_norms(&solver.field, &solver.scheme.basis, &rho, |x, y| {
            spec.exact(x, y, t).unwrap().rho
        });
        Ok(errs.linf < 0.1)
    };
    let (mut lo, mut hi) = (0.01, 1.0);
    if !stable(lo)? {
        return Err(Error::Domain(format!("N={degree}: unstable even at CFL {lo}")));
    }
    for _ in 0..14 {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.98 * lo)
}
