//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Criteria can be selected by number: `cargo test --release --test acceptance -- 1 4 7`.
//! `RHD_ACCEPTANCE_FULL=1` runs the 2-D qualitative problems at 100² cells and
//! the jet to t = 6 instead of the reduced defaults (40², jet to t = 2).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhd_lwfr::basis::{build_basis, Mesh};
use rhd_lwfr::blending::{IndicatorParams, DEFAULT_CFL};
use rhd_lwfr::eos::{
    self, check_taub, cons_to_prim_id, cons_to_prim_rc_with, prim_to_cons, rc_r_factor, rc_s_function,
    RcStepControl, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use rhd_lwfr::flux::{is_admissible, max_wave_speed, physical_flux, rusanov_flux};
use rhd_lwfr::harness::boundary::{BoundaryCondition, Boundaries};
use rhd_lwfr::harness::norms::error_norms;
use rhd_lwfr::harness::problems::ProblemId;
use rhd_lwfr::harness::reference::reference_solution;
use rhd_lwfr::harness::{
    advance_to, build_solver, convergence_study, densities, run, total_mass, RunConfig, RunOutput,
};
use rhd_lwfr::lwfr::Scheme;
use rhd_lwfr::solver::{Field, LimiterParams, Solver};
use rhd_lwfr::{Conserved, Direction, EosModel, Primitive};

const ID53: EosModel = EosModel::Ideal { gamma: 5.0 / 3.0 };
const MODELS: [EosModel; 4] = [ID53, EosModel::Tm, EosModel::Ip, EosModel::Rc];

type Outcome = Result<(bool, String), String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ρ and p uniform in [1e-6, 1e3], speed uniform below 1 − 1e-6, random direction.
fn uniform_state(r: &mut ChaCha8Rng) -> Primitive {
    let rho = r.gen_range(1e-6..1e3);
    let p = r.gen_range(1e-6..1e3);
    let speed = r.gen_range(0.0..1.0) * (1.0 - 1e-6);
    let ang = r.gen_range(0.0..std::f64::consts::TAU);
    Primitive::new(rho, [speed * ang.cos(), speed * ang.sin()], p)
}

fn fmt_orders(orders: &[f64]) -> String {
    orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ")
}

/// L¹ orders between successive rows of a convergence study, and the finest error.
fn l1_study(cfg: &RunConfig, cells: &[usize]) -> Result<(Vec<f64>, f64), String> {
    let rows = convergence_study(cfg, cells).map_err(|e| e.to_string())?;
    let orders = rows.iter().filter_map(|r| r.orders.map(|o| o[0])).collect();
    Ok((orders, rows.last().unwrap().norms.l1))
}

fn smooth_config(problem: ProblemId, eos: EosModel, degree: usize) -> RunConfig {
    let mut cfg = RunConfig::new(problem, eos);
    cfg.degree = Some(degree);
    cfg
}

/// Every nodal state recovers to positive ρ, p and |v| < 1.
fn all_admissible(out: &RunOutput) -> Result<(), String> {
    for (k, u) in out.solver.field.u.iter().enumerate() {
        let ok = eos::recover(out.spec.eos, u).map(|p| p.is_physical()).unwrap_or(false);
        if !ok {
            return Err(format!("node {k} inadmissible: {u:?}"));
        }
    }
    Ok(())
}

fn c1_convergence_1d() -> Outcome {
    let start = Instant::now();
    let (orders, finest) = l1_study(&smooth_config(ProblemId::Smooth1d, ID53, 3), &[32, 64, 128, 256])?;
    let secs = start.elapsed().as_secs_f64();
    let bound = 3.0 * 3.84068e-11;
    let ok = orders.iter().all(|&o| o >= 3.7) && finest <= bound && secs < 60.0;
    Ok((ok, format!("orders [{}], L1(256) = {finest:.4e} (bound {bound:.4e}), {secs:.1} s", fmt_orders(&orders))))
}

fn c2_convergence_eos() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for eos in [EosModel::Tm, EosModel::Ip, EosModel::Rc] {
        let (orders, _) = l1_study(&smooth_config(ProblemId::Smooth1d, eos, 3), &[64, 128, 256])?;
        let o = *orders.last().unwrap();
        ok &= (3.5..=5.0).contains(&o);
        parts.push(format!("{eos} N=3 {o:.3}"));
    }
    for eos in MODELS {
        let (orders, _) = l1_study(&smooth_config(ProblemId::Smooth1d, eos, 4), &[32, 64, 128])?;
        let o = *orders.last().unwrap();
        ok &= o >= 4.5;
        parts.push(format!("{eos} N=4 {o:.3}"));
    }
    Ok((ok, parts.join("; ")))
}

fn c3_convergence_2d() -> Outcome {
    let start = Instant::now();
    let (orders, finest) = l1_study(&smooth_config(ProblemId::Smooth2d, ID53, 3), &[32, 64, 128])?;
    let secs = start.elapsed().as_secs_f64();
    let ok = orders.iter().all(|&o| o >= 3.7) && secs < 600.0;
    Ok((ok, format!("orders [{}], L1(128²) = {finest:.4e}, {secs:.1} s", fmt_orders(&orders))))
}

fn c4_golden_recovery() -> Outcome {
    let g = 5.0 / 3.0;
    let cases = [
        ([0.001, 25.0, 25.001], [1.9913276960883976e-5, 0.999801711041084, 0.003958207130631426]),
        (
            [0.26215012530349685, 42.10522585617847, 42.10705317285818],
            [0.003097928215833704, 0.999930172301406, 0.001112999656126819],
        ),
        ([0.1, 50.0, 50.01], [0.004084552892614892, 0.9991654731658531, 0.03176119254315]),
    ];
    let mut worst_rel = 0.0f64;
    let mut worst_phi = 0.0f64;
    for (c, expect) in cases {
        let u = Conserved::new_1d(c[0], c[1], c[2]);
        let r = cons_to_prim_id(&u, g, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?.prim;
        worst_rel = worst_rel
            .max(rel(r.rho, expect[0]))
            .max(rel(r.v[0], expect[1]))
            .max(rel(r.p, expect[2]));
        worst_phi = worst_phi.max(eos::id_phi_residual(r.p, &u, g).map_err(|e| e.to_string())?.abs());
    }
    let ok = worst_rel <= 1e-9 && worst_phi <= 1e-10;
    Ok((ok, format!("max relative error {worst_rel:.2e}, max |Φ(p)| {worst_phi:.2e}")))
}

fn c5_rc_newton() -> Outcome {
    let mut r = rng(5);
    let n = 100_000;
    let (mut sampled, mut rejected) = (0usize, 0usize);
    let (mut nc_iters, mut nc_fail, mut nc_not_increasing) = (0usize, 0usize, 0usize);
    let (mut st_iters, mut st_fail, mut st_below_e, mut st_not_increasing) = (0usize, 0usize, 0usize, 0usize);
    let mut trace = Vec::new();
    while sampled < n {
        let rho = 10f64.powf(r.gen_range(-8.0..6.0));
        let p = 10f64.powf(r.gen_range(-8.0..6.0));
        let speed = r.gen_range(0.0..1.0) * (1.0 - 1e-8);
        let ang = r.gen_range(0.0..std::f64::consts::TAU);
        let u = prim_to_cons(EosModel::Rc, &Primitive::new(rho, [speed * ang.cos(), speed * ang.sin()], p));
        if eos::constraint_values(&u).1 <= 0.0 {
            // Rounding in the conversion can leave no admissible state to recover.
            rejected += 1;
            continue;
        }
        sampled += 1;
        match cons_to_prim_rc_with(&u, DEFAULT_TOL, DEFAULT_MAX_ITER, RcStepControl::NonCrossing, Some(&mut trace)) {
            Ok(rep) => {
                nc_iters += rep.iterations;
                if trace[0] != u.e || trace.windows(2).any(|w| w[1] <= w[0]) {
                    nc_not_increasing += 1;
                }
            }
            Err(_) => nc_fail += 1,
        }
        match cons_to_prim_rc_with(&u, DEFAULT_TOL, DEFAULT_MAX_ITER, RcStepControl::Standard, Some(&mut trace)) {
            Ok(rep) => {
                st_iters += rep.iterations;
                if trace.len() > 1 && trace[1] > u.e && trace[1..].iter().any(|&x| x <= u.e) {
                    st_below_e += 1;
                }
                if trace.windows(2).any(|w| w[1] <= w[0]) {
                    st_not_increasing += 1;
                }
            }
            Err(_) => st_fail += 1,
        }
    }
    let nc_mean = nc_iters as f64 / (n - nc_fail) as f64;
    let st_mean = st_iters as f64 / (n - st_fail).max(1) as f64;
    let ok = nc_fail == 0 && nc_not_increasing == 0 && nc_mean <= 8.0 && st_fail == 0 && st_below_e == 0;
    Ok((
        ok,
        format!(
            "non-crossing: {nc_fail} failures, {nc_not_increasing} non-increasing, mean {nc_mean:.2} iterations; \
             plain Newton: {st_fail} failures, {st_below_e} dropping to E, {st_not_increasing} non-monotone, \
             mean {st_mean:.2}; {rejected} draws rejected (q ≤ 0 after rounding)"
        ),
    ))
}

fn c6_round_trip() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for eos in MODELS {
        for _ in 0..10_000 {
            let prim = uniform_state(&mut r);
            let back = match eos::recover(eos, &prim_to_cons(eos, &prim)) {
                Ok(b) => b,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let mut err = rel(back.rho, prim.rho).max(rel(back.p, prim.p));
            for a in 0..2 {
                err = err.max(if prim.v[a].abs() < 1e-3 {
                    (back.v[a] - prim.v[a]).abs()
                } else {
                    rel(back.v[a], prim.v[a])
                });
            }
            worst = worst.max(err);
        }
    }
    let ok = failures == 0 && worst <= 1e-9;
    Ok((ok, format!("4 × 10⁴ states, {failures} failures, max relative error {worst:.2e}")))
}

fn c7_rc_appendix() -> Outcome {
    let r1 = rc_r_factor(1.0);
    let mut decreasing = true;
    let mut inf = f64::INFINITY;
    let mut prev = r1;
    for k in 1..=10_000 {
        let h = 1.0 + 99.0 * k as f64 / 10_000.0;
        let v = rc_r_factor(h);
        decreasing &= v < prev;
        inf = inf.min(v);
        prev = v;
    }
    let mut r = rng(7);
    let mut nonpositive = 0;
    for _ in 0..10_000 {
        let u = prim_to_cons(EosModel::Rc, &uniform_state(&mut r));
        let pi = u.e * r.gen_range(1.0..10.0);
        if !(rc_s_function(pi, &u).1 > 0.0) {
            nonpositive += 1;
        }
    }
    let ok = (r1 - 1.6).abs() <= 1e-12 && decreasing && inf > 1.5 && nonpositive == 0;
    Ok((
        ok,
        format!("R(1) = {r1:.15}, decreasing: {decreasing}, min R = {inf:.6}, S′ ≤ 0 at {nonpositive} of 10⁴ points"),
    ))
}

fn c8_theorem_one() -> Outcome {
    let mut r = rng(8);
    let mut shifted_bad = 0;
    let mut taub_bad = 0;
    for eos in MODELS {
        for _ in 0..100_000 {
            let prim = uniform_state(&mut r);
            let dir = Direction::from_index(r.gen_range(0..2));
            let u = prim_to_cons(eos, &prim);
            let lam = max_wave_speed(eos, &prim, dir);
            let f = physical_flux(&u, &prim, dir);
            if !(lam < 1.0 && is_admissible(&u.add_scaled(1.0 / lam, &f)) && is_admissible(&u.add_scaled(-1.0 / lam, &f))) {
                shifted_bad += 1;
            }
            if !check_taub(eos, prim.p, prim.rho).unwrap_or(false) {
                taub_bad += 1;
            }
        }
    }
    let mut fv_bad = 0;
    for k in 0..10_000 {
        let eos = MODELS[k % 4];
        let dir = Direction::X;
        let prims = [uniform_state(&mut r), uniform_state(&mut r), uniform_state(&mut r)];
        let [ul, uc, ur] = prims.map(|p| prim_to_cons(eos, &p));
        let lam = |p: &Primitive| max_wave_speed(eos, p, dir);
        let bound = 2.0 / (lam(&prims[0]).max(lam(&prims[1])) + lam(&prims[1]).max(lam(&prims[2])));
        let ratio = 0.9 * bound;
        let step = (|| -> Option<Conserved> {
            let fl = rusanov_flux(eos, &ul, &uc, dir).ok()?;
            let fr = rusanov_flux(eos, &uc, &ur, dir).ok()?;
            Some(uc - (fr - fl) * ratio)
        })();
        if !step.map(|s| is_admissible(&s)).unwrap_or(false) {
            fv_bad += 1;
        }
    }
    let ok = shifted_bad == 0 && fv_bad == 0 && taub_bad == 0;
    Ok((
        ok,
        format!("u ± f/Λ: {shifted_bad} of 4 × 10⁵ inadmissible; FV step: {fv_bad} of 10⁴; Taub: {taub_bad} violations"),
    ))
}

fn c9_shock_robustness() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for eos in MODELS {
        let mut cfg = RunConfig::new(ProblemId::Rp1, eos);
        cfg.cells = Some([500, 1]);
        cfg.degree = Some(4);
        let out = run(&cfg).map_err(|e| format!("rp1 {eos}: {e}"))?;
        all_admissible(&out).map_err(|e| format!("rp1 {eos}: {e}"))?;
        let reference = reference_solution(&out.spec, 20_000, 0.9).map_err(|e| e.to_string())?;
        let rho = densities(&out.solver.field, eos).map_err(|e| e.to_string())?;
        let l1 = error_norms(&out.solver.field, &out.solver.scheme.basis, &rho, |x, _| reference.sample(x).rho).l1;
        ok &= l1 <= 0.05;
        parts.push(format!("rp1 {eos} L1 {l1:.4}"));
    }
    for problem in [ProblemId::Rp2, ProblemId::Rp3, ProblemId::DensityPert, ProblemId::Blast] {
        let mut cfg = RunConfig::new(problem, EosModel::ideal(problem.default_gamma()).unwrap());
        cfg.cells = Some([1000, 1]);
        let out = run(&cfg).map_err(|e| format!("{problem}: {e}"))?;
        all_admissible(&out).map_err(|e| format!("{problem}: {e}"))?;
        parts.push(format!("{problem} ok ({} steps)", out.stats.steps));
    }
    Ok((ok, parts.join("; ")))
}

fn free_stream_deviation(eos: EosModel, dim: usize, bc: BoundaryCondition) -> Result<f64, String> {
    let degree = 3;
    let prim = Primitive::new(1.0, [0.5, -0.3], 1.0);
    let mesh = if dim == 1 {
        Mesh::new_1d(0.0, 1.0, 16)
    } else {
        Mesh::new_2d([0.0, 0.0], [1.0, 1.0], [8, 8])
    }
    .map_err(|e| e.to_string())?;
    let u0 = prim_to_cons(eos, &prim);
    let u = vec![u0; mesh.n_elements() * (degree + 1usize).pow(dim as u32)];
    let field = Field { mesh, degree, u };
    let scheme = Scheme::new(eos, build_basis(degree).unwrap(), dim, true).map_err(|e| e.to_string())?;
    let limiter = LimiterParams {
        indicator: IndicatorParams::default(),
        flux_correction: true,
        zhang_shu: true,
        check_means: false,
    };
    let mut s = Solver::new(scheme, field, Boundaries::uniform(bc), limiter, DEFAULT_CFL[degree - 1], 0.98)
        .map_err(|e| e.to_string())?;
    for _ in 0..100 {
        s.step(f64::INFINITY).map_err(|e| e.to_string())?;
    }
    let scale = u0.as_array().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(s.field
        .u
        .iter()
        .map(|u| (*u - u0).as_array().iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale)
        .fold(0.0, f64::max))
}

fn c10_invariants() -> Outcome {
    let mut free = 0.0f64;
    for eos in MODELS {
        for dim in [1, 2] {
            for bc in [BoundaryCondition::Periodic, BoundaryCondition::Outflow] {
                free = free.max(free_stream_deviation(eos, dim, bc)?);
            }
        }
    }

    let mut means = 0.0f64;
    for (problem, cells) in [(ProblemId::Rp1, [200, 1]), (ProblemId::Rp2d(1), [24, 24])] {
        let mut cfg = RunConfig::new(problem, ID53);
        cfg.cells = Some(cells);
        cfg.check_means = true;
        let (spec, mut solver) = build_solver(&cfg).map_err(|e| e.to_string())?;
        let t_final = if problem.dim() == 1 { spec.t_final } else { 0.1 };
        advance_to(&mut solver, t_final, None, |_, s| means = means.max(s.mean_deviation)).map_err(|e| e.to_string())?;
    }

    let mut mass = 0.0f64;
    for (problem, cells) in [(ProblemId::Smooth1d, [64, 1]), (ProblemId::Smooth2d, [16, 16])] {
        let mut cfg = RunConfig::new(problem, ID53);
        cfg.cells = Some(cells);
        let (spec, mut solver) = build_solver(&cfg).map_err(|e| e.to_string())?;
        let m0 = total_mass(&solver);
        advance_to(&mut solver, spec.t_final, None, |_, _| {}).map_err(|e| e.to_string())?;
        mass = mass.max(((total_mass(&solver) - m0) / m0).abs());
    }
    let ok = free <= 1e-13 && means <= 1e-12 && mass <= 1e-12;
    Ok((
        ok,
        format!("free stream {free:.2e}, mean equivalence {means:.2e}, relative mass drift {mass:.2e}"),
    ))
}

fn c11_qualitative_2d() -> Outcome {
    let full = std::env::var("RHD_ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let (rp_cells, jet_cells, jet_t) = if full { (100, [120, 125], 6.0) } else { (40, [120, 125], 2.0) };
    let mut parts = Vec::new();
    let mut ok = true;
    for k in 1..=5u8 {
        let problem = ProblemId::Rp2d(k);
        let mut cfg = RunConfig::new(problem, EosModel::ideal(problem.default_gamma()).unwrap());
        cfg.cells = Some([rp_cells, rp_cells]);
        let out = run(&cfg).map_err(|e| format!("{problem}: {e}"))?;
        all_admissible(&out).map_err(|e| format!("{problem}: {e}"))?;
        if k == 1 {
            let rho = densities(&out.solver.field, out.spec.eos).map_err(|e| e.to_string())?;
            let lo = rho.iter().fold(f64::INFINITY, |m, r| m.min(r.ln()));
            let hi = rho.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.ln()));
            ok &= lo >= -4.5 && hi <= 2.6;
            parts.push(format!("{problem} ln ρ in [{lo:.3}, {hi:.3}]"));
        } else {
            parts.push(format!("{problem} ok"));
        }
    }

    // Jet: stable, with a compressed bow shock ahead of the beam. The captured
    // shock and its precursor span a few cells, so the light-cone bound on the
    // disturbed region allows four cells of width.
    let mut cfg = RunConfig::new(ProblemId::Jet, EosModel::ideal(5.0 / 3.0).unwrap());
    cfg.cells = Some(jet_cells);
    cfg.t_final = Some(jet_t);
    let out = run(&cfg).map_err(|e| format!("jet: {e}"))?;
    all_admissible(&out).map_err(|e| format!("jet: {e}"))?;
    let field = &out.solver.field;
    let nn = field.nodes_per_element();
    let nodes = &out.solver.scheme.basis.nodes;
    let dy = (field.mesh.high[1] - field.mesh.low[1]) / jet_cells[1] as f64;
    let mut front = 0.0f64;
    let (mut peak_y, mut peak_rho) = (0.0f64, 0.0f64);
    for (k, u) in field.u.iter().enumerate() {
        let prim = eos::recover(out.spec.eos, u).map_err(|e| e.to_string())?;
        let [x, y] = field.node_position(nodes, k / nn, k % nn);
        if x.abs() < 1.0 {
            if (prim.rho - 1.0).abs() > 0.01 {
                front = front.max(y);
            }
            if prim.rho > peak_rho {
                (peak_y, peak_rho) = (y, prim.rho);
            }
        }
    }
    let jet_ok = peak_rho > 2.0 && peak_y > 0.3 * jet_t && front < jet_t + 4.0 * dy;
    ok &= jet_ok;
    parts.push(format!(
        "jet {}×{} t={jet_t}: peak ρ = {peak_rho:.2} at y = {peak_y:.2}, disturbed to y = {front:.2} (bound {:.2})",
        jet_cells[0],
        jet_cells[1],
        jet_t + 4.0 * dy
    ));
    Ok((ok, parts.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1-D convergence, ID, N=3", c1_convergence_1d),
        ("1-D convergence, TM/IP/RC and N=4", c2_convergence_eos),
        ("2-D convergence, ID, N=3", c3_convergence_2d),
        ("golden primitive recovery", c4_golden_recovery),
        ("RC Newton properties", c5_rc_newton),
        ("round trip", c6_round_trip),
        ("RC slope factor and S′", c7_rc_appendix),
        ("admissibility of shifted states and FV steps", c8_theorem_one),
        ("shock robustness", c9_shock_robustness),
        ("structural invariants", c10_invariants),
        ("qualitative 2-D runs", c11_qualitative_2d),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok((p, d)) => (p, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} {n:>2}. {name}: {detail} [{secs:.1} s]", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
