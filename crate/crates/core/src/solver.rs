//! Time stepping: one LWFR step with blending, flux correction and scaling.
//!
//! A step runs in phase-separated passes over elements and faces. Each pass
//! only reads the outputs of earlier passes, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;

use crate::basis::Mesh;
use crate::blending::{self, IndicatorParams};
use crate::eos;
use crate::error::{Error, Result};
use crate::flux::max_wave_speed;
use crate::harness::boundary::{ghost_trace, Boundaries};
use crate::lwfr::{
    ea_inter_element_flux, low_order_face_flux, ElementFluxes, ElementInput, Scheme, Trace,
};
use crate::state::{Conserved, Direction, FluxVector, Primitive};

/// Switches and constants of the limiting machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterParams {
    pub indicator: IndicatorParams,
    /// Apply the face-flux admissibility correction.
    pub flux_correction: bool,
    /// Apply the final Zhang–Shu scaling.
    pub zhang_shu: bool,
    /// Record the mean-equivalence deviation every step (costs a few element means).
    pub check_means: bool,
}

impl Default for LimiterParams {
    fn default() -> Self {
        LimiterParams {
            indicator: IndicatorParams::default(),
            flux_correction: true,
            zhang_shu: true,
            check_means: false,
        }
    }
}

/// Counters of one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub dt: f64,
    pub scaling_activations: usize,
    pub scaling_fallbacks: usize,
    pub flux_corrections: usize,
    pub low_order_fallbacks: usize,
    pub zhang_shu_activations: usize,
    pub blended_elements: usize,
    pub max_alpha: f64,
    /// Largest relative difference between the high-order, low-order and
    /// finite-volume element means (only when `check_means` is on).
    pub mean_deviation: f64,
}

impl StepStats {
    pub fn accumulate(&mut self, o: &StepStats) {
        self.scaling_activations += o.scaling_activations;
        self.scaling_fallbacks += o.scaling_fallbacks;
        self.flux_corrections += o.flux_corrections;
        self.low_order_fallbacks += o.low_order_fallbacks;
        self.zhang_shu_activations += o.zhang_shu_activations;
        self.blended_elements += o.blended_elements;
        self.max_alpha = self.max_alpha.max(o.max_alpha);
        self.mean_deviation = self.mean_deviation.max(o.mean_deviation);
    }
}

/// Nodal solution on a mesh. Node p of element e is `u[e * nodes_per_element + p]`;
/// elements are ordered row by row (x fastest) and nodes likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub mesh: Mesh,
    pub degree: usize,
    pub u: Vec<Conserved>,
}

impl Field {
    pub fn nodes_per_element(&self) -> usize {
        (self.degree + 1).pow(self.mesh.dim as u32)
    }

    pub fn element(&self, e: usize) -> &[Conserved] {
        let nn = self.nodes_per_element();
        &self.u[e * nn..(e + 1) * nn]
    }

    /// Physical coordinates of node p of element e.
    pub fn node_position(&self, nodes: &[f64], e: usize, p: usize) -> [f64; 2] {
        let n1 = self.degree + 1;
        let nx = self.mesh.cells[0];
        let (ex, ey) = (e % nx, e / nx);
        let x = self.mesh.coord(0, ex, nodes[p % n1]);
        let y = if self.mesh.dim == 2 {
            self.mesh.coord(1, ey, nodes[p / n1])
        } else {
            0.0
        };
        [x, y]
    }
}

/// Owns the solution and the per-step work buffers.
pub struct Solver {
    pub scheme: Scheme,
    pub field: Field,
    pub boundaries: Boundaries,
    pub limiter: LimiterParams,
    pub cfl: f64,
    pub safety: f64,
    pub time: f64,
    pub steps: usize,
    prims: Vec<Primitive>,
    means: Vec<Conserved>,
    lam_means: Vec<[f64; 2]>,
    alpha_raw: Vec<f64>,
    alpha: Vec<f64>,
    fluxes: Vec<ElementFluxes>,
    face_x: Vec<FluxVector>,
    face_y: Vec<FluxVector>,
    face_x_stats: Vec<StepStats>,
    face_y_stats: Vec<StepStats>,
}

impl Solver {
    pub fn new(scheme: Scheme, field: Field, boundaries: Boundaries, limiter: LimiterParams, cfl: f64, safety: f64) -> Result<Self> {
        if scheme.dim != field.mesh.dim || scheme.degree() != field.degree {
            return Err(Error::Config("scheme and field disagree on dimension or degree".into()));
        }
        boundaries.validate(scheme.dim)?;
        let ne = field.mesh.n_elements();
        let nn = scheme.nodes_per_element();
        if field.u.len() != ne * nn {
            return Err(Error::Config(format!("field has {} nodes, expected {}", field.u.len(), ne * nn)));
        }
        let lines = scheme.lines();
        let [nx, ny] = field.mesh.cells;
        let nfx = (nx + 1) * ny;
        let nfy = if scheme.dim == 2 { nx * (ny + 1) } else { 0 };
        let fluxes = (0..ne).map(|_| scheme.empty_output()).collect();
        Ok(Solver {
            prims: vec![Primitive::new_1d(1.0, 0.0, 1.0); ne * nn],
            means: vec![Conserved::ZERO; ne],
            lam_means: vec![[0.0; 2]; ne],
            alpha_raw: vec![0.0; ne],
            alpha: vec![0.0; ne],
            fluxes,
            face_x: vec![Conserved::ZERO; nfx * lines],
            face_y: vec![Conserved::ZERO; nfy * lines],
            face_x_stats: vec![StepStats::default(); nfx],
            face_y_stats: vec![StepStats::default(); nfy],
            scheme,
            field,
            boundaries,
            limiter,
            cfl,
            safety,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn means(&self) -> &[Conserved] {
        &self.means
    }

    fn admissibility_error(&self, element: usize, reason: String) -> Error {
        Error::Admissibility {
            step: self.steps,
            element,
            reason,
        }
    }

    /// Primitives, means, spectral radii and blending coefficients of the current field.
    fn prepare(&mut self) -> Result<()> {
        let scheme = &self.scheme;
        let nn = scheme.nodes_per_element();
        let dim = scheme.dim;
        let ind = self.limiter.indicator;
        let u = &self.field.u;
        let results: Vec<Result<()>> = self
            .prims
            .par_chunks_mut(nn)
            .zip(self.means.par_iter_mut())
            .zip(self.lam_means.par_iter_mut())
            .zip(self.alpha_raw.par_iter_mut())
            .enumerate()
            .map(|(e, (((prims, mean), lam), alpha))| {
                let ue = &u[e * nn..(e + 1) * nn];
                for (p, (prim, state)) in prims.iter_mut().zip(ue).enumerate() {
                    *prim = scheme.recover(state).map_err(|err| Error::FluxArgument {
                        element: e,
                        node: p,
                        stage: 0,
                        source: Box::new(err),
                    })?;
                }
                *mean = scheme.element_mean(ue);
                let mean_prim = scheme.recover(mean)?;
                for a in 0..dim {
                    lam[a] = max_wave_speed(scheme.eos, &mean_prim, Direction::from_index(a));
                }
                *alpha = blending::smoothness_alpha(prims, &scheme.basis, dim, &ind);
                Ok(())
            })
            .collect();
        for (e, r) in results.into_iter().enumerate() {
            if let Err(err) = r {
                return Err(self.admissibility_error(e, err.to_string()));
            }
        }
        self.smooth_alpha();
        Ok(())
    }

    /// α_e ← max(α_e, ½ α_neighbour) over face neighbours.
    fn smooth_alpha(&mut self) {
        let [nx, ny] = self.field.mesh.cells;
        let dim = self.scheme.dim;
        let px = self.boundaries.periodic(0);
        let py = dim == 2 && self.boundaries.periodic(1);
        let raw = &self.alpha_raw;
        for e in 0..raw.len() {
            let (ex, ey) = (e % nx, e / nx);
            let mut a = raw[e];
            let mut visit = |n: usize| a = a.max(0.5 * raw[n]);
            if ex > 0 {
                visit(e - 1);
            } else if px {
                visit(e + nx - 1);
            }
            if ex + 1 < nx {
                visit(e + 1);
            } else if px {
                visit(e + 1 - nx);
            }
            if dim == 2 {
                if ey > 0 {
                    visit(e - nx);
                } else if py {
                    visit(e + nx * (ny - 1));
                }
                if ey + 1 < ny {
                    visit(e + nx);
                } else if py {
                    visit(e - nx * (ny - 1));
                }
            }
            self.alpha[e] = a;
        }
    }

    /// Stable time step for the current field, clipped to reach `t_final` exactly.
    pub fn stable_dt(&mut self, t_final: f64) -> Result<f64> {
        self.prepare()?;
        Ok(self.dt_from_means(t_final))
    }

    fn dt_from_means(&self, t_final: f64) -> f64 {
        blending::compute_dt(
            &self.lam_means,
            self.field.mesh.spacing,
            self.scheme.dim,
            self.safety,
            self.cfl,
            t_final - self.time,
        )
    }

    /// Advances one step of the CFL-limited size, not passing `t_final`.
    pub fn step(&mut self, t_final: f64) -> Result<StepStats> {
        self.prepare()?;
        let dt = self.dt_from_means(t_final);
        self.advance(dt)
    }

    /// Advances by a given dt (the caller is responsible for stability).
    pub fn step_with_dt(&mut self, dt: f64) -> Result<StepStats> {
        self.prepare()?;
        self.advance(dt)
    }

    fn advance(&mut self, dt: f64) -> Result<StepStats> {
        let dim = self.scheme.dim;
        let spacing = self.field.mesh.spacing;
        let dt_dx = [dt / spacing[0], if dim == 2 { dt / spacing[1] } else { 0.0 }];
        let mut stats = StepStats {
            dt,
            ..Default::default()
        };

        // Phase 1: element-local time-averaged fluxes and traces.
        {
            let scheme = &self.scheme;
            let nn = scheme.nodes_per_element();
            let (u, prims, means, lams) = (&self.field.u, &self.prims, &self.means, &self.lam_means);
            let results: Vec<Result<()>> = self
                .fluxes
                .par_iter_mut()
                .enumerate()
                .map_init(
                    || scheme.scratch(),
                    |sc, (e, out)| {
                        let lam = lams[e];
                        let mu = if dim == 2 {
                            let sx = lam[0] / spacing[0];
                            let sy = lam[1] / spacing[1];
                            [sx / (sx + sy), sy / (sx + sy)]
                        } else {
                            [1.0, 1.0]
                        };
                        let input = ElementInput {
                            index: e,
                            u: &u[e * nn..(e + 1) * nn],
                            prims: &prims[e * nn..(e + 1) * nn],
                            mean: means[e],
                            lam_mean: lam,
                            dt_dx,
                            mu,
                        };
                        scheme.compute_element(&input, out, sc)
                    },
                )
                .collect();
            for (e, r) in results.into_iter().enumerate() {
                if let Err(err) = r {
                    return Err(self.admissibility_error(e, err.to_string()));
                }
            }
            for f in &self.fluxes {
                stats.scaling_activations += f.scaling_activations;
                stats.scaling_fallbacks += f.scaling_fallbacks;
            }
        }

        // Phase 2: face fluxes.
        self.assemble_faces(0, dt);
        if dim == 2 {
            self.assemble_faces(1, dt);
        }
        for s in self.face_x_stats.iter().chain(&self.face_y_stats) {
            stats.accumulate(s);
        }

        // Phase 3: high- and low-order updates, blending and scaling.
        let new_u = self.update_elements(dt_dx, &mut stats)?;
        self.field.u = new_u;
        self.time += dt;
        self.steps += 1;
        Ok(stats)
    }

    /// Final fluxes on every face normal to `axis`.
    fn assemble_faces(&mut self, axis: usize, dt: f64) {
        let scheme = &self.scheme;
        let lines = scheme.lines();
        let [nx, ny] = self.field.mesh.cells;
        let dir = Direction::from_index(axis);
        let periodic = self.boundaries.periodic(axis);
        let bcs = self.boundaries.sides[axis];
        let fluxes = &self.fluxes;
        let alpha = &self.alpha;
        let limiter = self.limiter;
        let mesh = &self.field.mesh;
        let nodes = &scheme.basis.nodes;
        let t_mid = self.time + 0.5 * dt;
        // Faces normal to x: index fx + (nx+1)·ey. Faces normal to y: ex + nx·fy.
        let n_along = if axis == 0 { nx } else { ny };
        let elem = |along: usize, across: usize| if axis == 0 { across * nx + along } else { along * nx + across };
        let trace = |e: usize, side: usize, k: usize| &fluxes[e].traces[(axis * 2 + side) * lines + k];
        let (flux_buf, stat_buf) = if axis == 0 {
            (&mut self.face_x, &mut self.face_x_stats)
        } else {
            (&mut self.face_y, &mut self.face_y_stats)
        };
        flux_buf
            .par_chunks_mut(lines)
            .zip(stat_buf.par_iter_mut())
            .enumerate()
            .for_each(|(f, (out, st))| {
                *st = StepStats::default();
                let (pos_along, across) = if axis == 0 { (f % (nx + 1), f / (nx + 1)) } else { (f / nx, f % nx) };
                let left_e = if pos_along > 0 {
                    Some(elem(pos_along - 1, across))
                } else if periodic {
                    Some(elem(n_along - 1, across))
                } else {
                    None
                };
                let right_e = if pos_along < n_along {
                    Some(elem(pos_along, across))
                } else if periodic {
                    Some(elem(0, across))
                } else {
                    None
                };
                let alpha_face = match (left_e, right_e) {
                    (Some(l), Some(r)) => 0.5 * (alpha[l] + alpha[r]),
                    (Some(l), None) => alpha[l],
                    (None, Some(r)) => alpha[r],
                    (None, None) => unreachable!(),
                };
                for k in 0..lines {
                    // Transverse coordinate of the face point, for position-dependent boundaries.
                    let pos = || {
                        if mesh.dim == 1 {
                            0.0
                        } else {
                            let t_axis = 1 - axis;
                            mesh.coord(t_axis, across, nodes[k])
                        }
                    };
                    let (l, r): (Trace, Trace) = match (left_e, right_e) {
                        (Some(l), Some(r)) => (*trace(l, 1, k), *trace(r, 0, k)),
                        (None, Some(r)) => {
                            let inner = trace(r, 0, k);
                            (ghost_trace(&bcs[0], scheme.eos, inner, dir, pos(), t_mid), *inner)
                        }
                        (Some(l), None) => {
                            let inner = trace(l, 1, k);
                            (*inner, ghost_trace(&bcs[1], scheme.eos, inner, dir, pos(), t_mid))
                        }
                        (None, None) => unreachable!(),
                    };
                    let high = ea_inter_element_flux(&l, &r);
                    let low = low_order_face_flux(&l, &r);
                    let initial = blending::blend_face_flux_initial(&high, &low, alpha_face);
                    out[k] = if limiter.flux_correction {
                        let (f, o) = blending::admissibility_flux_correction(&initial, &low, &l, &r);
                        st.flux_corrections += o.corrected as usize;
                        st.low_order_fallbacks += o.low_order_fallback as usize;
                        f
                    } else {
                        initial
                    };
                }
            });
    }

    fn update_elements(&self, dt_dx: [f64; 2], stats: &mut StepStats) -> Result<Vec<Conserved>> {
        let scheme = &self.scheme;
        let b = &scheme.basis;
        let nn = scheme.nodes_per_element();
        let n1 = scheme.n1();
        let n = scheme.degree();
        let lines = scheme.lines();
        let dim = scheme.dim;
        let nx = self.field.mesh.cells[0];
        let limiter = self.limiter;
        let (face_x, face_y) = (&self.face_x, &self.face_y);
        let face = |e: usize, axis: usize, side: usize, k: usize| -> FluxVector {
            let (ex, ey) = (e % nx, e / nx);
            if axis == 0 {
                face_x[(ey * (nx + 1) + ex + side) * lines + k]
            } else {
                face_y[((ey + side) * nx + ex) * lines + k]
            }
        };
        let mut new_u = vec![Conserved::ZERO; self.field.u.len()];
        let results: Vec<Result<StepStats>> = new_u
            .par_chunks_mut(nn)
            .enumerate()
            .map_init(
                || (vec![Conserved::ZERO; nn], vec![Conserved::ZERO; nn], vec![Conserved::ZERO; nn]),
                |(res, high, low), (e, out)| {
                    let mut st = StepStats::default();
                    let u = &self.field.u[e * nn..(e + 1) * nn];
                    let fl = &self.fluxes[e];
                    scheme.high_order_residual(fl, dt_dx, |a, s, k| face(e, a, s, k), res);
                    for p in 0..nn {
                        high[p] = u[p] - res[p];
                    }
                    // Subcell finite-volume update.
                    for p in 0..nn {
                        let (i, j) = (p % n1, p / n1);
                        let mut acc = u[p];
                        for a in 0..dim {
                            let (pos, k) = if a == 0 { (i, j) } else { (j, i) };
                            let left = if pos == 0 { face(e, a, 0, k) } else { fl.sub_flux[a][k * n + pos - 1] };
                            let right = if pos == n { face(e, a, 1, k) } else { fl.sub_flux[a][k * n + pos] };
                            acc = acc.add_scaled(-dt_dx[a] / b.weights[pos], &(right - left));
                        }
                        low[p] = acc;
                    }
                    let alpha = self.alpha[e];
                    if alpha > 0.0 {
                        st.blended_elements = 1;
                    }
                    st.max_alpha = alpha;
                    blending::blend_solutions(high, low, alpha, out);

                    if limiter.check_means {
                        let mean = self.means[e];
                        let mut fv = mean;
                        for a in 0..dim {
                            for k in 0..lines {
                                let w = if dim == 2 { b.weights[k] } else { 1.0 };
                                fv = fv.add_scaled(-dt_dx[a] * w, &(face(e, a, 1, k) - face(e, a, 0, k)));
                            }
                        }
                        let scale = mean.as_array().iter().fold(0.0f64, |m, x| m.max(x.abs()));
                        let mh = scheme.element_mean(high);
                        let ml = scheme.element_mean(low);
                        let dev = |x: Conserved| {
                            (x - fv).as_array().iter().fold(0.0f64, |m, d| m.max(d.abs())) / scale
                        };
                        st.mean_deviation = dev(mh).max(dev(ml));
                    }

                    if limiter.zhang_shu {
                        let mean = scheme.element_mean(out);
                        match blending::zhang_shu_scale(out, &mean) {
                            Ok(changed) => st.zhang_shu_activations = changed as usize,
                            Err(err) => return Err(Error::Domain(format!("inadmissible element mean: {err}"))),
                        }
                    }
                    for (p, v) in out.iter().enumerate() {
                        let (d, q) = eos::constraint_values(v);
                        if !(d > 0.0 && q > 0.0) {
                            return Err(Error::Domain(format!("node {p} has D = {d:e}, q = {q:e}")));
                        }
                    }
                    Ok(st)
                },
            )
            .collect();
        for (e, r) in results.into_iter().enumerate() {
            match r {
                Ok(s) => stats.accumulate(&s),
                Err(err) => return Err(self.admissibility_error(e, err.to_string())),
            }
        }
        Ok(new_u)
    }
}
