//! Lax–Wendroff flux reconstruction kernel.
//!
//! Temporal derivatives of the flux are approximated by central differences of
//! flux evaluations at perturbed states u^[r]_a = Σ_{k≤r} a^k/k! u^(k), with
//! u^(r) = −Σ_axes (Δt/Δx) ∂_ξ f^(r−1). The time-averaged flux is
//! F = Σ_r f^(r)/(r+1)!. Face values come from the same construction applied to
//! extrapolated u^(k) (extrapolate-and-average).
//!
//! Every difference stencil is written as sums of differences (f_a − f_{−a} or
//! f_a − f_0) so that constant states give exactly zero.

use crate::basis::BasisData;
use crate::eos::{self, EosModel};
use crate::error::{Error, Result};
use crate::flux::{max_wave_speed, physical_flux, rusanov_from_parts};
use crate::state::{Conserved, Direction, FluxVector, Primitive};

/// Offsets a of the perturbed states, in slot order.
pub const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Parity {
    /// c₁(f₁ − f₋₁) + c₂(f₂ − f₋₂)
    Odd,
    /// c₁((f₁ − f₀) + (f₋₁ − f₀)) + c₂((f₂ − f₀) + (f₋₂ − f₀))
    Even,
}

/// Difference formula for f^(r) at one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlwStage {
    parity: Parity,
    c1: f64,
    c2: f64,
}

impl AlwStage {
    /// Weights of f(u^[r]_a) for a = −2, −1, 0, 1, 2 (for inspection and tests).
    pub fn weights(&self) -> [f64; 5] {
        match self.parity {
            Parity::Odd => [-self.c2, -self.c1, 0.0, self.c1, self.c2],
            Parity::Even => [self.c2, self.c1, -2.0 * (self.c1 + self.c2), self.c1, self.c2],
        }
    }

    fn uses_outer(&self) -> bool {
        self.c2 != 0.0
    }

    #[inline]
    fn combine(&self, f0: &FluxVector, f: &[FluxVector; 4]) -> FluxVector {
        match self.parity {
            Parity::Odd => {
                let inner = (f[2] - f[1]) * self.c1;
                if self.c2 == 0.0 {
                    inner
                } else {
                    inner + (f[3] - f[0]) * self.c2
                }
            }
            Parity::Even => {
                let inner = ((f[2] - *f0) + (f[1] - *f0)) * self.c1;
                if self.c2 == 0.0 {
                    inner
                } else {
                    inner + ((f[3] - *f0) + (f[0] - *f0)) * self.c2
                }
            }
        }
    }
}

/// Stencils for f^(1), …, f^(N).
pub fn alw_stages(degree: usize) -> Result<Vec<AlwStage>> {
    let odd = |c1, c2| AlwStage {
        parity: Parity::Odd,
        c1,
        c2,
    };
    let even = |c1, c2| AlwStage {
        parity: Parity::Even,
        c1,
        c2,
    };
    match degree {
        1 => Ok(vec![odd(0.5, 0.0)]),
        2 => Ok(vec![odd(0.5, 0.0), even(1.0, 0.0)]),
        3 => Ok(vec![odd(8.0 / 12.0, -1.0 / 12.0), even(1.0, 0.0), odd(-1.0, 0.5)]),
        4 => Ok(vec![
            odd(8.0 / 12.0, -1.0 / 12.0),
            even(16.0 / 12.0, -1.0 / 12.0),
            odd(-1.0, 0.5),
            even(-4.0, 1.0),
        ]),
        n => Err(Error::UnsupportedDegree(n)),
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Counts how often the argument scaling changed a family.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScaleOutcome {
    pub theta_d: f64,
    pub theta_q: f64,
    /// Extra θ halvings needed because rounding left q ≤ 0 after the concavity bound.
    pub rounding_fallbacks: usize,
}

impl ScaleOutcome {
    pub fn activated(&self) -> bool {
        self.theta_d < 1.0 || self.theta_q < 1.0
    }
}

/// Scales a family of states toward an admissible reference so that every
/// member has D > ε_D and q > ε_q, where ε_c = min(c(reference)/10, 1e-13).
/// Families that already satisfy both bounds are returned unchanged.
pub fn scale_flux_arguments(states: &mut [Conserved], reference: &Conserved) -> ScaleOutcome {
    let mut out = ScaleOutcome {
        theta_d: 1.0,
        theta_q: 1.0,
        rounding_fallbacks: 0,
    };
    let (d_ref, q_ref) = eos::constraint_values(reference);
    let eps_d = (0.1 * d_ref).min(1e-13);
    let eps_q = (0.1 * q_ref).min(1e-13);

    let d_min = states.iter().map(|u| u.d).fold(f64::INFINITY, f64::min);
    if d_min < eps_d {
        let theta = ((eps_d - d_ref).abs() / (d_min - d_ref).abs()).min(1.0);
        for u in states.iter_mut() {
            *u = reference.add_scaled(theta, &(*u - *reference));
        }
        out.theta_d = theta;
    }

    let q_of = |u: &Conserved| eos::constraint_values(u).1;
    let q_min = states.iter().map(q_of).fold(f64::INFINITY, f64::min);
    if q_min < eps_q || !q_min.is_finite() {
        let mut theta = if q_min.is_finite() {
            ((eps_q - q_ref).abs() / (q_min - q_ref).abs()).min(1.0)
        } else {
            0.0
        };
        let originals: Vec<Conserved> = states.to_vec();
        loop {
            for (u, orig) in states.iter_mut().zip(&originals) {
                *u = reference.add_scaled(theta, &(*orig - *reference));
            }
            let ok = states.iter().all(|u| {
                let (d, q) = eos::constraint_values(u);
                d > 0.0 && q > 0.0
            });
            if ok || theta == 0.0 {
                break;
            }
            out.rounding_fallbacks += 1;
            theta = if out.rounding_fallbacks > 60 { 0.0 } else { 0.5 * theta };
        }
        out.theta_q = theta;
    }
    out
}

/// One side of an inter-element face as seen from an element (or a ghost).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Trace {
    /// Time-averaged solution U extrapolated to the face.
    pub u_avg: Conserved,
    /// Time-averaged normal flux from the face ALW construction.
    pub flux: FluxVector,
    /// Solution at the solution point next to the face.
    pub u_node: Conserved,
    /// Normal physical flux at that solution point.
    pub f_node: FluxVector,
    /// Normal spectral radius at that solution point.
    pub lam_node: f64,
    /// Normal spectral radius of the element mean.
    pub lam_mean: f64,
    /// Low-order flux on the interior subface next to the extremal solution point.
    pub f_sub: FluxVector,
    /// Δt/(μ w Δx): low-order update factor at the extremal solution point.
    pub coef: f64,
    /// Ghost traces carry no update and are skipped by the flux correction.
    pub ghost: bool,
}

impl Trace {
    /// Mirror image across a wall normal to `dir`.
    pub fn reflect(&self, dir: Direction) -> Trace {
        Trace {
            u_avg: self.u_avg.reflect(dir),
            flux: self.flux.reflect_flux(dir),
            u_node: self.u_node.reflect(dir),
            f_node: self.f_node.reflect_flux(dir),
            lam_node: self.lam_node,
            lam_mean: self.lam_mean,
            f_sub: self.f_sub.reflect_flux(dir),
            coef: self.coef,
            ghost: true,
        }
    }

    /// Ghost carrying a fixed state: U = u, F = f(u).
    pub fn from_state(eos: EosModel, u: &Conserved, prim: &Primitive, dir: Direction) -> Trace {
        let f = physical_flux(u, prim, dir);
        let lam = max_wave_speed(eos, prim, dir);
        Trace {
            u_avg: *u,
            flux: f,
            u_node: *u,
            f_node: f,
            lam_node: lam,
            lam_mean: lam,
            f_sub: f,
            coef: 0.0,
            ghost: true,
        }
    }

    pub fn as_ghost(&self) -> Trace {
        Trace { ghost: true, ..*self }
    }
}

/// High-order EA face flux F̃ = ½(F⁻ + F⁺) − ½λ(U⁺ − U⁻) with λ from element means.
#[inline]
pub fn ea_inter_element_flux(left: &Trace, right: &Trace) -> FluxVector {
    let lambda = left.lam_mean.max(right.lam_mean);
    (left.flux + right.flux) * 0.5 - (right.u_avg - left.u_avg) * (0.5 * lambda)
}

/// Low-order Rusanov flux between the two extremal solution points.
#[inline]
pub fn low_order_face_flux(left: &Trace, right: &Trace) -> FluxVector {
    rusanov_from_parts(
        &left.u_node,
        &left.f_node,
        &right.u_node,
        &right.f_node,
        left.lam_node.max(right.lam_node),
    )
}

/// Immutable description of the discretization shared by all elements.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub eos: EosModel,
    pub basis: BasisData,
    pub dim: usize,
    pub scaling: bool,
    pub tol: f64,
    pub max_iter: usize,
    stages: Vec<AlwStage>,
    /// coef[slot][k] = a^k / k!
    coef: [Vec<f64>; 4],
    slots: Vec<usize>,
}

/// Outputs of the per-element phase, consumed by the face and update phases.
#[derive(Debug, Clone, Default)]
pub struct ElementFluxes {
    /// Time-averaged flux F per axis at every solution point.
    pub nodal_flux: [Vec<FluxVector>; 2],
    /// Interior subface Rusanov fluxes per axis, `[line * N + i]` between nodes i and i+1.
    pub sub_flux: [Vec<FluxVector>; 2],
    /// Face traces, index `(axis * 2 + side) * lines + line`.
    pub traces: Vec<Trace>,
    /// Number of families changed by argument scaling.
    pub scaling_activations: usize,
    pub scaling_fallbacks: usize,
}

/// Per-element inputs.
pub struct ElementInput<'a> {
    pub index: usize,
    pub u: &'a [Conserved],
    pub prims: &'a [Primitive],
    pub mean: Conserved,
    /// Normal spectral radius of the mean, per axis.
    pub lam_mean: [f64; 2],
    /// Δt/Δx per axis.
    pub dt_dx: [f64; 2],
    /// Low-order splitting weights μ per axis (1 in 1-D).
    pub mu: [f64; 2],
}

/// Reusable per-thread buffers.
#[derive(Debug, Default)]
pub struct Scratch {
    uk: Vec<Vec<Conserved>>,
    f_prev: [Vec<FluxVector>; 2],
    f_cur: [Vec<FluxVector>; 2],
    f0: [Vec<FluxVector>; 2],
    unscaled: [Vec<Conserved>; 4],
    scaled: [Vec<Conserved>; 4],
    slot_flux: [[Vec<FluxVector>; 2]; 4],
    face_uk: Vec<Vec<Conserved>>,
    face_f0: [Vec<FluxVector>; 2],
    face_out: [Vec<FluxVector>; 2],
    face_uavg: Vec<Conserved>,
    lam_node: [Vec<f64>; 2],
    // Unperturbed face states and their primitives; the pressures seed the
    // recovery of the perturbed states.
    face_base: Vec<Conserved>,
    face_prims: Vec<Primitive>,
}

impl Scheme {
    pub fn new(eos: EosModel, basis: BasisData, dim: usize, scaling: bool) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {dim}")));
        }
        let stages = alw_stages(basis.degree)?;
        let coef = std::array::from_fn(|s| {
            (0..=basis.degree)
                .map(|k| OFFSETS[s].powi(k as i32) / factorial(k))
                .collect()
        });
        let slots = if basis.degree >= 3 { vec![0, 1, 2, 3] } else { vec![1, 2] };
        Ok(Scheme {
            eos,
            basis,
            dim,
            scaling,
            tol: eos::DEFAULT_TOL,
            max_iter: eos::DEFAULT_MAX_ITER,
            stages,
            coef,
            slots,
        })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn n1(&self) -> usize {
        self.basis.degree + 1
    }

    /// Solution points per element.
    pub fn nodes_per_element(&self) -> usize {
        self.n1().pow(self.dim as u32)
    }

    /// Lines of nodes parallel to one axis.
    pub fn lines(&self) -> usize {
        self.n1().pow(self.dim as u32 - 1)
    }

    /// First node index and stride of line `k` along `axis`.
    #[inline]
    pub fn line(&self, axis: usize, k: usize) -> (usize, usize) {
        let n1 = self.n1();
        if axis == 0 {
            (k * n1, 1)
        } else {
            (k, n1)
        }
    }

    pub fn stages(&self) -> &[AlwStage] {
        &self.stages
    }

    #[inline]
    pub fn recover(&self, u: &Conserved) -> Result<Primitive> {
        eos::cons_to_prim(self.eos, u, self.tol, self.max_iter).map(|r| r.prim)
    }

    /// Recovery starting from the pressure of a nearby state.
    #[inline]
    pub fn recover_near(&self, u: &Conserved, p_guess: f64) -> Result<Primitive> {
        eos::cons_to_prim_from(self.eos, u, p_guess, self.tol, self.max_iter).map(|r| r.prim)
    }

    /// Quadrature mean over the element, built from row means so that data
    /// constant in y reproduces the 1-D mean bitwise.
    pub fn element_mean(&self, vals: &[Conserved]) -> Conserved {
        let b = &self.basis;
        let n1 = self.n1();
        if self.dim == 1 {
            return b.mean_of(|i| vals[i]);
        }
        let row = |j: usize| b.mean_of(|i| vals[j * n1 + i]);
        let r0 = row(0);
        let mut acc = r0;
        for j in 1..n1 {
            acc = acc.add_scaled(b.weights[j], &(row(j) - r0));
        }
        acc
    }

    fn new_scratch(&self) -> Scratch {
        let nn = self.nodes_per_element();
        let n1 = self.n1();
        let np = self.degree() + 1;
        let z = Conserved::ZERO;
        Scratch {
            uk: vec![vec![z; nn]; np],
            f_prev: [vec![z; nn], vec![z; nn]],
            f_cur: [vec![z; nn], vec![z; nn]],
            f0: [vec![z; nn], vec![z; nn]],
            unscaled: std::array::from_fn(|_| vec![z; nn]),
            scaled: std::array::from_fn(|_| vec![z; nn]),
            slot_flux: std::array::from_fn(|_| [vec![z; nn], vec![z; nn]]),
            face_uk: vec![vec![z; n1]; np],
            face_f0: [vec![z; n1], vec![z; n1]],
            face_out: [vec![z; n1], vec![z; n1]],
            face_uavg: vec![z; n1],
            lam_node: [vec![0.0; nn], vec![0.0; nn]],
            face_base: vec![z; n1],
            face_prims: vec![Primitive::new(1.0, [0.0, 0.0], 1.0); n1],
        }
    }

    pub fn scratch(&self) -> Scratch {
        self.new_scratch()
    }

    pub fn empty_output(&self) -> ElementFluxes {
        let nn = self.nodes_per_element();
        let lines = self.lines();
        let n = self.degree();
        let z = Conserved::ZERO;
        let per_axis = |a: usize| if a < self.dim { nn } else { 0 };
        let per_axis_sub = |a: usize| if a < self.dim { lines * n } else { 0 };
        ElementFluxes {
            nodal_flux: [vec![z; per_axis(0)], vec![z; per_axis(1)]],
            sub_flux: [vec![z; per_axis_sub(0)], vec![z; per_axis_sub(1)]],
            traces: vec![Trace::default(); 2 * self.dim * lines],
            scaling_activations: 0,
            scaling_fallbacks: 0,
        }
    }

    fn wrap(&self, element: usize, node: usize, stage: usize, e: Error) -> Error {
        Error::FluxArgument {
            element,
            node,
            stage,
            source: Box::new(e),
        }
    }

    /// Stage r (1-based) of the ALW construction on a set of points.
    ///
    /// `uk[k][p]` holds u^(k) for k ≤ r. The perturbed states of every slot are
    /// advanced in `unscaled`, scaled against `refs[slot]` into `scaled`, and the
    /// stage flux f^(r) is written to `out` for each axis in `axes`.
    #[allow(clippy::too_many_arguments)]
    fn alw_stage(
        &self,
        r: usize,
        points: usize,
        uk: &[Vec<Conserved>],
        f0: &[Vec<FluxVector>; 2],
        refs: &[Conserved; 4],
        base: (&[Conserved], &[Primitive]),
        axes: &[usize],
        sc_unscaled: &mut [Vec<Conserved>; 4],
        sc_scaled: &mut [Vec<Conserved>; 4],
        sc_flux: &mut [[Vec<FluxVector>; 2]; 4],
        out: &mut [Vec<FluxVector>; 2],
        stats: &mut ElementFluxes,
        element: usize,
    ) -> Result<()> {
        let stage = self.stages[r - 1];
        for &s in &self.slots {
            let c = self.coef[s][r];
            let un = &mut sc_unscaled[s];
            if r == 1 {
                let c0 = self.coef[s][0];
                for p in 0..points {
                    un[p] = (uk[0][p] * c0).add_scaled(c, &uk[1][p]);
                }
            } else {
                for p in 0..points {
                    un[p] = un[p].add_scaled(c, &uk[r][p]);
                }
            }
            let sc = &mut sc_scaled[s];
            sc[..points].copy_from_slice(&un[..points]);
            if self.scaling {
                let o = scale_flux_arguments(&mut sc[..points], &refs[s]);
                if o.activated() {
                    stats.scaling_activations += 1;
                }
                stats.scaling_fallbacks += o.rounding_fallbacks;
            }
            let needed = s == 1 || s == 2 || stage.uses_outer();
            if needed {
                for p in 0..points {
                    let prim = if sc[p] == base.0[p] {
                        base.1[p]
                    } else {
                        self.recover_near(&sc[p], base.1[p].p)
                            .map_err(|e| self.wrap(element, p, r, e))?
                    };
                    for &a in axes {
                        sc_flux[s][a][p] = physical_flux(&sc[p], &prim, Direction::from_index(a));
                    }
                }
            }
        }
        let z = FluxVector::ZERO;
        for &a in axes {
            for p in 0..points {
                let f = [
                    if stage.uses_outer() { sc_flux[0][a][p] } else { z },
                    sc_flux[1][a][p],
                    sc_flux[2][a][p],
                    if stage.uses_outer() { sc_flux[3][a][p] } else { z },
                ];
                out[a][p] = stage.combine(&f0[a][p], &f);
            }
        }
        Ok(())
    }

    /// Time-averaged fluxes at the solution points, face traces and subface
    /// low-order fluxes for one element.
    pub fn compute_element(&self, input: &ElementInput, out: &mut ElementFluxes, sc: &mut Scratch) -> Result<()> {
        let nn = self.nodes_per_element();
        let n1 = self.n1();
        let n = self.degree();
        let lines = self.lines();
        let dim = self.dim;
        let axes: &[usize] = if dim == 1 { &[0] } else { &[0, 1] };
        let b = &self.basis;
        out.scaling_activations = 0;
        out.scaling_fallbacks = 0;

        // Stage 0: physical fluxes of the solution.
        for p in 0..nn {
            sc.uk[0][p] = input.u[p];
            for &a in axes {
                let dir = Direction::from_index(a);
                let f = physical_flux(&input.u[p], &input.prims[p], dir);
                sc.f0[a][p] = f;
                sc.f_prev[a][p] = f;
                out.nodal_flux[a][p] = f;
                sc.lam_node[a][p] = max_wave_speed(self.eos, &input.prims[p], dir);
            }
        }

        let mut refs = [input.mean; 4];
        for r in 1..=n {
            // u^(r) = −Σ_a (Δt/Δx_a) ∂_ξa f^(r−1)
            for p in 0..nn {
                let (i, j) = (p % n1, p / n1);
                let gx = {
                    let (base, stride) = self.line(0, j);
                    b.derivative_at(i, |q| sc.f_prev[0][base + q * stride]) * input.dt_dx[0]
                };
                let v = if dim == 2 {
                    let (base, stride) = self.line(1, i);
                    let gy = b.derivative_at(j, |q| sc.f_prev[1][base + q * stride]) * input.dt_dx[1];
                    -(gx + gy)
                } else {
                    -gx
                };
                sc.uk[r][p] = v;
            }
            let (uk, f0) = (&sc.uk, &sc.f0);
            self.alw_stage(
                r,
                nn,
                &uk[..=r],
                f0,
                &refs,
                (input.u, input.prims),
                axes,
                &mut sc.unscaled,
                &mut sc.scaled,
                &mut sc.slot_flux,
                &mut sc.f_cur,
                out,
                input.index,
            )?;
            let w = 1.0 / factorial(r + 1);
            for &a in axes {
                for p in 0..nn {
                    out.nodal_flux[a][p] = out.nodal_flux[a][p].add_scaled(w, &sc.f_cur[a][p]);
                }
            }
            std::mem::swap(&mut sc.f_prev, &mut sc.f_cur);
            if self.scaling {
                for &s in &self.slots {
                    refs[s] = self.element_mean(&sc.scaled[s][..nn]);
                }
            }
        }

        // Subface low-order fluxes along each axis.
        for &a in axes {
            for k in 0..lines {
                let (base, stride) = self.line(a, k);
                for i in 0..n {
                    let (p, q) = (base + i * stride, base + (i + 1) * stride);
                    out.sub_flux[a][k * n + i] = rusanov_from_parts(
                        &input.u[p],
                        &sc.f0[a][p],
                        &input.u[q],
                        &sc.f0[a][q],
                        sc.lam_node[a][p].max(sc.lam_node[a][q]),
                    );
                }
            }
        }

        // Face traces by extrapolate-and-average.
        let face_refs = [input.mean; 4];
        for &a in axes {
            let dir = Direction::from_index(a);
            for side in 0..2 {
                let ext = if side == 0 { &b.extrap_left } else { &b.extrap_right };
                for k in 0..lines {
                    let (base, stride) = self.line(a, k);
                    for r in 0..=n {
                        let row = &sc.uk[r];
                        let v0 = row[base];
                        let mut acc = v0;
                        for q in 1..n1 {
                            acc = acc.add_scaled(ext[q], &(row[base + q * stride] - v0));
                        }
                        sc.face_uk[r][k] = acc;
                    }
                }
                // Time-averaged solution at the face points.
                for k in 0..lines {
                    let mut acc = sc.face_uk[0][k];
                    for r in 1..=n {
                        acc = acc.add_scaled(1.0 / factorial(r + 1), &sc.face_uk[r][k]);
                    }
                    sc.face_uavg[k] = acc;
                }
                // Stage 0 at the face: the extrapolated solution, scaled if needed.
                {
                    let sc0 = &mut sc.scaled[0];
                    sc0[..lines].copy_from_slice(&sc.face_uk[0][..lines]);
                    if self.scaling {
                        let o = scale_flux_arguments(&mut sc0[..lines], &input.mean);
                        if o.activated() {
                            out.scaling_activations += 1;
                        }
                        out.scaling_fallbacks += o.rounding_fallbacks;
                    }
                    for k in 0..lines {
                        let prim = self
                            .recover(&sc0[k])
                            .map_err(|e| self.wrap(input.index, k, 0, e))?;
                        let f = physical_flux(&sc0[k], &prim, dir);
                        sc.face_base[k] = sc0[k];
                        sc.face_prims[k] = prim;
                        sc.face_f0[a][k] = f;
                        sc.face_out[a][k] = f;
                    }
                }
                let mut stage_out: [Vec<FluxVector>; 2] = [Vec::new(), Vec::new()];
                std::mem::swap(&mut stage_out, &mut sc.f_cur);
                let mut result = Ok(());
                for r in 1..=n {
                    result = self.alw_stage(
                        r,
                        lines,
                        &sc.face_uk[..=r],
                        &sc.face_f0,
                        &face_refs,
                        (&sc.face_base, &sc.face_prims),
                        &[a],
                        &mut sc.unscaled,
                        &mut sc.scaled,
                        &mut sc.slot_flux,
                        &mut stage_out,
                        out,
                        input.index,
                    );
                    if result.is_err() {
                        break;
                    }
                    let w = 1.0 / factorial(r + 1);
                    for k in 0..lines {
                        sc.face_out[a][k] = sc.face_out[a][k].add_scaled(w, &stage_out[a][k]);
                    }
                }
                // Restore the borrowed buffer before any error leaves the scratch.
                std::mem::swap(&mut stage_out, &mut sc.f_cur);
                result?;

                let w_ext = if side == 0 { b.weights[0] } else { b.weights[n] };
                let coef = input.dt_dx[a] / (input.mu[a] * w_ext);
                for k in 0..lines {
                    let (base, stride) = self.line(a, k);
                    let p = if side == 0 { base } else { base + n * stride };
                    let f_sub = if side == 0 {
                        out.sub_flux[a][k * n]
                    } else {
                        out.sub_flux[a][k * n + n - 1]
                    };
                    out.traces[(a * 2 + side) * lines + k] = Trace {
                        u_avg: sc.face_uavg[k],
                        flux: sc.face_out[a][k],
                        u_node: input.u[p],
                        f_node: sc.f0[a][p],
                        lam_node: sc.lam_node[a][p],
                        lam_mean: input.lam_mean[a],
                        f_sub,
                        coef,
                        ghost: false,
                    };
                }
            }
        }
        Ok(())
    }

    /// Residual dF_h/dξ summed over axes and scaled by Δt/Δx, so that
    /// u^H = u − residual. `face_flux(axis, side, line)` returns the final face flux.
    pub fn high_order_residual<F>(&self, fluxes: &ElementFluxes, dt_dx: [f64; 2], face_flux: F, out: &mut [Conserved])
    where
        F: Fn(usize, usize, usize) -> FluxVector,
    {
        let b = &self.basis;
        let n1 = self.n1();
        let nn = self.nodes_per_element();
        let lines = self.lines();
        // Per-line face corrections: F_face − F^δ(face).
        let mut jumps = [[[FluxVector::ZERO; 2]; 5]; 2];
        for a in 0..self.dim {
            for k in 0..lines {
                let (base, stride) = self.line(a, k);
                let (fl, fr) = b.faces_of(|q| fluxes.nodal_flux[a][base + q * stride]);
                jumps[a][k] = [face_flux(a, 0, k) - fl, face_flux(a, 1, k) - fr];
            }
        }
        for p in 0..nn {
            let (i, j) = (p % n1, p / n1);
            let axis_term = |a: usize, pos: usize, k: usize| {
                let (base, stride) = self.line(a, k);
                let d = b.derivative_at(pos, |q| fluxes.nodal_flux[a][base + q * stride]);
                let [jl, jr] = jumps[a][k];
                (d.add_scaled(b.corr_deriv_left[pos], &jl).add_scaled(b.corr_deriv_right[pos], &jr)) * dt_dx[a]
            };
            let gx = axis_term(0, i, j);
            out[p] = if self.dim == 2 { gx + axis_term(1, j, i) } else { gx };
        }
    }
}
