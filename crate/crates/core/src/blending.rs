//! Shock capturing and admissibility enforcement.
//!
//! The high-order update is blended with a first-order subcell finite-volume
//! update. Face fluxes are shared by both, so element means agree; the face
//! flux is pulled toward the low-order Rusanov flux whenever the low-order
//! update at an extremal solution point would lose admissibility.

use crate::basis::BasisData;
use crate::eos;
use crate::error::{Error, Result};
use crate::lwfr::Trace;
use crate::state::{Conserved, FluxVector, Primitive};

/// Parameters of the modal smoothness indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorParams {
    /// Threshold amplitude a in T = a·10^(−c(N+1)^¼).
    pub a: f64,
    /// Threshold exponent c.
    pub c: f64,
    /// Sharpness s of the logistic map.
    pub s: f64,
    /// Values below this are set to zero.
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// When false every element uses α = 0 (pure high order, plus the flux correction).
    pub enabled: bool,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        IndicatorParams {
            a: 0.5,
            c: 1.8,
            s: 9.21024,
            alpha_min: 1e-3,
            alpha_max: 1.0,
            enabled: true,
        }
    }
}

impl IndicatorParams {
    pub fn threshold(&self, degree: usize) -> f64 {
        self.a * 10f64.powf(-self.c * ((degree + 1) as f64).powf(0.25))
    }
}

/// Indicator quantity K = ρpΓ.
#[inline]
pub fn indicator_quantity(prim: &Primitive) -> f64 {
    prim.rho * prim.p * prim.lorentz_factor()
}

/// Energy of the highest modes of nodal data: max of (top mode / all modes)
/// and (second-highest mode / modes up to N−1), with modes ranked by the
/// largest per-axis index.
pub fn modal_energy(values: &[f64], basis: &BasisData, dim: usize) -> f64 {
    let n1 = basis.degree + 1;
    let n = basis.degree;
    let mut total = 0.0;
    let mut upto1 = 0.0;
    let mut upto2 = 0.0;
    let mut add = |order: usize, c: f64| {
        let e = c * c;
        total += e;
        if order + 1 <= n {
            upto1 += e;
        }
        if order + 2 <= n {
            upto2 += e;
        }
    };
    if dim == 1 {
        for k in 0..n1 {
            let c: f64 = (0..n1).map(|i| basis.modal[k * n1 + i] * values[i]).sum();
            add(k, c);
        }
    } else {
        // Transform along x for every row, then along y.
        let mut tmp = vec![0.0; n1 * n1];
        for j in 0..n1 {
            for k in 0..n1 {
                tmp[j * n1 + k] = (0..n1).map(|i| basis.modal[k * n1 + i] * values[j * n1 + i]).sum();
            }
        }
        for l in 0..n1 {
            for k in 0..n1 {
                let c: f64 = (0..n1).map(|j| basis.modal[l * n1 + j] * tmp[j * n1 + k]).sum();
                add(k.max(l), c);
            }
        }
    }
    if !(total > 0.0) {
        return 0.0;
    }
    let top = (total - upto1) / total;
    if n >= 2 && upto1 > 0.0 {
        top.max((upto1 - upto2) / upto1)
    } else {
        top
    }
}

/// Blending coefficient of one element from its nodal primitives.
pub fn smoothness_alpha(prims: &[Primitive], basis: &BasisData, dim: usize, params: &IndicatorParams) -> f64 {
    if !params.enabled {
        return 0.0;
    }
    let k: Vec<f64> = prims.iter().map(indicator_quantity).collect();
    let energy = modal_energy(&k, basis, dim);
    let t = params.threshold(basis.degree);
    let mut alpha = 1.0 / (1.0 + (-params.s / t * (energy - t)).exp());
    if alpha < params.alpha_min {
        alpha = 0.0;
    } else if alpha > 1.0 - params.alpha_min {
        alpha = 1.0;
    }
    alpha.min(params.alpha_max)
}

/// Initial blended face flux (1 − α)F̃ + α f^L.
#[inline]
pub fn blend_face_flux_initial(high: &FluxVector, low: &FluxVector, alpha: f64) -> FluxVector {
    *high * (1.0 - alpha) + *low * alpha
}

/// What the admissibility correction did at one face point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CorrectionOutcome {
    /// The flux was moved toward f^L.
    pub corrected: bool,
    /// The low-order candidate itself was not admissible; f^L was used as is.
    pub low_order_fallback: bool,
}

#[inline]
fn left_update(t: &Trace, f: &FluxVector) -> Conserved {
    t.u_node - (*f - t.f_sub) * t.coef
}

#[inline]
fn right_update(t: &Trace, f: &FluxVector) -> Conserved {
    t.u_node - (t.f_sub - *f) * t.coef
}

/// Pulls the face flux toward f^L so that the low-order updates at both
/// extremal solution points keep each constraint c ∈ {D, q} above a tenth of
/// its value under the pure low-order flux. Applied to D first, then to q.
pub fn admissibility_flux_correction(
    initial: &FluxVector,
    f_low: &FluxVector,
    left: &Trace,
    right: &Trace,
) -> (FluxVector, CorrectionOutcome) {
    let mut out = CorrectionOutcome::default();
    let mut flux = *initial;
    let constraints: [fn(&Conserved) -> f64; 2] = [|u| u.d, |u| eos::constraint_values(u).1];
    for c in constraints {
        let mut theta: f64 = 1.0;
        let mut fallback = false;
        for (trace, update) in [
            (left, left_update as fn(&Trace, &FluxVector) -> Conserved),
            (right, right_update as fn(&Trace, &FluxVector) -> Conserved),
        ] {
            if trace.ghost {
                continue;
            }
            let c_hat = c(&update(trace, f_low));
            let c_old = c(&update(trace, &flux));
            if c_old < 0.1 * c_hat || !c_old.is_finite() {
                if c_hat > 0.0 && c_old.is_finite() {
                    theta = theta.min(0.9 * c_hat / (c_hat - c_old));
                } else {
                    fallback = true;
                }
            } else if !(c_hat > 0.0) && !(c_old > 0.0) {
                fallback = true;
            }
        }
        if fallback {
            out.low_order_fallback = true;
            out.corrected = true;
            flux = *f_low;
            continue;
        }
        if theta < 1.0 {
            out.corrected = true;
            let candidate = flux * theta + *f_low * (1.0 - theta);
            // Rounding can leave c marginally non-positive; fall back to f^L then.
            let ok = [(left, true), (right, false)].iter().all(|(t, is_left)| {
                t.ghost || {
                    let u = if *is_left { left_update(t, &candidate) } else { right_update(t, &candidate) };
                    c(&u) > 0.0
                }
            });
            flux = if ok { candidate } else { *f_low };
        }
    }
    (flux, out)
}

/// Convex combination of the two nodal updates.
pub fn blend_solutions(high: &[Conserved], low: &[Conserved], alpha: f64, out: &mut [Conserved]) {
    for ((o, h), l) in out.iter_mut().zip(high).zip(low) {
        *o = *h * (1.0 - alpha) + *l * alpha;
    }
}

/// Scales nodal states toward their mean until D ≥ ε_D and q ≥ ε_q at every
/// node, with ε_c = min(c(mean)/10, 1e-13). Returns whether anything changed.
pub fn zhang_shu_scale(nodes: &mut [Conserved], mean: &Conserved) -> Result<bool> {
    let (d_bar, q_bar) = eos::constraint_values(mean);
    if !(d_bar > 0.0 && q_bar > 0.0) {
        return Err(Error::Inadmissible { d: d_bar, q: q_bar });
    }
    let eps_d = (0.1 * d_bar).min(1e-13);
    let eps_q = (0.1 * q_bar).min(1e-13);
    let mut changed = false;

    let d_min = nodes.iter().map(|u| u.d).fold(f64::INFINITY, f64::min);
    if d_min < eps_d || !d_min.is_finite() {
        let theta = if d_min.is_finite() { ((d_bar - eps_d) / (d_bar - d_min)).min(1.0) } else { 0.0 };
        for u in nodes.iter_mut() {
            *u = mean.add_scaled(theta, &(*u - *mean));
        }
        changed = true;
    }
    let q_min = nodes.iter().map(|u| eos::constraint_values(u).1).fold(f64::INFINITY, f64::min);
    if q_min < eps_q || !q_min.is_finite() {
        let mut theta = if q_min.is_finite() { ((q_bar - eps_q) / (q_bar - q_min)).min(1.0) } else { 0.0 };
        let orig = nodes.to_vec();
        for attempt in 0..=61 {
            for (u, o) in nodes.iter_mut().zip(&orig) {
                *u = mean.add_scaled(theta, &(*o - *mean));
            }
            let ok = nodes.iter().all(|u| {
                let (d, q) = eos::constraint_values(u);
                d > 0.0 && q > 0.0
            });
            if ok {
                break;
            }
            theta = if attempt >= 60 { 0.0 } else { 0.5 * theta };
        }
        changed = true;
    }
    Ok(changed)
}

/// Δt = l_s·CFL·min_e (Σ_a Λ_a(ū_e)/Δx_a)⁻¹, clipped so the step does not pass `remaining`.
pub fn compute_dt(lam_means: &[[f64; 2]], spacing: [f64; 2], dim: usize, safety: f64, cfl: f64, remaining: f64) -> f64 {
    let mut rate: f64 = 0.0;
    for lam in lam_means {
        let mut s = lam[0] / spacing[0];
        if dim == 2 {
            s += lam[1] / spacing[1];
        }
        rate = rate.max(s);
    }
    let dt = safety * cfl / rate;
    if dt >= remaining {
        remaining
    } else {
        dt
    }
}

/// Default CFL numbers for degrees 1..=4.
pub const DEFAULT_CFL: [f64; 4] = [0.259, 0.170, 0.103, 0.069];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, legendre};
    use crate::eos::{prim_to_cons, EosModel};

    #[test]
    fn indicator_uniform_and_top_mode() {
        let params = IndicatorParams::default();
        for n in 1..=4 {
            let b = build_basis(n).unwrap();
            let prims = vec![Primitive::new_1d(1.0, 0.3, 2.0); n + 1];
            assert_eq!(smoothness_alpha(&prims, &b, 1, &params), 0.0);
            let top: Vec<f64> = b.nodes.iter().map(|x| legendre(n, 2.0 * x - 1.0).0).collect();
            assert!((modal_energy(&top, &b, 1) - 1.0).abs() < 1e-12);
            // A positive K consisting almost entirely of the top mode.
            let prims: Vec<Primitive> = top
                .iter()
                .map(|t| Primitive::new_1d(1.0, 0.0, 1e-9 + 1.0 + t))
                .collect();
            let _ = smoothness_alpha(&prims, &b, 1, &params);
            let energy = modal_energy(&top, &b, 1);
            let t = params.threshold(n);
            let raw = 1.0 / (1.0 + (-params.s / t * (energy - t)).exp());
            assert!(raw > 1.0 - 1e-3);
        }
    }

    #[test]
    fn indicator_fires_on_step() {
        let b = build_basis(4).unwrap();
        let params = IndicatorParams::default();
        let prims: Vec<Primitive> = b
            .nodes
            .iter()
            .map(|&x| if x < 0.5 { Primitive::new_1d(10.0, 0.0, 13.3) } else { Primitive::new_1d(1.0, 0.0, 1e-6) })
            .collect();
        let alpha = smoothness_alpha(&prims, &b, 1, &params);
        assert!((alpha - params.alpha_max).abs() < 1e-3);
    }

    #[test]
    fn indicator_2d_matches_1d_for_x_only_data() {
        let b = build_basis(3).unwrap();
        let vals1: Vec<f64> = b.nodes.iter().map(|x| (5.0 * x).sin()).collect();
        let mut vals2 = Vec::new();
        for _ in 0..4 {
            vals2.extend_from_slice(&vals1);
        }
        assert!((modal_energy(&vals1, &b, 1) - modal_energy(&vals2, &b, 2)).abs() < 1e-13);
    }

    #[test]
    fn face_blend_examples() {
        let h = Conserved::new_1d(1.0, 2.0, 3.0);
        let l = Conserved::new_1d(3.0, 0.0, -1.0);
        assert_eq!(blend_face_flux_initial(&h, &l, 0.0), h);
        assert_eq!(blend_face_flux_initial(&h, &l, 1.0), l);
        assert_eq!(blend_face_flux_initial(&h, &l, 0.5), Conserved::new_1d(2.0, 1.0, 1.0));
        assert_eq!(blend_face_flux_initial(&h, &h, 0.3), h * 0.7 + h * 0.3);
    }

    fn trace(u: Conserved, f_sub: FluxVector, coef: f64) -> Trace {
        Trace {
            u_node: u,
            f_sub,
            coef,
            ..Default::default()
        }
    }

    #[test]
    fn correction_restores_density_margin() {
        let eos = EosModel::Ideal { gamma: 5.0 / 3.0 };
        let u = prim_to_cons(eos, &Primitive::new_1d(1.0, 0.0, 1.0));
        let left = trace(u, Conserved::ZERO, 2.0);
        let right = trace(u, Conserved::ZERO, 2.0);
        let f_low = Conserved::new_1d(0.1, 0.5, 0.1);
        // A face mass flux of 1 drains 2 units of density from the left node.
        let bad = Conserved::new_1d(1.0, 0.5, 0.1);
        let d_old = left_update(&left, &bad).d;
        let d_hat = left_update(&left, &f_low).d;
        assert!(d_old < 0.0 && d_hat > 0.0);
        let (f, o) = admissibility_flux_correction(&bad, &f_low, &left, &right);
        assert!(o.corrected && !o.low_order_fallback);
        let d_new = left_update(&left, &f).d;
        assert!(d_new >= 0.1 * d_hat * (1.0 - 1e-12), "{d_new} vs {d_hat}");
        // Idempotent once satisfied.
        let (f2, o2) = admissibility_flux_correction(&f, &f_low, &left, &right);
        assert_eq!(f2, f);
        assert!(!o2.corrected);
        // f^L is a fixed point.
        let (f3, _) = admissibility_flux_correction(&f_low, &f_low, &left, &right);
        assert_eq!(f3, f_low);
    }

    #[test]
    fn zhang_shu_examples() {
        let mean = Conserved::new_1d(1.0, 0.0, 2.5);
        let mut nodes = vec![Conserved::new_1d(1.1, 0.1, 2.6), Conserved::new_1d(0.9, -0.1, 2.4)];
        let before = nodes.clone();
        assert!(!zhang_shu_scale(&mut nodes, &mean).unwrap());
        assert_eq!(nodes, before);

        let mut nodes = vec![Conserved::new_1d(-0.5, 0.0, 2.5), Conserved::new_1d(2.5, 0.0, 2.5)];
        assert!(zhang_shu_scale(&mut nodes, &mean).unwrap());
        assert!(nodes.iter().all(|u| u.d >= 1e-13 * 0.999));
        let m = (nodes[0] + nodes[1]) * 0.5;
        assert!((m.d - 1.0).abs() < 1e-14 && (m.e - 2.5).abs() < 1e-14);

        let mut nodes = vec![mean];
        assert!(zhang_shu_scale(&mut nodes, &Conserved::new_1d(1.0, 3.0, 3.0)).is_err());
    }

    #[test]
    fn dt_examples() {
        let dt = compute_dt(&[[0.5, 0.0]], [0.01, 1.0], 1, 0.95, 0.1, 1.0);
        assert!((dt - 1.9e-3).abs() < 1e-15);
        let dt2 = compute_dt(&[[0.5, 0.0]], [0.005, 1.0], 1, 0.95, 0.1, 1.0);
        assert!((dt2 - dt / 2.0).abs() < 1e-16);
        let dt3 = compute_dt(&[[0.5, 0.5]], [0.01, 0.02], 2, 0.95, 0.1, 1.0);
        assert!((dt3 - 0.95 * 0.1 / (0.5 / 0.01 + 0.5 / 0.02)).abs() < 1e-16);
        assert_eq!(compute_dt(&[[0.5, 0.0]], [0.01, 1.0], 1, 0.95, 0.1, 1e-4), 1e-4);
    }
}
