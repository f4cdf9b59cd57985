//! Physical flux, wave speeds, the Rusanov flux and admissibility checks.

use crate::eos::{self, EosModel};
use crate::error::Result;
use crate::state::{Conserved, Direction, FluxVector, Primitive};

/// f_a(u) = (D v_a, m v_a + p e_a, m_a). `prim` must be the recovery of `u`.
#[inline]
pub fn physical_flux(u: &Conserved, prim: &Primitive, dir: Direction) -> FluxVector {
    let a = dir.index();
    let va = prim.v[a];
    let mut f = Conserved {
        d: u.d * va,
        m: [u.m[0] * va, u.m[1] * va],
        e: u.m[a],
    };
    f.m[a] += prim.p;
    f
}

/// Spectral radius of the flux Jacobian along `dir`: (|v_a| + c_s)/(1 + c_s|v_a|).
#[inline]
pub fn max_wave_speed(eos: EosModel, prim: &Primitive, dir: Direction) -> f64 {
    let cs = eos.cs2(prim.p, prim.rho).sqrt();
    let va = prim.v[dir.index()].abs();
    (va + cs) / (1.0 + cs * va)
}

/// Rusanov flux from precomputed physical fluxes and the dissipation speed.
#[inline]
pub fn rusanov_from_parts(
    ul: &Conserved,
    fl: &FluxVector,
    ur: &Conserved,
    fr: &FluxVector,
    lambda: f64,
) -> FluxVector {
    (*fl + *fr) * 0.5 - (*ur - *ul) * (0.5 * lambda)
}

/// ½(f(uL) + f(uR)) − ½λ(uR − uL) with λ the larger spectral radius.
pub fn rusanov_flux(eos: EosModel, ul: &Conserved, ur: &Conserved, dir: Direction) -> Result<FluxVector> {
    let pl = eos::recover(eos, ul)?;
    let pr = eos::recover(eos, ur)?;
    let lambda = max_wave_speed(eos, &pl, dir).max(max_wave_speed(eos, &pr, dir));
    Ok(rusanov_from_parts(
        ul,
        &physical_flux(ul, &pl, dir),
        ur,
        &physical_flux(ur, &pr, dir),
        lambda,
    ))
}

/// Returns (D, q) with q = E − √(D² + |m|²); the state is admissible iff both are positive.
#[inline]
pub fn admissibility(u: &Conserved) -> (f64, f64) {
    eos::constraint_values(u)
}

#[inline]
pub fn is_admissible(u: &Conserved) -> bool {
    let (d, q) = admissibility(u);
    d > 0.0 && q > 0.0
}
