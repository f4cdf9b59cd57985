//! Equations of state and conservative/primitive conversions.
//!
//! Every closure is written in terms of θ = p/ρ, with h = H(θ). The four models
//! are the constant-γ ideal gas (ID), Taub–Mathews (TM), the IP closure and the
//! RC closure.

use std::fmt;

use crate::error::{Error, RecoveryMethod, Result};
use crate::state::{Conserved, Primitive};

/// Default relative tolerance for every recovery.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget for every recovery.
pub const DEFAULT_MAX_ITER: usize = 100;

/// Closure of the system through the specific enthalpy h(p, ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EosModel {
    Ideal { gamma: f64 },
    Tm,
    Ip,
    Rc,
}

impl EosModel {
    /// Ideal gas with γ checked to lie in (1, 2].
    pub fn ideal(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma <= 2.0) {
            return Err(Error::Domain(format!(
                "gamma must lie in (1, 2], got {gamma}"
            )));
        }
        Ok(EosModel::Ideal { gamma })
    }

    /// Parses `id`, `tm`, `ip` or `rc`. `gamma` is used by `id` only.
    pub fn parse(name: &str, gamma: f64) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "id" | "ideal" => EosModel::ideal(gamma),
            "tm" => Ok(EosModel::Tm),
            "ip" => Ok(EosModel::Ip),
            "rc" => Ok(EosModel::Rc),
            other => Err(Error::Config(format!("unknown equation of state '{other}'"))),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            EosModel::Ideal { gamma } => Some(*gamma),
            _ => None,
        }
    }

    /// H(θ), the enthalpy as a function of θ = p/ρ.
    #[inline]
    pub fn h_theta(&self, theta: f64) -> f64 {
        match *self {
            EosModel::Ideal { gamma } => 1.0 + gamma / (gamma - 1.0) * theta,
            EosModel::Tm => 2.5 * theta + (2.25 * theta * theta + 1.0).sqrt(),
            EosModel::Ip => 2.0 * theta + (4.0 * theta * theta + 1.0).sqrt(),
            EosModel::Rc => {
                2.0 * (6.0 * theta * theta + 4.0 * theta + 1.0) / (3.0 * theta + 2.0)
            }
        }
    }

    /// dH/dθ.
    #[inline]
    pub fn dh_dtheta(&self, theta: f64) -> f64 {
        match *self {
            EosModel::Ideal { gamma } => gamma / (gamma - 1.0),
            EosModel::Tm => 2.5 + 2.25 * theta / (2.25 * theta * theta + 1.0).sqrt(),
            EosModel::Ip => 2.0 + 4.0 * theta / (4.0 * theta * theta + 1.0).sqrt(),
            EosModel::Rc => {
                let d = 3.0 * theta + 2.0;
                (36.0 * theta * theta + 48.0 * theta + 10.0) / (d * d)
            }
        }
    }

    /// Unchecked enthalpy for the hot paths.
    #[inline]
    pub fn h(&self, p: f64, rho: f64) -> f64 {
        self.h_theta(p / rho)
    }

    /// Unchecked squared sound speed.
    #[inline]
    pub fn cs2(&self, p: f64, rho: f64) -> f64 {
        match *self {
            EosModel::Ideal { gamma } => gamma * p / (self.h(p, rho) * rho),
            EosModel::Tm => {
                let s = (9.0 * p * p + 4.0 * rho * rho).sqrt();
                (5.0 * p * s + 9.0 * p * p) / (12.0 * p * s + 36.0 * p * p + 6.0 * rho * rho)
            }
            EosModel::Ip => {
                let s = (4.0 * p * p + rho * rho).sqrt();
                2.0 * p * s / (4.0 * p * s + 4.0 * p * p + rho * rho)
            }
            EosModel::Rc => {
                let num = p * (3.0 * p + 2.0 * rho) * (18.0 * p * p + 24.0 * p * rho + 5.0 * rho * rho);
                let den = 3.0
                    * (6.0 * p * p + 4.0 * p * rho + rho * rho)
                    * (9.0 * p * p + 12.0 * p * rho + 2.0 * rho * rho);
                num / den
            }
        }
    }
}

impl fmt::Display for EosModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EosModel::Ideal { gamma } => write!(f, "id(gamma={gamma})"),
            EosModel::Tm => write!(f, "tm"),
            EosModel::Ip => write!(f, "ip"),
            EosModel::Rc => write!(f, "rc"),
        }
    }
}

fn check_thermo(p: f64, rho: f64, strict_p: bool) -> Result<()> {
    if !p.is_finite() || !rho.is_finite() {
        return Err(Error::Domain(format!("non-finite input p = {p}, rho = {rho}")));
    }
    if rho <= 0.0 {
        return Err(Error::Domain(format!("density must be positive, got {rho}")));
    }
    if p < 0.0 || (strict_p && p == 0.0) {
        return Err(Error::Domain(format!("pressure out of range: {p}")));
    }
    Ok(())
}

/// Specific enthalpy h(p, ρ).
pub fn enthalpy(eos: EosModel, p: f64, rho: f64) -> Result<f64> {
    check_thermo(p, rho, false)?;
    Ok(eos.h(p, rho))
}

/// Specific internal energy ε = h − 1 − p/ρ.
pub fn specific_internal_energy(eos: EosModel, p: f64, rho: f64) -> Result<f64> {
    Ok(enthalpy(eos, p, rho)? - 1.0 - p / rho)
}

/// Squared sound speed c_s².
pub fn sound_speed_sq(eos: EosModel, p: f64, rho: f64) -> Result<f64> {
    check_thermo(p, rho, true)?;
    Ok(eos.cs2(p, rho))
}

/// Whether h(p, ρ) satisfies h ≥ √(1 + θ²) + θ, allowing 1e-14·h of rounding slack.
pub fn check_taub(eos: EosModel, p: f64, rho: f64) -> Result<bool> {
    let h = enthalpy(eos, p, rho)?;
    let theta = p / rho;
    Ok(h >= (1.0 + theta * theta).sqrt() + theta - 1e-14 * h)
}

/// D = ρΓ, m = ρhΓ²v, E = ρhΓ² − p.
pub fn prim_to_cons(eos: EosModel, prim: &Primitive) -> Conserved {
    let lorentz_sq = 1.0 / (1.0 - prim.speed_sq());
    let lorentz = lorentz_sq.sqrt();
    let rho_h_w2 = prim.rho * eos.h(prim.p, prim.rho) * lorentz_sq;
    Conserved {
        d: prim.rho * lorentz,
        m: [rho_h_w2 * prim.v[0], rho_h_w2 * prim.v[1]],
        e: rho_h_w2 - prim.p,
    }
}

/// Outcome of a successful conservative-to-primitive recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryReport {
    pub prim: Primitive,
    pub iterations: usize,
    /// Relative size of the last correction to the unknown (p or Π).
    pub residual: f64,
    pub method: RecoveryMethod,
    /// Number of Newton steps that had to be damped (RC only).
    pub damped_steps: usize,
}

/// D and q = E − √(D² + |m|²).
#[inline]
pub fn constraint_values(u: &Conserved) -> (f64, f64) {
    (u.d, u.e - (u.d * u.d + u.momentum_sq()).sqrt())
}

fn require_admissible(u: &Conserved) -> Result<()> {
    let (d, q) = constraint_values(u);
    if !(d > 0.0 && q > 0.0 && u.is_finite()) {
        return Err(Error::Inadmissible { d, q });
    }
    Ok(())
}

/// Builds primitives from Π = E + p, keeping the factor 1 − v² free of cancellation.
#[inline]
fn prim_from_pi(u: &Conserved, pi: f64, p: f64) -> Primitive {
    let mabs = u.momentum_sq().sqrt();
    let w = ((pi - mabs) * (pi + mabs)).sqrt();
    Primitive {
        rho: u.d * w / pi,
        v: [u.m[0] / pi, u.m[1] / pi],
        p,
    }
}

/// Recovers primitives from an admissible conserved state, dispatching on the model.
pub fn cons_to_prim(eos: EosModel, u: &Conserved, tol: f64, max_iter: usize) -> Result<RecoveryReport> {
    match eos {
        EosModel::Ideal { gamma } => cons_to_prim_id(u, gamma, tol, max_iter),
        EosModel::Rc => cons_to_prim_rc(u, tol, max_iter),
        EosModel::Tm | EosModel::Ip => cons_to_prim_pressure(eos, u, tol, max_iter),
    }
}

/// Recovery with a pressure hint, typically the pressure of a nearby state.
/// The hint only changes the Newton start for the ID, TM and IP routes; the RC
/// iteration always starts from Π = E.
pub fn cons_to_prim_from(
    eos: EosModel,
    u: &Conserved,
    p_guess: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RecoveryReport> {
    match eos {
        EosModel::Ideal { gamma } => cons_to_prim_id_from(u, gamma, Some(p_guess), tol, max_iter),
        EosModel::Rc => cons_to_prim_rc(u, tol, max_iter),
        EosModel::Tm | EosModel::Ip => cons_to_prim_pressure_from(eos, u, Some(p_guess), tol, max_iter),
    }
}

/// [`cons_to_prim`] with the default tolerance and iteration budget.
#[inline]
pub fn recover(eos: EosModel, u: &Conserved) -> Result<Primitive> {
    cons_to_prim(eos, u, DEFAULT_TOL, DEFAULT_MAX_ITER).map(|r| r.prim)
}

/// Φ(p) = p/(γ−1) − E + |m|²/(E+p) + D√(1 − |m|²/(E+p)²).
///
/// The two leading terms are regrouped so the nearly cancelling parts are
/// formed from E − |m| instead of from E and |m|²/(E+p) separately.
pub fn id_phi_residual(p: f64, u: &Conserved, gamma: f64) -> Result<f64> {
    let mabs = u.momentum_sq().sqrt();
    let pi = u.e + p;
    let disc = (pi - mabs) * (pi + mabs);
    if !(disc >= 0.0) || !(pi > 0.0) {
        return Err(Error::Domain(format!(
            "Phi(p) undefined: E + p = {pi} does not exceed |m| = {mabs}"
        )));
    }
    Ok(phi_value(p, u.d, mabs, u.e, gamma))
}

#[inline]
fn phi_value(p: f64, d: f64, mabs: f64, e: f64, gamma: f64) -> f64 {
    let pi = e + p;
    let w = ((pi - mabs) * (pi + mabs)).sqrt();
    p / (gamma - 1.0) - ((e - mabs) * (e + mabs) + e * p) / pi + d * w / pi
}

#[inline]
fn phi_with_derivative(p: f64, d: f64, mabs: f64, e: f64, gamma: f64) -> (f64, f64) {
    let pi = e + p;
    let w = ((pi - mabs) * (pi + mabs)).sqrt();
    let s2 = (mabs / pi) * (mabs / pi);
    let val = p / (gamma - 1.0) - ((e - mabs) * (e + mabs) + e * p) / pi + d * w / pi;
    (val, 1.0 / (gamma - 1.0) - s2 + d * s2 / w)
}

/// Bracketed Newton for a root of an increasing function.
///
/// `f` returns (value, derivative, magnitude), where magnitude bounds the terms
/// summed in the value. The bracket is tightened as signs are observed; steps
/// leaving it become bisection steps. Converges when the relative correction
/// drops below `tol`, the bracket collapses, or the value is within rounding of
/// zero (8ε·magnitude), since past that point Newton only chases noise.
fn safeguarded_newton<F>(
    mut f: F,
    x0: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
    method: RecoveryMethod,
) -> Result<(f64, usize, f64)>
where
    F: FnMut(f64) -> (f64, f64, f64),
{
    let mut x = x0.clamp(lo, hi);
    let mut last_val = f64::NAN;
    for it in 1..=max_iter {
        let (val, der, mag) = f(x);
        last_val = val;
        if val.abs() <= 8.0 * f64::EPSILON * mag {
            return Ok((x, it, 0.0));
        }
        if val < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let mut next = x - val / der;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        let scale = x.abs().max(f64::MIN_POSITIVE);
        if step <= tol * scale || (hi - lo) <= tol * scale {
            return Ok((x, it, step / scale));
        }
    }
    Err(Error::NoConvergence {
        method,
        iterations: max_iter,
        residual: last_val,
    })
}

/// Ideal-gas recovery by safeguarded Newton on Φ(p).
pub fn cons_to_prim_id(u: &Conserved, gamma: f64, tol: f64, max_iter: usize) -> Result<RecoveryReport> {
    cons_to_prim_id_from(u, gamma, None, tol, max_iter)
}

/// As [`cons_to_prim_id`], starting Newton from `p_guess` when it lies inside
/// the bracket.
pub fn cons_to_prim_id_from(
    u: &Conserved,
    gamma: f64,
    p_guess: Option<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<RecoveryReport> {
    require_admissible(u)?;
    let (_, q) = constraint_values(u);
    let mabs = u.momentum_sq().sqrt();
    let (d, e) = (u.d, u.e);
    // Φ(0) < 0 for admissible states and Φ((γ−1)E) > 0, so [0, (γ−1)E] brackets the root.
    let hi = (gamma - 1.0) * e;
    let p0 = match p_guess {
        Some(g) if g > 0.0 && g < hi => g,
        _ => ((gamma - 1.0) * q).max(1e-12).min(hi),
    };
    let (p, iterations, residual) = safeguarded_newton(
        |p| {
            let (v, dv) = phi_with_derivative(p, d, mabs, e, gamma);
            // D·w/Π carries the rounding of Π − |m| relative to w.
            let pi = e + p;
            (v, dv, p / (gamma - 1.0) + e + d + d * ((pi + mabs) / (pi - mabs)).sqrt())
        },
        p0,
        0.0,
        hi,
        tol,
        max_iter,
        RecoveryMethod::PhiNewton,
    )?;
    let prim = prim_from_pi(u, e + p, p);
    finish(prim, iterations, residual, RecoveryMethod::PhiNewton, 0)
}

fn finish(
    prim: Primitive,
    iterations: usize,
    residual: f64,
    method: RecoveryMethod,
    damped_steps: usize,
) -> Result<RecoveryReport> {
    if !prim.is_physical() {
        return Err(Error::NoConvergence {
            method,
            iterations,
            residual,
        });
    }
    Ok(RecoveryReport {
        prim,
        iterations,
        residual,
        method,
        damped_steps,
    })
}

/// Energy-definition residual G(p) = ρhΓ² − p − E and its derivative in p.
#[inline]
fn pressure_residual(eos: EosModel, p: f64, d: f64, mabs: f64, e: f64) -> (f64, f64) {
    let pi = e + p;
    let w = ((pi - mabs) * (pi + mabs)).sqrt();
    let lorentz = pi / w;
    let rho = d * w / pi;
    let theta = p / rho;
    let h = eos.h_theta(theta);
    let hp = eos.dh_dtheta(theta);
    let m2 = mabs * mabs;
    let dlorentz = -m2 / (w * w * w);
    let drho = d * m2 / (w * pi * pi);
    let dh = hp / rho - hp * theta / rho * drho;
    (d * lorentz * h - pi, d * (dlorentz * h + lorentz * dh) - 1.0)
}

/// Generic recovery by bracketed Newton on the energy residual; used for TM and IP.
pub fn cons_to_prim_pressure(
    eos: EosModel,
    u: &Conserved,
    tol: f64,
    max_iter: usize,
) -> Result<RecoveryReport> {
    cons_to_prim_pressure_from(eos, u, None, tol, max_iter)
}

/// As [`cons_to_prim_pressure`], starting Newton from `p_guess` when it lies
/// inside the bracket.
pub fn cons_to_prim_pressure_from(
    eos: EosModel,
    u: &Conserved,
    p_guess: Option<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<RecoveryReport> {
    require_admissible(u)?;
    let (_, q) = constraint_values(u);
    let mabs = u.momentum_sq().sqrt();
    let (d, e) = (u.d, u.e);
    let lo = 1e-16 * e;
    let hi = 2.0 * e;
    let method = RecoveryMethod::PressureResidual;
    if pressure_residual(eos, lo, d, mabs, e).0 >= 0.0 {
        return finish(prim_from_pi(u, e + lo, lo), 1, 0.0, method, 0);
    }
    let p0 = match p_guess {
        Some(g) if g > lo && g < hi => g,
        _ => (0.5 * q).max(1e-12 * e),
    };
    let (p, iterations, residual) = safeguarded_newton(
        |p| {
            let (g, dg) = pressure_residual(eos, p, d, mabs, e);
            // Γ = Π/√((Π − |m|)(Π + |m|)) carries the rounding of Π − |m|,
            // amplified by Π/(Π − |m|) for ultra-relativistic states.
            let pi = e + p;
            (g, dg, pi * (2.0 + pi / (pi - mabs)))
        },
        p0,
        lo,
        hi,
        tol,
        max_iter,
        method,
    )?;
    finish(prim_from_pi(u, e + p, p), iterations, residual, method, 0)
}

/// θ = T(h) for the RC closure, the positive root of 12θ² + (8 − 3h)θ + 2 − 2h = 0.
#[inline]
pub fn rc_temperature(h: f64) -> f64 {
    let s = ((3.0 * h + 8.0) * (3.0 * h + 8.0) - 96.0).sqrt();
    if 3.0 * h < 8.0 {
        4.0 * (h - 1.0) / (s + 8.0 - 3.0 * h)
    } else {
        (3.0 * h - 8.0 + s) / 24.0
    }
}

/// T′(h).
#[inline]
pub fn rc_temperature_derivative(h: f64) -> f64 {
    let s = ((3.0 * h + 8.0) * (3.0 * h + 8.0) - 96.0).sqrt();
    0.125 + (3.0 * h + 8.0) / (8.0 * s)
}

/// R(h) = 2 − T(h)/h − T′(h), the slope factor in S′(Π) = R(h)Π − E.
#[inline]
pub fn rc_r_factor(h: f64) -> f64 {
    2.0 - rc_temperature(h) / h - rc_temperature_derivative(h)
}

/// S(Π) = Π² − ΠE − D²hT(h) with h = √(Π² − |m|²)/D, and S′(Π).
pub fn rc_s_function(pi: f64, u: &Conserved) -> (f64, f64) {
    let mabs = u.momentum_sq().sqrt();
    rc_s_parts(pi, u.d, mabs, u.e)
}

#[inline]
fn rc_s_parts(pi: f64, d: f64, mabs: f64, e: f64) -> (f64, f64) {
    let h = ((pi - mabs) * (pi + mabs)).sqrt() / d;
    let t = rc_temperature(h);
    let s = pi * (pi - e) - d * d * h * t;
    let ds = (2.0 - t / h - rc_temperature_derivative(h)) * pi - e;
    (s, ds)
}

/// Step control for the RC Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RcStepControl {
    /// Plain Newton steps; damping (halving k_r) only when a full step produces
    /// h ≤ 1 + 1e-14 or non-finite values.
    #[default]
    Standard,
    /// Additionally shortens any step that would cross the root, so every
    /// iterate stays below Π* and the sequence increases strictly. The shortened
    /// step is the secant point between Π_r and the overshooting Newton point,
    /// with halving as a last resort.
    NonCrossing,
}

/// RC recovery by Newton on S(Π) from Π₀ = E.
pub fn cons_to_prim_rc(u: &Conserved, tol: f64, max_iter: usize) -> Result<RecoveryReport> {
    cons_to_prim_rc_with(u, tol, max_iter, RcStepControl::Standard, None)
}

/// RC recovery with a chosen step control, optionally recording every iterate
/// Π_k (starting with Π₀ = E). `damped_steps` in the report counts the
/// iterations whose step was shortened.
pub fn cons_to_prim_rc_with(
    u: &Conserved,
    tol: f64,
    max_iter: usize,
    control: RcStepControl,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<RecoveryReport> {
    require_admissible(u)?;
    let mabs = u.momentum_sq().sqrt();
    let (d, e) = (u.d, u.e);
    let method = RecoveryMethod::PiNewton;
    let h_of = |pi: f64| ((pi - mabs) * (pi + mabs)).sqrt() / d;
    let mut pi = e;
    let mut damped = 0;
    if let Some(t) = trace.as_deref_mut() {
        t.clear();
        t.push(pi);
    }
    let (mut s, mut ds) = rc_s_parts(pi, d, mabs, e);
    for it in 1..=max_iter {
        if s == 0.0 || (control == RcStepControl::NonCrossing && s > 0.0) {
            return finish(prim_from_pi(u, pi, pi - e), it, 0.0, method, damped);
        }
        let step = -s / ds;
        let mut next = pi + step;
        let (mut s_next, mut ds_next) = rc_s_parts(next, d, mabs, e);
        let bad = |pi: f64, s: f64, ds: f64| !(s.is_finite() && ds.is_finite()) || h_of(pi) <= 1.0 + 1e-14;
        let crossed = |s_next: f64| control == RcStepControl::NonCrossing && s_next > 0.0;
        let mut shortened = false;
        if !bad(next, s_next, ds_next) && crossed(s_next) {
            let k = -s / (s_next - s);
            let cand = pi + k * step;
            let (sc, dsc) = rc_s_parts(cand, d, mabs, e);
            if cand > pi && !bad(cand, sc, dsc) && sc <= 0.0 {
                (next, s_next, ds_next) = (cand, sc, dsc);
                shortened = true;
            }
        }
        let mut k = 1.0;
        let mut halvings = 0;
        while bad(next, s_next, ds_next) || crossed(s_next) {
            k *= 0.5;
            halvings += 1;
            if halvings > 60 {
                return Err(Error::NoConvergence {
                    method,
                    iterations: it,
                    residual: s,
                });
            }
            next = pi + k * step;
            (s_next, ds_next) = rc_s_parts(next, d, mabs, e);
            shortened = true;
        }
        if shortened {
            damped += 1;
        }
        let rel = (next - pi).abs() / next;
        if next == pi {
            return finish(prim_from_pi(u, pi, pi - e), it, rel, method, damped);
        }
        pi = next;
        s = s_next;
        ds = ds_next;
        if let Some(t) = trace.as_deref_mut() {
            t.push(pi);
        }
        if rel <= tol {
            return finish(prim_from_pi(u, pi, pi - e), it, rel, method, damped);
        }
    }
    Err(Error::NoConvergence {
        method,
        iterations: max_iter,
        residual: s,
    })
}

/// Coefficients (a₀, a₁, a₂, a₃) of the monic velocity quartic for the ideal gas.
pub fn xi_coefficients(u: &Conserved, gamma: f64) -> [f64; 4] {
    let m2 = u.momentum_sq();
    let m = m2.sqrt();
    let g1 = gamma - 1.0;
    let den = g1 * g1 * (m2 + u.d * u.d);
    let e = u.e;
    [
        m2 / den,
        -2.0 * gamma * m * e / den,
        (gamma * gamma * e * e + 2.0 * g1 * m2 - g1 * g1 * u.d * u.d) / den,
        -2.0 * gamma * g1 * m * e / den,
    ]
}

/// Ξ(v) = v⁴ + a₃v³ + a₂v² + a₁v + a₀.
pub fn xi_quartic_residual(v: f64, u: &Conserved, gamma: f64) -> f64 {
    let [a0, a1, a2, a3] = xi_coefficients(u, gamma);
    (((v + a3) * v + a2) * v + a1) * v + a0
}

/// Horner evaluation with coefficients in ascending order.
fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Real roots of a polynomial (ascending coefficients) in [a, b]. The interval
/// is cut at the roots of the derivative, found recursively, so every piece is
/// monotone and holds at most one root, which is then bisected to rounding.
fn poly_roots_in(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    if c.len() < 2 {
        return Vec::new();
    }
    let dc: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect();
    let mut cuts = vec![a];
    cuts.extend(poly_roots_in(&dc, a, b));
    cuts.push(b);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (mut flo, fhi) = (poly_eval(c, lo), poly_eval(c, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = poly_eval(c, mid);
            if fm == 0.0 {
                (lo, hi) = (mid, mid);
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        // Bisection stops where the sign of the value is rounding noise; a few
        // Newton steps on the unrounded slope usually recover the last digits.
        let mut root = 0.5 * (lo + hi);
        for _ in 0..3 {
            let der = poly_eval(&dc, root);
            if der != 0.0 {
                let cand = root - poly_eval(c, root) / der;
                if cand > w[0] && cand < w[1] && poly_eval(c, cand).abs() <= poly_eval(c, root).abs() {
                    root = cand;
                }
            }
        }
        roots.push(root);
    }
    roots.dedup();
    roots
}

/// Ideal-gas recovery through the velocity quartic. Intended as an independent
/// cross-check; requires nonzero momentum. Among the roots in (0, |m|/E) the one
/// giving p > 0 with the smallest |Φ(p)| is taken.
pub fn cons_to_prim_id_xi(u: &Conserved, gamma: f64) -> Result<RecoveryReport> {
    require_admissible(u)?;
    let mabs = u.momentum_sq().sqrt();
    if mabs == 0.0 {
        return Err(Error::Domain("quartic recovery needs nonzero momentum".into()));
    }
    let c = xi_coefficients(u, gamma);
    let vmax = (mabs / u.e).min(1.0);
    let roots = poly_roots_in(&[c[0], c[1], c[2], c[3], 1.0], 0.0, vmax);
    let best = roots
        .iter()
        .filter(|&&v| v > 0.0 && v < 1.0 && mabs / v - u.e > 0.0)
        .map(|&v| (v, phi_value(mabs / v - u.e, u.d, mabs, u.e, gamma).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let (v, phi) = best.ok_or(Error::NoConvergence {
        method: RecoveryMethod::XiQuartic,
        iterations: roots.len(),
        residual: f64::NAN,
    })?;
    let pi = mabs / v;
    let prim = prim_from_pi(u, pi, pi - u.e);
    finish(prim, roots.len(), phi, RecoveryMethod::XiQuartic, 0)
}
