//! Boundary conditions, realised as ghost face traces.

use crate::eos::{prim_to_cons, EosModel};
use crate::lwfr::Trace;
use crate::state::{Conserved, Direction, Primitive};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    /// Zero-gradient: the ghost copies the nearest interior data.
    Outflow,
    /// Mirror with the normal momentum flipped.
    Reflective,
    /// Fixed state.
    Dirichlet(Primitive),
    /// Fixed beam state for |x − center| < half_width, outflow elsewhere.
    JetInflow {
        state: Primitive,
        center: f64,
        half_width: f64,
    },
    /// Post-shock state for x ≤ x0, reflective otherwise.
    DmrBottom { post: Primitive, x0: f64 },
    /// Post-shock state left of the moving front x_s(t), pre-shock state right of it.
    DmrTop {
        post: Primitive,
        pre: Primitive,
        shock_speed: f64,
    },
}

/// Root of S(x, t) = √3(x − 1/6) − 2 v_s t = 1.
pub fn dmr_shock_position(t: f64, shock_speed: f64) -> f64 {
    1.0 / 6.0 + (1.0 + 2.0 * shock_speed * t) / 3f64.sqrt()
}

/// Boundary conditions per axis and side (`sides[axis][0]` is the low side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub sides: [[BoundaryCondition; 2]; 2],
}

impl Boundaries {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Boundaries { sides: [[bc; 2]; 2] }
    }

    pub fn periodic(&self, axis: usize) -> bool {
        self.sides[axis][0] == BoundaryCondition::Periodic
    }

    /// Periodicity must hold on both sides of an axis or on neither.
    pub fn validate(&self, dim: usize) -> crate::Result<()> {
        for a in 0..dim {
            let p = self.sides[a].map(|s| s == BoundaryCondition::Periodic);
            if p[0] != p[1] {
                return Err(crate::Error::Config(format!("axis {a}: periodic on one side only")));
            }
        }
        Ok(())
    }
}

fn dirichlet(eos: EosModel, prim: &Primitive, dir: Direction) -> Trace {
    let u: Conserved = prim_to_cons(eos, prim);
    Trace::from_state(eos, &u, prim, dir)
}

/// Ghost trace facing `interior` across a boundary normal to `dir`.
/// `pos` is the coordinate along the face and `t` the time at which
/// time-dependent data is sampled.
pub fn ghost_trace(
    bc: &BoundaryCondition,
    eos: EosModel,
    interior: &Trace,
    dir: Direction,
    pos: f64,
    t: f64,
) -> Trace {
    match *bc {
        BoundaryCondition::Periodic | BoundaryCondition::Outflow => interior.as_ghost(),
        BoundaryCondition::Reflective => interior.reflect(dir),
        BoundaryCondition::Dirichlet(prim) => dirichlet(eos, &prim, dir),
        BoundaryCondition::JetInflow {
            state,
            center,
            half_width,
        } => {
            if (pos - center).abs() < half_width {
                dirichlet(eos, &state, dir)
            } else {
                interior.as_ghost()
            }
        }
        BoundaryCondition::DmrBottom { post, x0 } => {
            if pos <= x0 {
                dirichlet(eos, &post, dir)
            } else {
                interior.reflect(dir)
            }
        }
        BoundaryCondition::DmrTop {
            post,
            pre,
            shock_speed,
        } => {
            if pos < dmr_shock_position(t, shock_speed) {
                dirichlet(eos, &post, dir)
            } else {
                dirichlet(eos, &pre, dir)
            }
        }
    }
}
