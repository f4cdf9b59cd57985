//! First-order Rusanov finite-volume reference solver for 1-D problems.

use crate::eos::{self, prim_to_cons};
use crate::error::{Error, Result};
use crate::flux::{max_wave_speed, physical_flux, rusanov_from_parts};
use crate::harness::boundary::BoundaryCondition;
use crate::harness::problems::ProblemSpec;
use crate::state::{Conserved, Direction, Primitive};

/// Cell-centred solution of the reference scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub low: f64,
    pub high: f64,
    pub prims: Vec<Primitive>,
}

impl ReferenceSolution {
    pub fn cells(&self) -> usize {
        self.prims.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.low + (i as f64 + 0.5) * (self.high - self.low) / self.cells() as f64
    }

    /// Piecewise-constant lookup of the cell containing x.
    pub fn sample(&self, x: f64) -> Primitive {
        let n = self.cells();
        let s = (x - self.low) / (self.high - self.low) * n as f64;
        let i = (s.floor().max(0.0) as usize).min(n - 1);
        self.prims[i]
    }
}

/// Runs the first-order scheme u_i ← u_i − (Δt/Δx)(f_{i+1/2} − f_{i−1/2}) with
/// Rusanov fluxes and Δt = cfl·Δx/max Λ until `spec.t_final`.
pub fn reference_solution(spec: &ProblemSpec, cells: usize, cfl: f64) -> Result<ReferenceSolution> {
    if spec.dim() != 1 {
        return Err(Error::Config(format!("reference solver is 1-D only; {} is 2-D", spec.id)));
    }
    if cells == 0 {
        return Err(Error::Config("reference solver needs at least one cell".into()));
    }
    let model = spec.eos;
    let dx = (spec.high[0] - spec.low[0]) / cells as f64;
    let mut u: Vec<Conserved> = (0..cells)
        .map(|i| prim_to_cons(model, &spec.initial(spec.low[0] + (i as f64 + 0.5) * dx, 0.0)))
        .collect();
    let mut prims = vec![Primitive::new_1d(1.0, 0.0, 1.0); cells];
    let mut fl = vec![Conserved::ZERO; cells];
    let mut lam = vec![0.0; cells];
    let mut faces = vec![Conserved::ZERO; cells + 1];
    let bcs = spec.boundaries.sides[0];
    let dir = Direction::X;
    let ghost = |bc: &BoundaryCondition, u: Conserved, f: Conserved, l: f64| -> (Conserved, Conserved, f64) {
        match bc {
            BoundaryCondition::Reflective => (u.reflect(dir), f.reflect_flux(dir), l),
            BoundaryCondition::Dirichlet(p) => {
                let g = prim_to_cons(model, p);
                (g, physical_flux(&g, p, dir), max_wave_speed(model, p, dir))
            }
            _ => (u, f, l),
        }
    };
    let mut t = 0.0;
    while t < spec.t_final {
        let mut lmax: f64 = 0.0;
        for i in 0..cells {
            let p = eos::recover(model, &u[i]).map_err(|e| Error::Admissibility {
                step: 0,
                element: i,
                reason: e.to_string(),
            })?;
            prims[i] = p;
            fl[i] = physical_flux(&u[i], &p, dir);
            lam[i] = max_wave_speed(model, &p, dir);
            lmax = lmax.max(lam[i]);
        }
        let dt = (cfl * dx / lmax).min(spec.t_final - t);
        for (f, face) in faces.iter_mut().enumerate().take(cells).skip(1) {
            let (a, b) = (f - 1, f);
            *face = rusanov_from_parts(&u[a], &fl[a], &u[b], &fl[b], lam[a].max(lam[b]));
        }
        let periodic = bcs[0] == BoundaryCondition::Periodic;
        let (ul, flx, ll) = if periodic {
            (u[cells - 1], fl[cells - 1], lam[cells - 1])
        } else {
            ghost(&bcs[0], u[0], fl[0], lam[0])
        };
        faces[0] = rusanov_from_parts(&ul, &flx, &u[0], &fl[0], ll.max(lam[0]));
        let (ur, frx, lr) = if periodic {
            (u[0], fl[0], lam[0])
        } else {
            ghost(&bcs[1], u[cells - 1], fl[cells - 1], lam[cells - 1])
        };
        faces[cells] = rusanov_from_parts(&u[cells - 1], &fl[cells - 1], &ur, &frx, lam[cells - 1].max(lr));
        let r = dt / dx;
        for i in 0..cells {
            u[i] = u[i].add_scaled(-r, &(faces[i + 1] - faces[i]));
        }
        t += dt;
    }
    for i in 0..cells {
        prims[i] = eos::recover(model, &u[i])?;
    }
    Ok(ReferenceSolution {
        low: spec.low[0],
        high: spec.high[0],
        prims,
    })
}
