//! CSV output of nodal solutions, reference curves and convergence tables.
//!
//! Reals are written with 17 significant digits, so reading them back
//! reproduces the f64 values bitwise.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::basis::BasisData;
use crate::eos::{self, EosModel};
use crate::error::{Error, Result};
use crate::harness::norms::ConvergenceRow;
use crate::harness::reference::ReferenceSolution;
use crate::solver::Field;
use crate::state::Primitive;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[inline]
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io_err(path))?;
        }
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// Node-wise primitives: `x,rho,v1,p` in 1-D and `x,y,rho,v1,v2,p` in 2-D,
/// element by element, nodes in element order.
pub fn write_solution_csv(field: &Field, basis: &BasisData, model: EosModel, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let dim = field.mesh.dim;
    let header = if dim == 1 { "x,rho,v1,p" } else { "x,y,rho,v1,v2,p" };
    writeln!(w, "{header}").map_err(io_err(path))?;
    let nn = field.nodes_per_element();
    for (k, u) in field.u.iter().enumerate() {
        let prim = eos::recover(model, u)?;
        let [x, y] = field.node_position(&basis.nodes, k / nn, k % nn);
        let line = if dim == 1 {
            [x, prim.rho, prim.v[0], prim.p].map(fmt_real).join(",")
        } else {
            [x, y, prim.rho, prim.v[0], prim.v[1], prim.p].map(fmt_real).join(",")
        };
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Cell-centre primitives of a reference run, `x,rho,v1,p`.
pub fn write_reference_csv(reference: &ReferenceSolution, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,rho,v1,p").map_err(io_err(path))?;
    for (i, p) in reference.prims.iter().enumerate() {
        let line = [reference.center(i), p.rho, p.v[0], p.p].map(fmt_real).join(",");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Convergence table with columns cells, L¹ error and order, L² error and order, L∞ error and order.
pub fn write_table_csv(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "cells,l1_error,l1_order,l2_error,l2_order,linf_error,linf_order").map_err(io_err(path))?;
    for r in rows {
        let o = |k: usize| r.orders.map(|o| fmt_real(o[k])).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.cells,
            fmt_real(r.norms.l1),
            o(0),
            fmt_real(r.norms.l2),
            o(1),
            fmt_real(r.norms.linf),
            o(2)
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// A solution CSV read back: coordinates and primitives per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRows {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
    pub prims: Vec<Primitive>,
}

pub fn read_solution_csv(path: &Path) -> Result<SolutionRows> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(h) => h.map_err(io_err(path))?,
        None => return Err(Error::Config(format!("{}: empty file", path.display()))),
    };
    let dim = match header.trim() {
        "x,rho,v1,p" => 1,
        "x,y,rho,v1,v2,p" => 2,
        h => return Err(Error::Config(format!("{}: unexpected header '{h}'", path.display()))),
    };
    let mut out = SolutionRows {
        dim,
        points: Vec::new(),
        prims: Vec::new(),
    };
    for (n, line) in lines.enumerate() {
        let line = line.map_err(io_err(path))?;
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("{} line {}: {e}", path.display(), n + 2)))?;
        if vals.len() != 2 + 2 * dim {
            return Err(Error::Config(format!("{} line {}: wrong column count", path.display(), n + 2)));
        }
        if dim == 1 {
            out.points.push([vals[0], 0.0]);
            out.prims.push(Primitive::new_1d(vals[1], vals[2], vals[3]));
        } else {
            out.points.push([vals[0], vals[1]]);
            out.prims.push(Primitive::new(vals[2], [vals[3], vals[4]], vals[5]));
        }
    }
    Ok(out)
}
