//! Quadrature error norms and convergence tables.

use crate::basis::BasisData;
use crate::error::{Error, Result};
use crate::solver::Field;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Norms of `values[node] − exact(x, y)` over the field, using the nodal
/// quadrature: L¹ = Σ_e |K_e| Σ_i w_i |e_i|, L² likewise, L∞ = max |e_i|.
pub fn error_norms<F: Fn(f64, f64) -> f64>(field: &Field, basis: &BasisData, values: &[f64], exact: F) -> ErrorNorms {
    let n1 = basis.degree + 1;
    let nn = field.nodes_per_element();
    let dim = field.mesh.dim;
    let area = if dim == 2 {
        field.mesh.spacing[0] * field.mesh.spacing[1]
    } else {
        field.mesh.spacing[0]
    };
    let mut out = ErrorNorms::default();
    for e in 0..field.mesh.n_elements() {
        let (mut s1, mut s2) = (0.0, 0.0);
        for p in 0..nn {
            let [x, y] = field.node_position(&basis.nodes, e, p);
            let w = if dim == 2 {
                basis.weights[p % n1] * basis.weights[p / n1]
            } else {
                basis.weights[p]
            };
            let err = (values[e * nn + p] - exact(x, y)).abs();
            s1 += w * err;
            s2 += w * err * err;
            out.linf = out.linf.max(err);
        }
        out.l1 += area * s1;
        out.l2 += area * s2;
    }
    out.l2 = out.l2.sqrt();
    out
}

/// One row of a convergence table; orders are absent on the first row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub norms: ErrorNorms,
    pub orders: Option<[f64; 3]>,
}

/// Observed order between two successive resolutions.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Checks that every resolution doubles the previous one.
pub fn check_doubling(cells: &[usize]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::Config("empty cell list".into()));
    }
    for w in cells.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::Config(format!(
                "cell counts must double between rows, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Builds table rows from (cells, norms) pairs, filling in orders.
pub fn convergence_rows(data: &[(usize, ErrorNorms)]) -> Vec<ConvergenceRow> {
    let mut rows = Vec::with_capacity(data.len());
    for (k, &(cells, norms)) in data.iter().enumerate() {
        let orders = (k > 0).then(|| {
            let prev = data[k - 1].1;
            [
                observed_order(prev.l1, norms.l1),
                observed_order(prev.l2, norms.l2),
                observed_order(prev.linf, norms.linf),
            ]
        });
        rows.push(ConvergenceRow { cells, norms, orders });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, Mesh};
    use crate::state::Conserved;

    fn field_1d(cells: usize, degree: usize) -> (Field, BasisData) {
        let basis = build_basis(degree).unwrap();
        let mesh = Mesh::new_1d(0.0, 1.0, cells).unwrap();
        let nn = degree + 1;
        (
            Field {
                mesh,
                degree,
                u: vec![Conserved::ZERO; cells * nn],
            },
            basis,
        )
    }

    #[test]
    fn exact_and_offset() {
        let (field, basis) = field_1d(8, 3);
        let f = |x: f64| (3.0 * x).sin();
        let vals: Vec<f64> = (0..field.u.len())
            .map(|k| f(field.node_position(&basis.nodes, k / 4, k % 4)[0]))
            .collect();
        let n = error_norms(&field, &basis, &vals, |x, _| f(x));
        assert_eq!(n, ErrorNorms::default());
        let shifted: Vec<f64> = vals.iter().map(|v| v + 1e-3).collect();
        let n = error_norms(&field, &basis, &shifted, |x, _| f(x));
        assert!((n.l1 - 1e-3).abs() < 1e-15);
        assert!((n.l2 - 1e-3).abs() < 1e-15);
        assert!((n.linf - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn orders_from_table_values() {
        assert!((observed_order(1.51842e-5, 1.56589e-7) - 6.599).abs() < 1e-3);
        let e = |v| ErrorNorms { l1: v, l2: v, linf: v };
        let rows = convergence_rows(&[(16, e(1.0)), (32, e(0.25)), (64, e(1.0 / 16.0))]);
        assert!(rows[0].orders.is_none());
        assert_eq!(rows.iter().filter(|r| r.orders.is_some()).count(), 2);
        assert_eq!(rows[2].orders.unwrap()[0], 2.0);
        assert!(check_doubling(&[8, 16, 32]).is_ok());
        assert!(check_doubling(&[8, 16, 24]).is_err());
    }
}
