//! Nodal basis on the reference element [0, 1] and the uniform Cartesian mesh.
//!
//! Solution points are the Gauss–Legendre nodes. Sums such as derivatives and
//! face values are written as offsets from one nodal value, e.g.
//! `Σ_j D_ij (f_j − f_i)`, so constant data is reproduced bitwise.

use crate::error::{Error, Result};
use crate::state::Conserved;

/// Flux-reconstruction correction function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectionKind {
    /// Radau polynomials; LWFR with these is equivalent to a DG scheme.
    #[default]
    Radau,
    /// The g₂ family, a convex combination of two Radau polynomials.
    G2,
}

impl CorrectionKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "radau" => Ok(CorrectionKind::Radau),
            "g2" => Ok(CorrectionKind::G2),
            other => Err(Error::Config(format!("unknown correction function '{other}'"))),
        }
    }
}

/// Legendre polynomial P_n(s) and its derivative on [−1, 1].
pub fn legendre(n: usize, s: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, s);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * s * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Gauss–Legendre nodes and weights mapped to [0, 1], nodes increasing.
pub fn gauss_legendre(n_points: usize) -> (Vec<f64>, Vec<f64>) {
    match n_points {
        1 => (vec![0.5], vec![1.0]),
        2 => {
            let a = 3.0_f64.sqrt() / 6.0;
            (vec![0.5 - a, 0.5 + a], vec![0.5, 0.5])
        }
        3 => {
            let a = 0.15_f64.sqrt();
            (vec![0.5 - a, 0.5, 0.5 + a], vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
        }
        n => {
            let mut nodes = vec![0.0; n];
            let mut weights = vec![0.0; n];
            for i in 0..n {
                // Roots of P_n ordered from −1 to 1.
                let mut s = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                for _ in 0..100 {
                    let (p, dp) = legendre(n, s);
                    let ds = p / dp;
                    s -= ds;
                    if ds.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, dp) = legendre(n, s);
                nodes[i] = 0.5 * (s + 1.0);
                weights[i] = 1.0 / ((1.0 - s * s) * dp * dp);
            }
            (nodes, weights)
        }
    }
}

/// Right Radau polynomial (−1)^k/2 (P_k − P_{k−1}) and its derivative; equals 1 at s = −1 and 0 at s = 1.
fn right_radau(k: usize, s: f64) -> (f64, f64) {
    let (pk, dk) = legendre(k, s);
    let (pm, dm) = legendre(k - 1, s);
    let sign = if k % 2 == 0 { 0.5 } else { -0.5 };
    (sign * (pk - pm), sign * (dk - dm))
}

/// Left-face correction g_L(s) on [−1, 1] with g_L(−1) = 1, g_L(1) = 0, and its derivative.
fn left_correction(kind: CorrectionKind, n: usize, s: f64) -> (f64, f64) {
    match kind {
        CorrectionKind::Radau => right_radau(n + 1, s),
        CorrectionKind::G2 => {
            let nf = n as f64;
            let a = nf / (2.0 * nf + 1.0);
            let b = (nf + 1.0) / (2.0 * nf + 1.0);
            let (g1, d1) = right_radau(n + 1, s);
            let (g0, d0) = right_radau(n, s);
            (a * g1 + b * g0, a * d1 + b * d0)
        }
    }
}

/// Everything the schemes need about the degree-N nodal basis.
#[derive(Debug, Clone)]
pub struct BasisData {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major (N+1)², `diff[i * (N+1) + j] = ℓ′_j(ξ_i)`.
    pub diff: Vec<f64>,
    pub extrap_left: Vec<f64>,
    pub extrap_right: Vec<f64>,
    pub corr_deriv_left: Vec<f64>,
    pub corr_deriv_right: Vec<f64>,
    /// Row-major (N+1)², `modal[k * (N+1) + i] = w_i φ_k(ξ_i)` with φ_k the orthonormal Legendre basis on [0, 1].
    pub modal: Vec<f64>,
    /// Subcell face positions 0 = x_{1/2} < … < x_{N+3/2} = 1 (widths w_i).
    pub subfaces: Vec<f64>,
    pub correction: CorrectionKind,
}

/// Builds the basis with Radau correction functions.
pub fn build_basis(degree: usize) -> Result<BasisData> {
    build_basis_with(degree, CorrectionKind::Radau)
}

pub fn build_basis_with(degree: usize, correction: CorrectionKind) -> Result<BasisData> {
    if !(1..=4).contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    let n = degree + 1;
    let (nodes, weights) = gauss_legendre(n);

    // Barycentric weights give both the differentiation matrix and face values.
    let bary: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product::<f64>()
        })
        .collect();
    let mut diff = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let dij = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                diff[i * n + j] = dij;
                row_sum += dij;
            }
        }
        diff[i * n + i] = -row_sum;
    }
    let lagrange_at = |x: f64| -> Vec<f64> {
        (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&k| k != j)
                    .map(|k| (x - nodes[k]) / (nodes[j] - nodes[k]))
                    .product::<f64>()
            })
            .collect()
    };
    let extrap_left = lagrange_at(0.0);
    let extrap_right = lagrange_at(1.0);

    let (gl_minus, _) = left_correction(correction, degree, -1.0);
    let (gl_plus, _) = left_correction(correction, degree, 1.0);
    if (gl_minus - 1.0).abs() > 1e-14 || gl_plus.abs() > 1e-14 {
        return Err(Error::Domain(format!(
            "correction function boundary values wrong: g(-1) = {gl_minus}, g(1) = {gl_plus}"
        )));
    }
    // h_L(ξ) = g_L(2ξ − 1) and h_R(ξ) = g_L(1 − 2ξ).
    let corr_deriv_left = nodes
        .iter()
        .map(|&x| 2.0 * left_correction(correction, degree, 2.0 * x - 1.0).1)
        .collect();
    let corr_deriv_right = nodes
        .iter()
        .map(|&x| -2.0 * left_correction(correction, degree, 1.0 - 2.0 * x).1)
        .collect();

    let mut modal = vec![0.0; n * n];
    for k in 0..n {
        let norm = (2.0 * k as f64 + 1.0).sqrt();
        for i in 0..n {
            modal[k * n + i] = weights[i] * norm * legendre(k, 2.0 * nodes[i] - 1.0).0;
        }
    }

    let mut subfaces = Vec::with_capacity(n + 1);
    subfaces.push(0.0);
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        subfaces.push(if i + 1 == n { 1.0 } else { acc });
    }

    Ok(BasisData {
        degree,
        nodes,
        weights,
        diff,
        extrap_left,
        extrap_right,
        corr_deriv_left,
        corr_deriv_right,
        modal,
        subfaces,
        correction,
    })
}

impl BasisData {
    pub fn n_nodes(&self) -> usize {
        self.degree + 1
    }

    /// Derivative in ξ of the interpolant of `values` at every node.
    pub fn nodal_derivative(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n_nodes();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    if j != i {
                        acc += self.diff[i * n + j] * (values[j] - values[i]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Interpolant of `values` at ξ = 0 and ξ = 1.
    pub fn extrapolate_faces(&self, values: &[f64]) -> (f64, f64) {
        let v0 = values[0];
        let mut left = v0;
        let mut right = v0;
        for j in 1..self.n_nodes() {
            left += self.extrap_left[j] * (values[j] - v0);
            right += self.extrap_right[j] * (values[j] - v0);
        }
        (left, right)
    }

    /// ξ-derivative at node `i` of strided conserved data `get(j)`, j = 0..=N.
    #[inline]
    pub fn derivative_at<F: Fn(usize) -> Conserved>(&self, i: usize, get: F) -> Conserved {
        let n = self.n_nodes();
        let fi = get(i);
        let mut acc = Conserved::ZERO;
        for j in 0..n {
            if j != i {
                acc = acc.add_scaled(self.diff[i * n + j], &(get(j) - fi));
            }
        }
        acc
    }

    /// Face values (ξ = 0, ξ = 1) of strided conserved data.
    #[inline]
    pub fn faces_of<F: Fn(usize) -> Conserved>(&self, get: F) -> (Conserved, Conserved) {
        let v0 = get(0);
        let mut left = v0;
        let mut right = v0;
        for j in 1..self.n_nodes() {
            let dv = get(j) - v0;
            left = left.add_scaled(self.extrap_left[j], &dv);
            right = right.add_scaled(self.extrap_right[j], &dv);
        }
        (left, right)
    }

    /// Quadrature mean Σ w_j v_j of strided conserved data.
    #[inline]
    pub fn mean_of<F: Fn(usize) -> Conserved>(&self, get: F) -> Conserved {
        let v0 = get(0);
        let mut acc = v0;
        for j in 1..self.n_nodes() {
            acc = acc.add_scaled(self.weights[j], &(get(j) - v0));
        }
        acc
    }

    /// Quadrature of a scalar function on [0, 1].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Uniform Cartesian mesh in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dim: usize,
    pub low: [f64; 2],
    pub high: [f64; 2],
    pub cells: [usize; 2],
    pub spacing: [f64; 2],
}

impl Mesh {
    pub fn new_1d(low: f64, high: f64, cells: usize) -> Result<Self> {
        Mesh::new(1, [low, 0.0], [high, 1.0], [cells, 1])
    }

    pub fn new_2d(low: [f64; 2], high: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Mesh::new(2, low, high, cells)
    }

    fn new(dim: usize, low: [f64; 2], high: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        let mut spacing = [1.0; 2];
        for a in 0..dim {
            if cells[a] == 0 || !(high[a] > low[a]) {
                return Err(Error::Config(format!(
                    "invalid mesh axis {a}: [{}, {}] with {} cells",
                    low[a], high[a], cells[a]
                )));
            }
            spacing[a] = (high[a] - low[a]) / cells[a] as f64;
        }
        Ok(Mesh {
            dim,
            low,
            high,
            cells,
            spacing,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Physical coordinate of reference position ξ in element `e` along axis `a`.
    pub fn coord(&self, axis: usize, e: usize, xi: f64) -> f64 {
        self.low[axis] + (e as f64 + xi) * self.spacing[axis]
    }
}
