//! Conserved and primitive state vectors.
//!
//! Both carry a two-component velocity/momentum. One-dimensional runs keep the
//! second component at zero, which the flux never changes in the x direction.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Coordinate direction of a flux or a face normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }

    pub fn from_index(axis: usize) -> Direction {
        match axis {
            0 => Direction::X,
            1 => Direction::Y,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

/// Laboratory-frame conserved variables `(D, m, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub d: f64,
    pub m: [f64; 2],
    pub e: f64,
}

/// Flux vectors share the conserved layout component for component.
pub type FluxVector = Conserved;

impl Conserved {
    pub const ZERO: Conserved = Conserved {
        d: 0.0,
        m: [0.0, 0.0],
        e: 0.0,
    };

    pub fn new(d: f64, m: [f64; 2], e: f64) -> Self {
        Conserved { d, m, e }
    }

    /// 1-D state with zero transverse momentum.
    pub fn new_1d(d: f64, m: f64, e: f64) -> Self {
        Conserved { d, m: [m, 0.0], e }
    }

    pub fn momentum_sq(&self) -> f64 {
        self.m[0] * self.m[0] + self.m[1] * self.m[1]
    }

    pub fn is_finite(&self) -> bool {
        self.d.is_finite() && self.m[0].is_finite() && self.m[1].is_finite() && self.e.is_finite()
    }

    /// Mirror across a plane normal to `dir`: the normal momentum flips sign.
    pub fn reflect(&self, dir: Direction) -> Self {
        let mut out = *self;
        out.m[dir.index()] = -out.m[dir.index()];
        out
    }

    /// How a normal flux transforms under [`Conserved::reflect`]: every component
    /// except the normal momentum flux changes sign.
    pub fn reflect_flux(&self, dir: Direction) -> Self {
        let a = dir.index();
        let mut out = -*self;
        out.m[a] = self.m[a];
        out
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.d, self.m[0], self.m[1], self.e]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Conserved {
            d: a[0],
            m: [a[1], a[2]],
            e: a[3],
        }
    }

    /// `self + s * other`, written out so callers can build combinations in a fixed order.
    #[inline]
    pub fn add_scaled(&self, s: f64, other: &Conserved) -> Conserved {
        Conserved {
            d: self.d + s * other.d,
            m: [self.m[0] + s * other.m[0], self.m[1] + s * other.m[1]],
            e: self.e + s * other.e,
        }
    }
}

impl Add for Conserved {
    type Output = Conserved;
    #[inline]
    fn add(self, o: Conserved) -> Conserved {
        Conserved {
            d: self.d + o.d,
            m: [self.m[0] + o.m[0], self.m[1] + o.m[1]],
            e: self.e + o.e,
        }
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    #[inline]
    fn sub(self, o: Conserved) -> Conserved {
        Conserved {
            d: self.d - o.d,
            m: [self.m[0] - o.m[0], self.m[1] - o.m[1]],
            e: self.e - o.e,
        }
    }
}

impl Mul<f64> for Conserved {
    type Output = Conserved;
    #[inline]
    fn mul(self, s: f64) -> Conserved {
        Conserved {
            d: self.d * s,
            m: [self.m[0] * s, self.m[1] * s],
            e: self.e * s,
        }
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    #[inline]
    fn mul(self, u: Conserved) -> Conserved {
        u * self
    }
}

impl Neg for Conserved {
    type Output = Conserved;
    #[inline]
    fn neg(self) -> Conserved {
        Conserved {
            d: -self.d,
            m: [-self.m[0], -self.m[1]],
            e: -self.e,
        }
    }
}

impl AddAssign for Conserved {
    #[inline]
    fn add_assign(&mut self, o: Conserved) {
        *self = *self + o;
    }
}

impl SubAssign for Conserved {
    #[inline]
    fn sub_assign(&mut self, o: Conserved) {
        *self = *self - o;
    }
}

/// Rest-frame primitive variables `(ρ, v, p)` with `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Primitive {
    pub rho: f64,
    pub v: [f64; 2],
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, v: [f64; 2], p: f64) -> Self {
        Primitive { rho, v, p }
    }

    pub fn new_1d(rho: f64, v: f64, p: f64) -> Self {
        Primitive {
            rho,
            v: [v, 0.0],
            p,
        }
    }

    pub fn speed_sq(&self) -> f64 {
        self.v[0] * self.v[0] + self.v[1] * self.v[1]
    }

    pub fn lorentz_factor(&self) -> f64 {
        1.0 / (1.0 - self.speed_sq()).sqrt()
    }

    /// Checks ρ > 0, p > 0 and |v| < 1.
    pub fn is_physical(&self) -> bool {
        self.rho > 0.0
            && self.p > 0.0
            && self.speed_sq() < 1.0
            && self.rho.is_finite()
            && self.p.is_finite()
    }

    pub fn reflect(&self, dir: Direction) -> Self {
        let mut out = *self;
        out.v[dir.index()] = -out.v[dir.index()];
        out
    }
}
