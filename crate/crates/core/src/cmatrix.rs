//! Complex 2x2 and 4x4 matrices: the containers for every Lax, M, K and
//! gauge object, plus Pauli matrices with the sigma_{4-alpha} index flip.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{EllaxError, Result};

pub type C64 = Complex64;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Relative singularity threshold for 2x2 inversion: |det| < 1e-10 * norm^2.
pub const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    /// Row-major entries [[a11, a12], [a21, a22]].
    pub e: [[C64; 2]; 2],
}

impl Matrix2 {
    pub fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Matrix2 { e: [[a11, a12], [a21, a22]] }
    }

    pub fn zero() -> Self {
        let z = c64(0.0, 0.0);
        Matrix2::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = c64(0.0, 0.0);
        let o = c64(1.0, 0.0);
        Matrix2::new(o, z, z, o)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        let z = c64(0.0, 0.0);
        Matrix2::new(a, z, z, d)
    }

    pub fn trace(&self) -> C64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> C64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Max-magnitude entry.
    pub fn max_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.norm()))
    }

    /// Adjugate-over-determinant inverse; Singular when |det| < tol * norm^2.
    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        let scale = self.max_norm();
        if det.norm() < SINGULAR_TOL * scale * scale {
            return Err(EllaxError::Singular { det_abs: det.norm() });
        }
        Ok(Matrix2::new(
            self.e[1][1] / det,
            -self.e[0][1] / det,
            -self.e[1][0] / det,
            self.e[0][0] / det,
        ))
    }

    pub fn scale(&self, s: C64) -> Matrix2 {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn commutator(&self, other: &Matrix2) -> Matrix2 {
        *self * *other - *other * *self
    }

    pub fn kron(&self, other: &Matrix2) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.e[2 * i + k][2 * j + l] = self.e[i][j] * other.e[k][l];
                    }
                }
            }
        }
        out
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        out
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Pauli matrix sigma_k, k = 0..=3 (sigma_0 = identity).
pub fn pauli(k: usize) -> Matrix2 {
    let z = c64(0.0, 0.0);
    let o = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    match k {
        0 => Matrix2::identity(),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli index out of range"),
    }
}

/// The index flip sigma_{4-alpha} used throughout: alpha = 1 -> sigma_3,
/// alpha = 2 -> sigma_2, alpha = 3 -> sigma_1. Every module goes through
/// this single function.
pub fn sigma_flipped(alpha: usize) -> Matrix2 {
    debug_assert!((1..=3).contains(&alpha));
    pauli(4 - alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix4 {
    pub e: [[C64; 4]; 4],
}

impl Matrix4 {
    pub fn zero() -> Self {
        Matrix4 { e: [[c64(0.0, 0.0); 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            out.e[i][i] = c64(1.0, 0.0);
        }
        out
    }

    pub fn max_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.norm()))
    }

    pub fn scale(&self, s: C64) -> Matrix4 {
        let mut out = self.clone();
        for row in out.e.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn commutator(&self, other: &Matrix4) -> Matrix4 {
        self.clone() * other.clone() - other.clone() * self.clone()
    }

    /// Swap of the two tensor factors: entry ((i,k),(j,l)) -> ((k,i),(l,j)).
    pub fn swap_factors(&self) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.e[2 * k + i][2 * l + j] = self.e[2 * i + k][2 * j + l];
                    }
                }
            }
        }
        out
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;
    fn sub(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = c64(0.0, 0.0);
                for k in 0..4 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                out.e[i][j] = acc;
            }
        }
        out
    }
}
