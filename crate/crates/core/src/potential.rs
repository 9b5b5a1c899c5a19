//! The 4-parameter potential `v(z,u|nu) = sum_a nu_a varphi_a(2z, u+omega_a)`,
//! its dual coupling transform and its u-derivative.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::special::{eisenstein, kronecker_f, varphi, varphi_prefactor};
use crate::torus::Torus;

type C64 = Complex64;

/// The constants nu_0..nu_3 entering v.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub nu: [C64; 4],
}

impl CouplingSet {
    pub fn new(nu: [C64; 4]) -> Self {
        CouplingSet { nu }
    }

    /// The dual set nu_breve = (1/2) H nu with the 4x4 sign matrix
    /// H = [[1,1,1,1],[1,1,-1,-1],[1,-1,1,-1],[1,-1,-1,1]]; an involution.
    pub fn dual(&self) -> CouplingSet {
        const H: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, row) in H.iter().enumerate() {
            for (j, h) in row.iter().enumerate() {
                out[i] += 0.5 * h * self.nu[j];
            }
        }
        CouplingSet { nu: out }
    }
}

/// Same operation as `CouplingSet::dual`, as a free function.
pub fn dual_transform(nu: &CouplingSet) -> CouplingSet {
    nu.dual()
}

/// `v(z, u | nu) = sum_a nu_a e^{4 pi i z d_tau(omega_a)} phi(2z, u + omega_a)`.
pub fn v(z: C64, u: C64, nu: &CouplingSet, torus: &Torus) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..4 {
        acc += nu.nu[a] * varphi(a, 2.0 * z, u + torus.omega(a), torus)?;
    }
    Ok(acc)
}

/// `v'(z, u) = d/du v = sum_a nu_a e^{4 pi i z d_tau(omega_a)} f(2z, u + omega_a)`.
pub fn v_prime(z: C64, u: C64, nu: &CouplingSet, torus: &Torus) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..4 {
        let pref = varphi_prefactor(a, 2.0 * z, torus);
        acc += nu.nu[a] * pref * kronecker_f(2.0 * z, u + torus.omega(a), torus)?;
    }
    Ok(acc)
}

/// The analytic limit `v'(0, u) = -sum_a nu_a E2(u + omega_a)`.
pub fn v_prime_at_zero(u: C64, nu: &CouplingSet, torus: &Torus) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..4 {
        acc -= nu.nu[a] * eisenstein(2, u + torus.omega(a), torus)?;
    }
    Ok(acc)
}
