//! The torus C/(Z + tau Z): modular data, half-periods, lattice reduction and
//! the cached constants every other module leans on.

use num_complex::Complex64;

use crate::error::{EllaxError, Result};
use crate::theta;

/// Pole tolerance delta, measured after lattice reduction.
pub const POLE_TOL: f64 = 1e-6;
/// Smallest admissible Im tau; below this the 64-term theta tails are not
/// guaranteed to reach the truncation tolerance.
pub const MIN_IM_TAU: f64 = 0.05;

/// Modular parameter, half-periods and derived constants.
///
/// Half-periods follow the numbering
/// `omega = (0, 1/2, (1+tau)/2, tau/2)`, so `omega[2] = omega[1] + omega[3]`,
/// and `d(omega_a)/d(tau) = (0, 0, 1/2, 1/2)`.
#[derive(Debug, Clone)]
pub struct Torus {
    tau: Complex64,
    nome: Complex64,
    omega: [Complex64; 4],
    dtau_omega: [f64; 4],
    /// theta1'(0)
    theta1_d1: Complex64,
    /// theta1'''(0)
    theta1_d3: Complex64,
    /// theta1'''(0) / (3 theta1'(0)); wp(z) = E2(z) + this shift.
    e2_shift: Complex64,
    /// wp(omega_k) for k = 1, 2, 3.
    wp_half: [Complex64; 3],
    /// Theta constants c_1 = -(th2(0)/th1'(0))^2, c_2 = -i (th3(0)/th1'(0))^2,
    /// c_3 = -(th4(0)/th1'(0))^2.
    theta_consts: [Complex64; 3],
}

impl Torus {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im >= MIN_IM_TAU) {
            return Err(EllaxError::InvalidTorus { im_tau: tau.im });
        }
        let nome = (Complex64::i() * std::f64::consts::PI * tau).exp();
        let half = Complex64::new(0.5, 0.0);
        let omega = [Complex64::new(0.0, 0.0), half, (1.0 + tau) * 0.5, tau * 0.5];
        let mut torus = Torus {
            tau,
            nome,
            omega,
            dtau_omega: [0.0, 0.0, 0.5, 0.5],
            theta1_d1: Complex64::new(0.0, 0.0),
            theta1_d3: Complex64::new(0.0, 0.0),
            e2_shift: Complex64::new(0.0, 0.0),
            wp_half: [Complex64::new(0.0, 0.0); 3],
            theta_consts: [Complex64::new(0.0, 0.0); 3],
        };
        let zero = Complex64::new(0.0, 0.0);
        let d = theta::theta_derivs_raw(1, zero, tau, nome, 3)?;
        torus.theta1_d1 = d[1];
        torus.theta1_d3 = d[3];
        torus.e2_shift = d[3] / (3.0 * d[1]);
        for k in 1..=3 {
            // E2 at a half-period, shifted to wp.
            let dk = theta::theta_derivs_raw(1, torus.omega[k], tau, nome, 2)?;
            let r1 = dk[1] / dk[0];
            let r2 = dk[2] / dk[0];
            torus.wp_half[k - 1] = r1 * r1 - r2 + torus.e2_shift;
        }
        for k in 1..=3 {
            let t0 = theta::theta_derivs_raw((k + 1) as u8, zero, tau, nome, 0)?[0];
            let ratio = t0 / torus.theta1_d1;
            let sq = ratio * ratio;
            torus.theta_consts[k - 1] = match k {
                1 | 3 => -sq,
                2 => -Complex64::i() * sq,
                _ => unreachable!(),
            };
        }
        Ok(torus)
    }

    /// The torus with doubled modulus 2*tau (used by the 2tau theta family).
    pub fn doubled(&self) -> Result<Self> {
        Torus::new(2.0 * self.tau)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        self.nome
    }

    pub fn omega(&self, a: usize) -> Complex64 {
        self.omega[a]
    }

    pub fn omegas(&self) -> &[Complex64; 4] {
        &self.omega
    }

    /// d(omega_a)/d(tau): (0, 0, 1/2, 1/2).
    pub fn dtau_omega(&self, a: usize) -> f64 {
        self.dtau_omega[a]
    }

    pub fn theta1_d1_zero(&self) -> Complex64 {
        self.theta1_d1
    }

    pub fn theta1_d3_zero(&self) -> Complex64 {
        self.theta1_d3
    }

    /// The constant theta1'''(0)/(3 theta1'(0)): wp(z) = E2(z) + it.
    pub fn e2_shift(&self) -> Complex64 {
        self.e2_shift
    }

    /// wp(omega_k), k in 1..=3.
    pub fn wp_half_period(&self, k: usize) -> Complex64 {
        self.wp_half[k - 1]
    }

    /// Theta constant c_k, k in 1..=3.
    pub fn theta_const(&self, k: usize) -> Complex64 {
        self.theta_consts[k - 1]
    }

    /// Writes z = z0 + m + n*tau with m, n the nearest integers in lattice
    /// coordinates; returns (z0, m, n).
    pub fn lattice_reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let beta = z.im / self.tau.im;
        let n = beta.round() as i64;
        let alpha = z.re - (n as f64) * self.tau.re;
        let m = alpha.round() as i64;
        let z0 = z - Complex64::new(m as f64, 0.0) - (n as f64) * self.tau;
        (z0, m, n)
    }

    /// Distance from z to the period lattice, in lattice-reduced coordinates.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        self.lattice_reduce(z).0.norm()
    }

    /// Errors with NearPole when z is within `tol` of the lattice.
    pub fn require_distant(&self, z: Complex64, tol: f64) -> Result<()> {
        let dist = self.lattice_distance(z);
        if dist < tol {
            Err(EllaxError::NearPole { arg: z, dist })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_low_im_tau() {
        assert!(Torus::new(c(0.3, 0.04)).is_err());
        assert!(Torus::new(c(0.3, -1.0)).is_err());
        assert!(Torus::new(c(0.3, 0.05)).is_ok());
    }

    #[test]
    fn half_periods() {
        let t = Torus::new(c(0.13, 1.0)).unwrap();
        assert_eq!(t.omega(0), c(0.0, 0.0));
        assert_eq!(t.omega(1), c(0.5, 0.0));
        let diff = t.omega(2) - t.omega(1) - t.omega(3);
        assert!(diff.norm() < 1e-16);
        assert_eq!(t.dtau_omega(0), 0.0);
        assert_eq!(t.dtau_omega(2), 0.5);
    }

    #[test]
    fn lattice_reduction() {
        let t = Torus::new(c(0.13, 1.0)).unwrap();
        let z = c(0.21, 0.17) + c(3.0, 0.0) + 2.0 * t.tau();
        let (z0, m, n) = t.lattice_reduce(z);
        assert_eq!((m, n), (3, 2));
        assert!((z0 - c(0.21, 0.17)).norm() < 1e-14);
        assert!(t.lattice_distance(c(2.0, 0.0) + t.tau()) < 1e-14);
        assert!(t.require_distant(t.tau() * 3.0, POLE_TOL).is_err());
        assert!(t.require_distant(c(0.21, 0.17), POLE_TOL).is_ok());
    }

    #[test]
    fn wp_half_periods_sum_to_zero() {
        let t = Torus::new(c(0.13, 1.0)).unwrap();
        let s = t.wp_half_period(1) + t.wp_half_period(2) + t.wp_half_period(3);
        assert!(s.norm() < 1e-12, "sum = {s}");
    }
}
