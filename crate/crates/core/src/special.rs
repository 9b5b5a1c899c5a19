//! The elliptic function toolkit built on theta: the Kronecker function
//! phi(z,u) and its u-derivative f(z,u), the Eisenstein functions E1 and E2,
//! the Weierstrass function, the varphi_k family and the theta constants.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Result;
use crate::theta::{theta, theta_derivs};
use crate::torus::{Torus, POLE_TOL};

type C64 = Complex64;

/// The elliptic Kronecker function
/// `phi(z,u) = theta1'(0) theta1(z+u) / (theta1(z) theta1(u))`.
///
/// Symmetric in its arguments; simple pole with residue 1 along z = 0.
pub fn kronecker_phi(z: C64, u: C64, torus: &Torus) -> Result<C64> {
    torus.require_distant(z, POLE_TOL)?;
    torus.require_distant(u, POLE_TOL)?;
    torus.require_distant(z + u, POLE_TOL)?;
    let num = torus.theta1_d1_zero() * theta(1, z + u, torus)?;
    Ok(num / (theta(1, z, torus)? * theta(1, u, torus)?))
}

/// `f(z,u) = d/du phi(z,u) = phi(z,u) (E1(z+u) - E1(u))`.
pub fn kronecker_f(z: C64, u: C64, torus: &Torus) -> Result<C64> {
    let phi = kronecker_phi(z, u, torus)?;
    Ok(phi * (eisenstein(1, z + u, torus)? - eisenstein(1, u, torus)?))
}

/// First or second Eisenstein function: `E1 = theta1'(z)/theta1(z)`,
/// `E2 = -d/dz E1`.
pub fn eisenstein(order: u8, z: C64, torus: &Torus) -> Result<C64> {
    torus.require_distant(z, POLE_TOL)?;
    match order {
        1 => {
            let d = theta_derivs(1, z, torus, 1)?;
            Ok(d[1] / d[0])
        }
        2 => {
            let d = theta_derivs(1, z, torus, 2)?;
            let r1 = d[1] / d[0];
            let r2 = d[2] / d[0];
            Ok(r1 * r1 - r2)
        }
        _ => panic!("Eisenstein order must be 1 or 2"),
    }
}

/// `wp(z) = E2(z) + theta1'''(0)/(3 theta1'(0))`, or its z-derivative.
pub fn weierstrass_p(z: C64, torus: &Torus, derivative: bool) -> Result<C64> {
    torus.require_distant(z, POLE_TOL)?;
    let d = theta_derivs(1, z, torus, 3)?;
    let r1 = d[1] / d[0];
    let r2 = d[2] / d[0];
    let r3 = d[3] / d[0];
    if derivative {
        // wp' = -E1'' = -(r3 - 3 r1 r2 + 2 r1^3)
        Ok(-(r3 - 3.0 * r1 * r2 + 2.0 * r1 * r1 * r1))
    } else {
        Ok(r1 * r1 - r2 + torus.e2_shift())
    }
}

/// The exponential prefactor `exp(2 pi i z d(omega_a)/d(tau))` of the
/// varphi family: (1, 1, e^{i pi z}, e^{i pi z}).
pub fn varphi_prefactor(a: usize, z: C64, torus: &Torus) -> C64 {
    let d = torus.dtau_omega(a);
    if d == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        (C64::new(0.0, 2.0 * PI * d) * z).exp()
    }
}

/// Two-argument family `varphi_a(z, w) = e^{2 pi i z d_tau omega_a} phi(z, w)`;
/// the caller passes the full second argument w (written x + omega_a in the
/// shift identities).
pub fn varphi(a: usize, z: C64, w: C64, torus: &Torus) -> Result<C64> {
    debug_assert!(a <= 3);
    Ok(varphi_prefactor(a, z, torus) * kronecker_phi(z, w, torus)?)
}

/// Analytic z-derivative of the two-argument family. Uses
/// `d/dz phi(z,w) = f(w,z)` from the symmetry of phi.
pub fn varphi_dz(a: usize, z: C64, w: C64, torus: &Torus) -> Result<C64> {
    let pref = varphi_prefactor(a, z, torus);
    let phi = kronecker_phi(z, w, torus)?;
    let dphi = kronecker_f(w, z, torus)?;
    let mu = C64::new(0.0, 2.0 * PI * torus.dtau_omega(a));
    Ok(pref * (mu * phi + dphi))
}

/// Single-argument family `varphi_alpha(z) = varphi_alpha(z, omega_alpha)`,
/// alpha = 1, 2, 3.
pub fn varphi1(alpha: usize, z: C64, torus: &Torus) -> Result<C64> {
    debug_assert!((1..=3).contains(&alpha));
    varphi(alpha, z, torus.omega(alpha), torus)
}

/// Analytic z-derivative of the single-argument family; equals
/// `-varphi_beta(z) varphi_gamma(z)`.
pub fn varphi1_dz(alpha: usize, z: C64, torus: &Torus) -> Result<C64> {
    varphi_dz(alpha, z, torus.omega(alpha), torus)
}

/// The theta constants (c1, c2, c3).
pub fn theta_constants(torus: &Torus) -> (C64, C64, C64) {
    (torus.theta_const(1), torus.theta_const(2), torus.theta_const(3))
}

/// wp''(omega_alpha) = 2 (wp_alpha - wp_beta)(wp_alpha - wp_gamma), from the
/// curve equation; avoids fourth theta derivatives.
pub fn wp_second_half_period(alpha: usize, torus: &Torus) -> C64 {
    let (beta, gamma) = complement(alpha);
    let pa = torus.wp_half_period(alpha);
    2.0 * (pa - torus.wp_half_period(beta)) * (pa - torus.wp_half_period(gamma))
}

/// The pair {1,2,3} \ {alpha}, in increasing order.
pub fn complement(alpha: usize) -> (usize, usize) {
    match alpha {
        1 => (2, 3),
        2 => (1, 3),
        3 => (1, 2),
        _ => panic!("index must be 1..=3"),
    }
}

/// Levi-Civita symbol on {1,2,3}.
pub fn epsilon(a: usize, b: usize, g: usize) -> f64 {
    match (a, b, g) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (2, 1, 3) | (1, 3, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> Torus {
        Torus::new(C64::new(0.13, 1.0)).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / 1.0f64.max(a.norm()).max(b.norm())
    }

    #[test]
    fn phi_symmetry_and_parity() {
        let t = torus();
        let z = c(0.23, 0.11);
        let u = c(-0.17, 0.29);
        let a = kronecker_phi(z, u, &t).unwrap();
        assert!(rel(a, kronecker_phi(u, z, &t).unwrap()) < 1e-13);
        assert!(rel(-a, kronecker_phi(-z, -u, &t).unwrap()) < 1e-13);
    }

    #[test]
    fn phi_near_pole_rejected() {
        let t = torus();
        assert!(kronecker_phi(c(1e-9, 0.0), c(0.3, 0.1), &t).is_err());
        // z + u on the lattice is also rejected
        assert!(kronecker_phi(c(0.3, 0.1), c(0.7, -0.1), &t).is_err());
    }

    #[test]
    fn phi_residue_at_zero() {
        // z * phi(z,u) -> 1 as z -> 0: evaluate at 1e-3 and 1e-4 and
        // Richardson-extrapolate the O(z) error away.
        let t = torus();
        let u = c(0.31, -0.22);
        let p3 = c(1e-3, 0.0) * kronecker_phi(c(1e-3, 0.0), u, &t).unwrap();
        let p4 = c(1e-4, 0.0) * kronecker_phi(c(1e-4, 0.0), u, &t).unwrap();
        let extrap = (10.0 * p4 - p3) / 9.0;
        assert!((extrap - c(1.0, 0.0)).norm() < 1e-6, "{extrap}");
    }

    #[test]
    fn f_parity_and_small_z_limit() {
        let t = torus();
        let z = c(0.23, 0.11);
        let u = c(-0.17, 0.29);
        let a = kronecker_f(z, u, &t).unwrap();
        assert!(rel(a, kronecker_f(-z, -u, &t).unwrap()) < 1e-13);
        // f(0+, u) -> -E2(u): two-point extrapolation removes the O(z) term
        let f1 = kronecker_f(c(1e-4, 0.0), u, &t).unwrap();
        let f2 = kronecker_f(c(5e-5, 0.0), u, &t).unwrap();
        let limit = 2.0 * f2 - f1;
        let e2 = eisenstein(2, u, &t).unwrap();
        assert!((limit + e2).norm() < 1e-6, "{limit} vs {e2}");
    }

    #[test]
    fn eisenstein_parity_and_periods() {
        let t = torus();
        let z = c(0.23, 0.11);
        let e1 = eisenstein(1, z, &t).unwrap();
        assert!(rel(-e1, eisenstein(1, -z, &t).unwrap()) < 1e-13);
        let e2 = eisenstein(2, z, &t).unwrap();
        assert!(rel(e2, eisenstein(2, -z, &t).unwrap()) < 1e-13);
        // E1(z + 2 omega_a) = E1(z) - 4 pi i d_tau(omega_a)
        for a in 1..=3 {
            let shifted = eisenstein(1, z + 2.0 * t.omega(a), &t).unwrap();
            let want = e1 - c(0.0, 4.0 * PI * t.dtau_omega(a));
            assert!(rel(shifted, want) < 1e-12, "a={a}");
        }
        // E1(omega_a) = -2 pi i d_tau(omega_a)
        for a in 1..=3 {
            let got = eisenstein(1, t.omega(a), &t).unwrap();
            let want = -c(0.0, 2.0 * PI * t.dtau_omega(a));
            assert!((got - want).norm() < 1e-12, "a={a}: {got} vs {want}");
        }
    }

    #[test]
    fn weierstrass_identities() {
        let t = torus();
        let z = c(0.23, 0.11);
        let wp = weierstrass_p(z, &t, false).unwrap();
        let wp_d = weierstrass_p(z, &t, true).unwrap();
        // curve equation
        let rhs = 4.0
            * (wp - t.wp_half_period(1))
            * (wp - t.wp_half_period(2))
            * (wp - t.wp_half_period(3));
        assert!(rel(wp_d * wp_d, rhs) < 1e-10);
        // wp' = -2 phi1 phi2 phi3
        let prod = varphi1(1, z, &t).unwrap() * varphi1(2, z, &t).unwrap()
            * varphi1(3, z, &t).unwrap();
        assert!(rel(wp_d, -2.0 * prod) < 1e-12);
        // sum of half-period values vanishes
        let s = t.wp_half_period(1) + t.wp_half_period(2) + t.wp_half_period(3);
        assert!(s.norm() < 1e-12);
    }

    #[test]
    fn varphi_family() {
        let t = torus();
        let z = c(0.23, 0.11);
        let x = c(0.05, 0.21);
        for k in 0..=3 {
            // varphi_k(-z, x + omega_k) = -varphi_k(z, -x + omega_k)
            let a = varphi(k, -z, x + t.omega(k), &t).unwrap();
            let b = varphi(k, z, -x + t.omega(k), &t).unwrap();
            assert!(rel(a, -b) < 1e-12, "k={k}");
        }
        for alpha in 1..=3 {
            // varphi_alpha(z)^2 = wp(z) - wp_alpha
            let v = varphi1(alpha, z, &t).unwrap();
            let want = weierstrass_p(z, &t, false).unwrap() - t.wp_half_period(alpha);
            assert!(rel(v * v, want) < 1e-12, "alpha={alpha}");
            // analytic derivative equals -phi_beta phi_gamma
            let (beta, gamma) = complement(alpha);
            let d = varphi1_dz(alpha, z, &t).unwrap();
            let prod = varphi1(beta, z, &t).unwrap() * varphi1(gamma, z, &t).unwrap();
            assert!(rel(d, -prod) < 1e-12, "alpha={alpha}");
        }
    }

    #[test]
    fn varphi_dz_matches_finite_difference() {
        use crate::fd::{derivative, FdOptions};
        let t = torus();
        let z = c(0.23, 0.11);
        let w = c(0.42, -0.17);
        for a in 0..=3 {
            let fd = derivative(|x| varphi(a, x, w, &t), z, FdOptions::default()).unwrap();
            let an = varphi_dz(a, z, w, &t).unwrap();
            assert!(rel(fd, an) < 1e-8, "a={a}: {fd} vs {an}");
        }
    }

    #[test]
    fn theta_constant_identities() {
        let t = torus();
        let (c1, c2, c3) = theta_constants(&t);
        assert!((c1 * c1 + c2 * c2 + c3 * c3).norm() < 1e-12);
        let s = c1 * c1 * t.wp_half_period(1)
            + c2 * c2 * t.wp_half_period(2)
            + c3 * c3 * t.wp_half_period(3);
        assert!(s.norm() < 1e-12);
        // c_alpha c_beta = -i eps c_gamma / (wp_alpha - wp_beta)
        let cs = [c1, c2, c3];
        for (a, b, g) in [(1usize, 2usize, 3usize), (2, 3, 1), (3, 1, 2)] {
            let lhs = cs[a - 1] * cs[b - 1];
            let rhs = -C64::i() * cs[g - 1]
                / (t.wp_half_period(a) - t.wp_half_period(b));
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn theta_constants_cross_check_at_tau_i() {
        // c_k from theta ratios against the wp-difference expressions,
        // evaluated independently (squared to stay branch-free).
        let t = Torus::new(c(0.0, 1.0)).unwrap();
        let (c1, c2, c3) = theta_constants(&t);
        let p1 = t.wp_half_period(1);
        let p2 = t.wp_half_period(2);
        let p3 = t.wp_half_period(3);
        assert!(rel(c1 * c1, 1.0 / ((p1 - p2) * (p1 - p3))) < 1e-12);
        assert!(rel(c2 * c2, 1.0 / ((p2 - p1) * (p2 - p3))) < 1e-12);
        assert!(rel(c3 * c3, 1.0 / ((p3 - p1) * (p3 - p2))) < 1e-12);
        // and the varphi-product forms
        let f2 = varphi1(2, t.omega(1), &t).unwrap();
        let f3 = varphi1(3, t.omega(1), &t).unwrap();
        assert!(rel(c1, -1.0 / (f2 * f3)) < 1e-12);
    }
}
