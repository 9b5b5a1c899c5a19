//! 1-site classical XYZ chain with boundaries: Sklyanin generators in the
//! (p,q) representation, constant K-matrices, the transfer matrix and its
//! closed form, and the match to the 7-constant van Diejen Hamiltonian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{c64, pauli, sigma_flipped, Matrix2};
use crate::error::{EllaxError, Result};
use crate::potential::CouplingSet;
use crate::special::{varphi, varphi1, weierstrass_p};
use crate::torus::{Torus, POLE_TOL};
use crate::vandiejen::{FlowId, ModelParams, PhaseState};

type C64 = Complex64;

/// Boundary constants rho-tilde of the two K-matrices (the 1/phi form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub rho_plus: [C64; 3],
    pub rho_minus: [C64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorStyle {
    /// S_a with the d_a normalization.
    Standard,
    /// Plain half-sum generators; Standard = 2 d_a * Bold.
    Bold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSign {
    Plus,
    Minus,
}

/// The normalization constants d_a: d_0 = 1, d_alpha = -1/phi_alpha(eta - omega_alpha).
///
/// The reciprocal form is forced by the algebra: with it the standard
/// generators close the Sklyanin brackets and the transfer-matrix closed
/// form holds identically.
pub fn d_constants(eta: C64, torus: &Torus) -> Result<[C64; 4]> {
    let mut d = [c64(1.0, 0.0); 4];
    for alpha in 1..=3 {
        let f = varphi1(alpha, eta - torus.omega(alpha), torus)?;
        if f.norm() < POLE_TOL {
            return Err(EllaxError::ZeroDenominator);
        }
        d[alpha] = -1.0 / f;
    }
    Ok(d)
}

/// Sklyanin generator in the (p,q) representation:
/// bold: `(1/2)(varphi_a(2q, eta+omega_a) e^{p/2c} + varphi_a(-2q, eta+omega_a) e^{-p/2c})`;
/// standard: `2 d_a *` bold.
pub fn sklyanin_generator(
    style: GeneratorStyle,
    a: usize,
    state: &PhaseState,
    eta: C64,
    c: C64,
    torus: &Torus,
) -> Result<C64> {
    let ep = (state.p / (2.0 * c)).exp();
    let w = eta + torus.omega(a);
    let bold = 0.5
        * (varphi(a, 2.0 * state.q, w, torus)? * ep
            + varphi(a, -2.0 * state.q, w, torus)? / ep);
    match style {
        GeneratorStyle::Bold => Ok(bold),
        GeneratorStyle::Standard => {
            let d = d_constants(eta, torus)?;
            Ok(2.0 * d[a] * bold)
        }
    }
}

/// All four generators at once.
pub fn generators(
    style: GeneratorStyle,
    state: &PhaseState,
    eta: C64,
    c: C64,
    torus: &Torus,
) -> Result<[C64; 4]> {
    let mut out = [c64(0.0, 0.0); 4];
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = sklyanin_generator(style, a, state, eta, c, torus)?;
    }
    Ok(out)
}

/// XYZ Lax matrix `S_0 sigma_0 + sum_a S_a phi_a(z) sigma_{4-a}` with the
/// standard generators in the (p,q) representation.
pub fn lax_xyz(z: C64, state: &PhaseState, eta: C64, c: C64, torus: &Torus) -> Result<Matrix2> {
    let s = generators(GeneratorStyle::Standard, state, eta, c, torus)?;
    lax_from_generators(z, &s, torus)
}

/// Same matrix built from explicit generator values.
pub fn lax_from_generators(z: C64, s: &[C64; 4], torus: &Torus) -> Result<Matrix2> {
    let mut m = pauli(0).scale(s[0]);
    for alpha in 1..=3 {
        m = m + sigma_flipped(alpha).scale(s[alpha] * varphi1(alpha, z, torus)?);
    }
    Ok(m)
}

/// Constant K-matrix `sigma_0 + sum_a rho_a sigma_{4-a} / phi_a(z)`.
pub fn k_matrix(sign: KSign, z: C64, boundary: &BoundaryParams, torus: &Torus) -> Result<Matrix2> {
    let rho = match sign {
        KSign::Plus => &boundary.rho_plus,
        KSign::Minus => &boundary.rho_minus,
    };
    let mut m = pauli(0);
    for alpha in 1..=3 {
        let f = varphi1(alpha, z, torus)?;
        if f.norm() < POLE_TOL {
            return Err(EllaxError::ZeroDenominator);
        }
        m = m + sigma_flipped(alpha).scale(rho[alpha - 1] / f);
    }
    Ok(m)
}

/// The same K-matrix in the half-period-shifted form
/// `sigma_0 + sum_a rho_a phi_a(z + omega_a) sigma_{4-a}`, produced through
/// the constant conversion; agrees entrywise with `k_matrix`.
pub fn k_matrix_shifted_form(
    sign: KSign,
    z: C64,
    boundary: &BoundaryParams,
    torus: &Torus,
) -> Result<Matrix2> {
    let tilde = match sign {
        KSign::Plus => &boundary.rho_plus,
        KSign::Minus => &boundary.rho_minus,
    };
    let rho = rho_from_tilde(tilde, torus);
    let mut m = pauli(0);
    for alpha in 1..=3 {
        m = m + sigma_flipped(alpha)
            .scale(rho[alpha - 1] * varphi1(alpha, z + torus.omega(alpha), torus)?);
    }
    Ok(m)
}

/// Conversion rho = (tilde_1 c_1, tilde_2 c_2, -tilde_3 c_3) between the two
/// printed K-matrix forms (the sign pattern follows the half-period shift
/// rule of the varphi family).
pub fn rho_from_tilde(tilde: &[C64; 3], torus: &Torus) -> [C64; 3] {
    [
        tilde[0] * torus.theta_const(1),
        tilde[1] * torus.theta_const(2),
        -tilde[2] * torus.theta_const(3),
    ]
}

pub fn tilde_from_rho(rho: &[C64; 3], torus: &Torus) -> [C64; 3] {
    [
        rho[0] / torus.theta_const(1),
        rho[1] / torus.theta_const(2),
        -rho[2] / torus.theta_const(3),
    ]
}

/// Classical transfer matrix `t(z) = (1/2) tr(K+ L K- L)` with the standard
/// generators in the (p,q) representation.
pub fn transfer_matrix(
    z: C64,
    state: &PhaseState,
    eta: C64,
    c: C64,
    boundary: &BoundaryParams,
    torus: &Torus,
) -> Result<C64> {
    let l = lax_xyz(z, state, eta, c, torus)?;
    let kp = k_matrix(KSign::Plus, z, boundary, torus)?;
    let km = k_matrix(KSign::Minus, z, boundary, torus)?;
    Ok((kp * l * km * l).trace() * 0.5)
}

/// Closed form of the transfer matrix:
/// `t(z) = 2 (S0 + sum rho+_a S_a)(S0 + sum rho-_a S_a)
///         - (1 - sum rho+_a rho-_a / phi_a(z)^2)(C2 - C1 wp(z))`.
pub fn transfer_matrix_closed(
    z: C64,
    s: &[C64; 4],
    boundary: &BoundaryParams,
    torus: &Torus,
) -> Result<C64> {
    let mut left = s[0];
    let mut right = s[0];
    for alpha in 1..=3 {
        left += boundary.rho_plus[alpha - 1] * s[alpha];
        right += boundary.rho_minus[alpha - 1] * s[alpha];
    }
    let c1 = s[1] * s[1] + s[2] * s[2] + s[3] * s[3];
    let mut c2 = s[0] * s[0];
    for k in 1..=3 {
        c2 += s[k] * s[k] * torus.wp_half_period(k);
    }
    let mut pole_sum = c64(0.0, 0.0);
    for alpha in 1..=3 {
        let f = varphi1(alpha, z, torus)?;
        pole_sum += boundary.rho_plus[alpha - 1] * boundary.rho_minus[alpha - 1] / (f * f);
    }
    Ok(2.0 * left * right
        - (1.0 - pole_sum) * (c2 - c1 * weierstrass_p(z, torus, false)?))
}

/// The constants `I_alpha = E1(eta + omega_alpha) - E1(omega_alpha) - E1(eta)`
/// entering the bold-generator brackets.
pub fn bold_bracket_coefficients(eta: C64, torus: &Torus) -> Result<[C64; 3]> {
    use crate::special::eisenstein;
    let e_eta = eisenstein(1, eta, torus)?;
    let mut out = [c64(0.0, 0.0); 3];
    for alpha in 1..=3 {
        out[alpha - 1] = eisenstein(1, eta + torus.omega(alpha), torus)?
            - eisenstein(1, torus.omega(alpha), torus)?
            - e_eta;
    }
    Ok(out)
}

/// Structure constants of the bold generators:
/// `c {B_a, B_b} = -(I_a - I_b) B_0 B_g` and `c {B_0, B_a} = I_a B_b B_g`
/// for cyclic (a, b, g).
pub fn bold_bracket_exact(a: usize, b: usize, gens: &[C64; 4], i_consts: &[C64; 3], c: C64) -> C64 {
    if a == b {
        return c64(0.0, 0.0);
    }
    if a != 0 && b != 0 {
        // already antisymmetric in (a, b) through the I difference
        let g = 6 - a - b;
        return -(i_consts[a - 1] - i_consts[b - 1]) * gens[0] * gens[g] / c;
    }
    if a == 0 {
        let alpha = b;
        let (beta, gamma) = match alpha {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        i_consts[alpha - 1] * gens[beta] * gens[gamma] / c
    } else {
        -bold_bracket_exact(b, a, gens, i_consts, c)
    }
}

/// Boundary Hamiltonian `H = (S0 + sum rho+_a S_a)(S0 + sum rho-_a S_a)`.
pub fn hamiltonian_xyz(
    state: &PhaseState,
    eta: C64,
    c: C64,
    boundary: &BoundaryParams,
    torus: &Torus,
) -> Result<C64> {
    let s = generators(GeneratorStyle::Standard, state, eta, c, torus)?;
    let mut left = s[0];
    let mut right = s[0];
    for alpha in 1..=3 {
        left += boundary.rho_plus[alpha - 1] * s[alpha];
        right += boundary.rho_minus[alpha - 1] * s[alpha];
    }
    Ok(left * right)
}

/// The boundary constants matching the van Diejen couplings:
/// `rho+_a = (d_0/nub_0)(nub_a/d_a)`, `rho-_a` with the barred set.
pub fn boundary_from_couplings(
    nu: &CouplingSet,
    nu_bar: &CouplingSet,
    eta: C64,
    torus: &Torus,
) -> Result<BoundaryParams> {
    let nb = nu.dual();
    let nbb = nu_bar.dual();
    if nb.nu[0].norm() < 1e-12 || nbb.nu[0].norm() < 1e-12 {
        return Err(EllaxError::ZeroCoupling);
    }
    let d = d_constants(eta, torus)?;
    let mut plus = [c64(0.0, 0.0); 3];
    let mut minus = [c64(0.0, 0.0); 3];
    for alpha in 1..=3 {
        plus[alpha - 1] = d[0] / nb.nu[0] * nb.nu[alpha] / d[alpha];
        minus[alpha - 1] = d[0] / nbb.nu[0] * nbb.nu[alpha] / d[alpha];
    }
    Ok(BoundaryParams { rho_plus: plus, rho_minus: minus })
}

/// Residual of the van Diejen match at eta = eta_bar:
/// `(nub_0 nubb_0 / d_0^2) H_xyz - H1 H1bar` at the given state, with the
/// boundary constants derived from the couplings.
pub fn vd_match_residual(state: &PhaseState, params: &ModelParams) -> Result<f64> {
    let t = &params.torus;
    let boundary = boundary_from_couplings(&params.nu, &params.nu_bar, params.eta, t)?;
    let nb = params.nu.dual();
    let nbb = params.nu_bar.dual();
    let hxyz = hamiltonian_xyz(state, params.eta, params.c, &boundary, t)?;
    let h1 = crate::vandiejen::hamiltonian(FlowId::Vd4First, state, params)?;
    let barred = ModelParams {
        eta: params.eta_bar,
        nu: params.nu_bar,
        ..params.clone()
    };
    let h1b = crate::vandiejen::hamiltonian(FlowId::Vd4First, state, &barred)?;
    Ok(crate::report::rel_residual(nb.nu[0] * nbb.nu[0] * hxyz, h1 * h1b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyrostat::{reflection_residual, BracketKind, GyrostatParams, SpinState};
    use crate::report::rel_residual;

    fn setup() -> (Torus, C64, C64, PhaseState) {
        let torus = Torus::new(c64(0.13, 1.0)).unwrap();
        let eta = c64(0.31, 0.12);
        let c = c64(1.3, 0.1);
        let state = PhaseState::new(c64(0.4, -0.25), c64(-0.13, 0.23));
        (torus, eta, c, state)
    }

    fn boundary() -> BoundaryParams {
        BoundaryParams {
            rho_plus: [c64(0.4, 0.1), c64(-0.2, 0.3), c64(0.7, -0.2)],
            rho_minus: [c64(-0.5, 0.2), c64(0.3, 0.6), c64(0.1, -0.4)],
        }
    }

    #[test]
    fn generator_scaling() {
        let (torus, eta, c, state) = setup();
        let d = d_constants(eta, &torus).unwrap();
        assert_eq!(d[0], c64(1.0, 0.0));
        for a in 0..4 {
            let std = sklyanin_generator(GeneratorStyle::Standard, a, &state, eta, c, &torus)
                .unwrap();
            let bold =
                sklyanin_generator(GeneratorStyle::Bold, a, &state, eta, c, &torus).unwrap();
            assert!(rel_residual(std, 2.0 * d[a] * bold) < 1e-14);
        }
        // S_0 at p = 0 symmetrizes to twice the bold value with d_0 = 1
        let rest = PhaseState::new(c64(0.0, 0.0), state.q);
        let s0 = sklyanin_generator(GeneratorStyle::Standard, 0, &rest, eta, c, &torus).unwrap();
        let b0 = sklyanin_generator(GeneratorStyle::Bold, 0, &rest, eta, c, &torus).unwrap();
        assert!(rel_residual(s0, 2.0 * b0) < 1e-15);
    }

    #[test]
    fn lax_inverse_relation() {
        // L^{-1}(-z) = L(z) / det L(z)
        let (torus, eta, c, state) = setup();
        let z = c64(0.21, 0.17);
        let l = lax_xyz(z, &state, eta, c, &torus).unwrap();
        let lm = lax_xyz(-z, &state, eta, c, &torus).unwrap();
        let want = l.scale(1.0 / l.det());
        assert!((lm.inverse().unwrap() - want).max_norm() < 1e-11 * want.max_norm());
    }

    #[test]
    fn k_matrix_forms_agree() {
        let (torus, _, _, _) = setup();
        let b = boundary();
        let z = c64(0.21, 0.17);
        for sign in [KSign::Plus, KSign::Minus] {
            let a = k_matrix(sign, z, &b, &torus).unwrap();
            let s = k_matrix_shifted_form(sign, z, &b, &torus).unwrap();
            assert!((a - s).max_norm() < 1e-12 * a.max_norm());
        }
        // conversion round-trips
        let rt = tilde_from_rho(&rho_from_tilde(&b.rho_plus, &torus), &torus);
        for k in 0..3 {
            assert!((rt[k] - b.rho_plus[k]).norm() < 1e-12);
        }
        // zero constants give the identity matrix
        let zb = BoundaryParams { rho_plus: [c64(0.0, 0.0); 3], rho_minus: [c64(0.0, 0.0); 3] };
        let k = k_matrix(KSign::Plus, z, &zb, &torus).unwrap();
        assert!((k - pauli(0)).max_norm() == 0.0);
    }

    #[test]
    fn k_matrix_solves_reflection_equation() {
        // spin (1,0,0,0) with lambda = rho reproduces K inside the quadratic
        // reflection machinery.
        let (torus, _, c, _) = setup();
        let b = boundary();
        let z = c64(0.21, 0.17);
        let w = c64(-0.37, 0.29);
        for rho in [b.rho_plus, b.rho_minus] {
            let params = GyrostatParams { lambda: rho, c, torus: torus.clone() };
            let kspin = SpinState::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
            let r = reflection_residual(BracketKind::Quadratic, z, w, &kspin, &params, true)
                .unwrap();
            assert!(r < 1e-10, "K reflection residual {r}");
        }
    }

    #[test]
    fn transfer_matrix_closed_form() {
        let (torus, eta, c, state) = setup();
        let b = boundary();
        let z = c64(0.21, 0.17);
        let direct = transfer_matrix(z, &state, eta, c, &b, &torus).unwrap();
        let s = generators(GeneratorStyle::Standard, &state, eta, c, &torus).unwrap();
        let closed = transfer_matrix_closed(z, &s, &b, &torus).unwrap();
        assert!(rel_residual(direct, closed) < 1e-9, "{direct} vs {closed}");
        // evenness
        let other = transfer_matrix(-z, &state, eta, c, &b, &torus).unwrap();
        assert!(rel_residual(direct, other) < 1e-10);
        // zero boundary: t(z) = 2 S0^2 - (C2 - C1 wp(z))
        let zb = BoundaryParams { rho_plus: [c64(0.0, 0.0); 3], rho_minus: [c64(0.0, 0.0); 3] };
        let t0 = transfer_matrix(z, &state, eta, c, &zb, &torus).unwrap();
        let c1 = s[1] * s[1] + s[2] * s[2] + s[3] * s[3];
        let mut c2 = s[0] * s[0];
        for k in 1..=3 {
            c2 += s[k] * s[k] * torus.wp_half_period(k);
        }
        let want = 2.0 * s[0] * s[0] - (c2 - c1 * weierstrass_p(z, &torus, false).unwrap());
        assert!(rel_residual(t0, want) < 1e-10);
    }

    #[test]
    fn vd_match() {
        let (torus, eta, c, state) = setup();
        let params = ModelParams {
            c,
            eta,
            eta_bar: eta,
            nu: CouplingSet::new([c64(0.7, 0.2), c64(-0.4, 0.5), c64(0.9, -0.3), c64(0.2, 0.6)]),
            nu_bar: CouplingSet::new([
                c64(-0.3, 0.8),
                c64(0.5, 0.1),
                c64(-0.6, -0.2),
                c64(1.1, 0.4),
            ]),
            torus,
        };
        let r = vd_match_residual(&state, &params).unwrap();
        assert!(r < 1e-9, "match residual {r}");
        // H1 as a generator combination: H1 = sum_a (nub_a / d_a) S_a
        let nb = params.nu.dual();
        let d = d_constants(eta, &params.torus).unwrap();
        let s = generators(GeneratorStyle::Standard, &state, eta, c, &params.torus).unwrap();
        let mut combo = c64(0.0, 0.0);
        for a in 0..4 {
            combo += nb.nu[a] / d[a] * s[a];
        }
        let h1 = crate::vandiejen::hamiltonian(FlowId::Vd4First, &state, &params).unwrap();
        assert!(rel_residual(combo, h1) < 1e-11);
    }

    #[test]
    fn zero_coupling_rejected() {
        let (torus, eta, _, _) = setup();
        // nu with vanishing dual zeroth component: nu = dual((0,a,b,c))
        let nb = CouplingSet::new([c64(0.0, 0.0), c64(0.3, 0.0), c64(0.5, 0.0), c64(0.2, 0.0)]);
        let nu = nb.dual();
        let err = boundary_from_couplings(&nu, &nu, eta, &torus);
        assert!(matches!(err, Err(EllaxError::ZeroCoupling)));
    }
}
