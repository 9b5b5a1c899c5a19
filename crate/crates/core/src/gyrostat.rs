//! The Zhukovsky-Volterra gyrostat: Lax matrix, elliptic r-matrix, the linear
//! (sl2*) and quadratic (BC1 Sklyanin) Poisson structures, reflection-equation
//! residuals, Casimir functions and dynamics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{c64, pauli, sigma_flipped, Matrix2, Matrix4};
use crate::error::{EllaxError, Result};
use crate::special::{epsilon, varphi1};
use crate::torus::{Torus, POLE_TOL};

type C64 = Complex64;

/// The spin quadruple (S0, S1, S2, S3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub s: [C64; 4],
}

impl SpinState {
    pub fn new(s0: C64, s1: C64, s2: C64, s3: C64) -> Self {
        SpinState { s: [s0, s1, s2, s3] }
    }
}

#[derive(Debug, Clone)]
pub struct GyrostatParams {
    /// The constant vector (lambda_1, lambda_2, lambda_3).
    pub lambda: [C64; 3],
    /// Normalization constant of the quadratic bracket (the relativistic c).
    pub c: C64,
    pub torus: Torus,
}

impl GyrostatParams {
    pub fn lambda_of(&self, alpha: usize) -> C64 {
        self.lambda[alpha - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// Poisson-Lie brackets on sl2*: {S_a, S_b} = -i eps_abg S_g, S_0 central.
    Linear,
    /// BC1 Sklyanin algebra:
    /// c {S_a, S_b} = -i eps S_0 S_g,
    /// c {S_0, S_a} = -i eps S_b S_g (wp_b - wp_g) + i eps (S_b l_g - l_b S_g).
    Quadratic,
}

/// phi_alpha(z) has zeros on omega_alpha + lattice; 1/phi terms blow up there.
fn require_phi_nonzero(z: C64, alpha: usize, torus: &Torus) -> Result<()> {
    if torus.lattice_distance(z - torus.omega(alpha)) < POLE_TOL {
        Err(EllaxError::ZeroDenominator)
    } else {
        Ok(())
    }
}

/// Gyrostat Lax matrix
/// `sigma_0 S_0 [optional] + sum_a (S_a phi_a(z) - lambda_a / phi_a(z)) sigma_{4-a}`.
pub fn lax_zhv(
    z: C64,
    spin: &SpinState,
    params: &GyrostatParams,
    include_s0: bool,
) -> Result<Matrix2> {
    let t = &params.torus;
    let mut m = if include_s0 {
        pauli(0).scale(spin.s[0])
    } else {
        Matrix2::zero()
    };
    for alpha in 1..=3 {
        require_phi_nonzero(z, alpha, t)?;
        let f = varphi1(alpha, z, t)?;
        m = m + sigma_flipped(alpha).scale(spin.s[alpha] * f - params.lambda_of(alpha) / f);
    }
    Ok(m)
}

/// The classical elliptic r-matrix
/// `r(x) = (1/2) sum_a phi_a(x) sigma_{4-a} (x) sigma_{4-a}`.
pub fn r_matrix(x: C64, torus: &Torus) -> Result<Matrix4> {
    let mut m = Matrix4::zero();
    for alpha in 1..=3 {
        let s = sigma_flipped(alpha);
        m = m + s.kron(&s).scale(0.5 * varphi1(alpha, x, torus)?);
    }
    Ok(m)
}

/// Structure-constant value of {S_a, S_b} at the given spin, for either
/// Poisson structure. Indices run over 0..=3.
pub fn bracket(
    kind: BracketKind,
    a: usize,
    b: usize,
    spin: &SpinState,
    params: &GyrostatParams,
) -> C64 {
    let zero = c64(0.0, 0.0);
    if a == b {
        return zero;
    }
    match kind {
        BracketKind::Linear => {
            if a == 0 || b == 0 {
                return zero;
            }
            let g = 6 - a - b;
            // measured sign: the linear reflection equation and the
            // non-relativistic Poisson map both fix {S_a,S_b} = -i eps S_g.
            -C64::i() * epsilon(a, b, g) * spin.s[g]
        }
        BracketKind::Quadratic => {
            if a != 0 && b != 0 {
                let g = 6 - a - b;
                return -C64::i() * epsilon(a, b, g) * spin.s[0] * spin.s[g] / params.c;
            }
            if a == 0 {
                let alpha = b;
                let (beta, gamma) = cyclic(alpha);
                let val = -C64::i()
                    * spin.s[beta]
                    * spin.s[gamma]
                    * (params.torus.wp_half_period(beta) - params.torus.wp_half_period(gamma))
                    + C64::i()
                        * (spin.s[beta] * params.lambda_of(gamma)
                            - params.lambda_of(beta) * spin.s[gamma]);
                val / params.c
            } else {
                -bracket(kind, b, a, spin, params)
            }
        }
    }
}

/// The cyclic completion (beta, gamma) of alpha with eps(alpha,beta,gamma)=1.
fn cyclic(alpha: usize) -> (usize, usize) {
    match alpha {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => panic!("index must be 1..=3"),
    }
}

/// Assembles the 4x4 matrix {L_1(z), L_2(w)} from the generator
/// decomposition of the Lax matrix (exact in the structure constants),
/// subtracts the r-matrix side of the respective classical reflection
/// equation and returns the max-norm of the difference.
pub fn reflection_residual(
    kind: BracketKind,
    z: C64,
    w: C64,
    spin: &SpinState,
    params: &GyrostatParams,
    include_s0: bool,
) -> Result<f64> {
    let t = &params.torus;
    // generator weights g_a(x): 1 for a = 0, phi_a(x) for a >= 1; the
    // lambda/phi terms are constants and drop out of all brackets.
    let weight = |a: usize, x: C64| -> Result<C64> {
        if a == 0 {
            Ok(c64(1.0, 0.0))
        } else {
            varphi1(a, x, t)
        }
    };
    let basis = |a: usize| if a == 0 { pauli(0) } else { sigma_flipped(a) };
    let lo = if include_s0 { 0usize } else { 1usize };
    let mut lhs = Matrix4::zero();
    for a in lo..=3 {
        for b in lo..=3 {
            let x = bracket(kind, a, b, spin, params);
            if x.norm() == 0.0 {
                continue;
            }
            lhs = lhs + basis(a).kron(&basis(b)).scale(x * weight(a, z)? * weight(b, w)?);
        }
    }
    let l1 = lax_zhv(z, spin, params, include_s0)?.kron(&pauli(0));
    let l2 = pauli(0).kron(&lax_zhv(w, spin, params, include_s0)?);
    let r_minus = r_matrix(z - w, t)?;
    let r_plus = r_matrix(z + w, t)?;
    let rhs = match kind {
        BracketKind::Linear => {
            (l1.clone() + l2.clone()).commutator(&r_minus).scale(c64(0.5, 0.0))
                - (l1 - l2).commutator(&r_plus).scale(c64(0.5, 0.0))
        }
        BracketKind::Quadratic => {
            let inv2c = 1.0 / (2.0 * params.c);
            ((l1.clone() * l2.clone()).commutator(&r_minus)
                + l2.clone() * r_plus.clone() * l1.clone()
                - l1 * r_plus * l2)
                .scale(inv2c)
        }
    };
    Ok(crate::report::rel_matrix4_residual(&lhs, &rhs))
}

/// Casimir functions of the quadratic structure:
/// `C1 = S1^2 + S2^2 + S3^2`,
/// `C2 = S0^2 + sum_k (S_k^2 wp_k + 2 S_k lambda_k)`.
pub fn casimirs(spin: &SpinState, params: &GyrostatParams) -> (C64, C64) {
    let c1 = spin.s[1] * spin.s[1] + spin.s[2] * spin.s[2] + spin.s[3] * spin.s[3];
    let mut c2 = spin.s[0] * spin.s[0];
    for k in 1..=3 {
        c2 += spin.s[k] * spin.s[k] * params.torus.wp_half_period(k)
            + 2.0 * spin.s[k] * params.lambda_of(k);
    }
    (c1, c2)
}

/// `H = -(1/2) sum_a S_a^2 wp_a - sum_a S_a lambda_a`.
pub fn hamiltonian_zhv(spin: &SpinState, params: &GyrostatParams) -> C64 {
    let mut h = c64(0.0, 0.0);
    for a in 1..=3 {
        h -= 0.5 * spin.s[a] * spin.s[a] * params.torus.wp_half_period(a)
            + spin.s[a] * params.lambda_of(a);
    }
    h
}

/// Equations of motion in matrix form: S_dot = [S, wp_hat(S)] + [S, lambda],
/// with S_0 constant along the flow.
pub fn gyrostat_eom(spin: &SpinState, params: &GyrostatParams) -> SpinState {
    let mut s_mat = Matrix2::zero();
    let mut drive = Matrix2::zero();
    for a in 1..=3 {
        let t = sigma_flipped(a);
        s_mat = s_mat + t.scale(spin.s[a]);
        drive = drive
            + t.scale(spin.s[a] * params.torus.wp_half_period(a) + params.lambda_of(a));
    }
    let comm = s_mat.commutator(&drive);
    // project back onto the sigma_{4-a} basis: coeff_a = tr(comm sigma_{4-a})/2
    let mut out = SpinState::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
    for a in 1..=3 {
        out.s[a] = (comm * sigma_flipped(a)).trace() * 0.5;
    }
    out
}

/// The M-matrix of the gyrostat Lax equation, scaled to pair with the
/// matrix-commutator equations of motion above (twice the half-normalized
/// form that pairs with the cross-product convention):
/// `M = sum_a S_a (phi_1 phi_2 phi_3 / phi_a) sigma_{4-a}`.
pub fn m_zhv(z: C64, spin: &SpinState, params: &GyrostatParams) -> Result<Matrix2> {
    let t = &params.torus;
    let f1 = varphi1(1, z, t)?;
    let f2 = varphi1(2, z, t)?;
    let f3 = varphi1(3, z, t)?;
    let prod = f1 * f2 * f3;
    let fs = [c64(0.0, 0.0), f1, f2, f3];
    let mut m = Matrix2::zero();
    for a in 1..=3 {
        require_phi_nonzero(z, a, t)?;
        m = m + sigma_flipped(a).scale(spin.s[a] * prod / fs[a]);
    }
    Ok(m)
}

/// `|| d/dt L - [L, M] ||` with the time derivative assembled exactly from
/// the equations of motion (L is linear in the generators).
pub fn lax_residual_zhv(z: C64, spin: &SpinState, params: &GyrostatParams) -> Result<f64> {
    let ds = gyrostat_eom(spin, params);
    let t = &params.torus;
    let mut ldot = Matrix2::zero();
    for a in 1..=3 {
        ldot = ldot + sigma_flipped(a).scale(ds.s[a] * varphi1(a, z, t)?);
    }
    let l = lax_zhv(z, spin, params, true)?;
    let m = m_zhv(z, spin, params)?;
    Ok(crate::report::rel_matrix_residual(&ldot, &l.commutator(&m)))
}

/// Gyrostat trajectory with per-step invariants.
#[derive(Debug, Clone)]
pub struct GyrostatTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinState>,
    pub casimir1: Vec<C64>,
    pub casimir2: Vec<C64>,
    pub hamiltonians: Vec<C64>,
    pub probe_dets: Vec<C64>,
}

/// Fixed-step RK4 for the (polynomial) gyrostat vector field.
pub fn integrate_gyrostat(
    spin0: &SpinState,
    params: &GyrostatParams,
    dt: f64,
    steps: usize,
    probe_z: C64,
) -> Result<GyrostatTrajectory> {
    let mut traj = GyrostatTrajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        casimir1: Vec::with_capacity(steps + 1),
        casimir2: Vec::with_capacity(steps + 1),
        hamiltonians: Vec::with_capacity(steps + 1),
        probe_dets: Vec::with_capacity(steps + 1),
    };
    let mut state = *spin0;
    let record = |traj: &mut GyrostatTrajectory, t: f64, s: &SpinState| -> Result<()> {
        let (c1, c2) = casimirs(s, params);
        traj.times.push(t);
        traj.states.push(*s);
        traj.casimir1.push(c1);
        traj.casimir2.push(c2);
        traj.hamiltonians.push(hamiltonian_zhv(s, params));
        traj.probe_dets.push(lax_zhv(probe_z, s, params, true)?.det());
        Ok(())
    };
    record(&mut traj, 0.0, &state)?;
    let add = |s: &SpinState, d: &SpinState, h: C64| {
        let mut out = *s;
        for i in 0..4 {
            out.s[i] += h * d.s[i];
        }
        out
    };
    for step in 0..steps {
        let h = c64(dt, 0.0);
        let k1 = gyrostat_eom(&state, params);
        let k2 = gyrostat_eom(&add(&state, &k1, 0.5 * h), params);
        let k3 = gyrostat_eom(&add(&state, &k2, 0.5 * h), params);
        let k4 = gyrostat_eom(&add(&state, &k3, h), params);
        for i in 0..4 {
            state.s[i] += h / 6.0 * (k1.s[i] + 2.0 * k2.s[i] + 2.0 * k3.s[i] + k4.s[i]);
        }
        record(&mut traj, dt * (step as f64 + 1.0), &state)?;
    }
    Ok(traj)
}
