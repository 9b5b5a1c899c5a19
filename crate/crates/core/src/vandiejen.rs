//! The BC1 Ruijsenaars-van Diejen model: Lax matrices, Hamiltonians,
//! M-matrices, equations of motion, flow integration, the two-particle
//! Ruijsenaars-Schneider reduction and the non-relativistic limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{c64, Matrix2};
use crate::error::{EllaxError, Result};
use crate::fd::FdOptions;
use crate::potential::{v, v_prime, CouplingSet};
use crate::special::{eisenstein, varphi1, weierstrass_p};
use crate::torus::{Torus, POLE_TOL};

type C64 = Complex64;

/// Canonical pair (p, q) with {p, q} = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub p: C64,
    pub q: C64,
}

impl PhaseState {
    pub fn new(p: C64, q: C64) -> Self {
        PhaseState { p, q }
    }

    /// All potentials and Lax entries have poles only along
    /// q = -omega_a + lattice; reject states within `tol` of those.
    pub fn require_pole_distant(&self, torus: &Torus, tol: f64) -> Result<()> {
        for a in 0..4 {
            torus.require_distant(self.q + torus.omega(a), tol)?;
        }
        Ok(())
    }
}

/// Coupling data of the 8-constant model (4+4 constants, two eta shifts and
/// the relativistic parameter c).
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub c: C64,
    pub eta: C64,
    pub eta_bar: C64,
    pub nu: CouplingSet,
    pub nu_bar: CouplingSet,
    pub torus: Torus,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.c.norm() == 0.0 {
            return Err(EllaxError::Config("relativistic parameter c must be nonzero".into()));
        }
        self.torus.require_distant(2.0 * self.eta, POLE_TOL)?;
        self.torus.require_distant(2.0 * self.eta_bar, POLE_TOL)?;
        Ok(())
    }

    /// The 4-constant reduction: barred set equal to the unbarred one.
    pub fn symmetric_reduction(&self) -> ModelParams {
        ModelParams {
            c: self.c,
            eta: self.eta,
            eta_bar: self.eta,
            nu: self.nu,
            nu_bar: self.nu,
            torus: self.torus.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowId {
    /// 8-constant flow generated by the full Hamiltonian.
    Vd8,
    /// First 4-constant flow (tr L).
    Vd4First,
    /// Second 4-constant flow ((1/2) tr L^2).
    Vd4Second,
    /// Non-relativistic Calogero-Inozemtsev flow.
    Inoz,
}

impl FlowId {
    pub fn tag(self) -> &'static str {
        match self {
            FlowId::Vd8 => "vd8",
            FlowId::Vd4First => "vd4-1",
            FlowId::Vd4Second => "vd4-2",
            FlowId::Inoz => "inoz",
        }
    }
}

/// One symmetric factor: L(z) = [[v(eta,q) e^{p/2c}, v(z,q)],
/// [v(z,-q), v(eta,-q) e^{-p/2c}]] with the given coupling set.
pub fn lax_factor(
    z: C64,
    state: &PhaseState,
    eta: C64,
    nu: &CouplingSet,
    c: C64,
    torus: &Torus,
) -> Result<Matrix2> {
    let ep = (state.p / (2.0 * c)).exp();
    Ok(Matrix2::new(
        v(eta, state.q, nu, torus)? * ep,
        v(z, state.q, nu, torus)?,
        v(z, -state.q, nu, torus)?,
        v(eta, -state.q, nu, torus)? / ep,
    ))
}

/// The symmetric pair (L, Lbar); the full Lax matrix is their product.
pub fn lax_symmetric(z: C64, state: &PhaseState, params: &ModelParams) -> Result<(Matrix2, Matrix2)> {
    let l = lax_factor(z, state, params.eta, &params.nu, params.c, &params.torus)?;
    let lbar = lax_factor(z, state, params.eta_bar, &params.nu_bar, params.c, &params.torus)?;
    Ok((l, lbar))
}

/// The product form L(z) Lbar(z) of the 8-constant Lax matrix.
pub fn lax_product(z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    let (l, lbar) = lax_symmetric(z, state, params)?;
    Ok(l * lbar)
}

/// The original two-factor Lax matrix; related to the symmetric product by
/// conjugation with diag(e^{-p/4c}, -e^{p/4c}).
pub fn lax_chalykh(z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    let t = &params.torus;
    let q = state.q;
    let first = Matrix2::new(
        v(params.eta, q, &params.nu, t)?,
        -v(z, q, &params.nu, t)?,
        -v(z, -q, &params.nu, t)?,
        v(params.eta, -q, &params.nu, t)?,
    );
    let ep = (state.p / params.c).exp();
    let second = Matrix2::new(
        v(params.eta_bar, q, &params.nu_bar, t)? * ep,
        -v(z, q, &params.nu_bar, t)?,
        -v(z, -q, &params.nu_bar, t)?,
        v(params.eta_bar, -q, &params.nu_bar, t)? / ep,
    );
    Ok(first * second)
}

/// Scalar Hamiltonian of the given flow.
pub fn hamiltonian(flow: FlowId, state: &PhaseState, params: &ModelParams) -> Result<C64> {
    let t = &params.torus;
    let q = state.q;
    match flow {
        FlowId::Vd8 => {
            let ep = (state.p / params.c).exp();
            let mut h = v(params.eta, q, &params.nu, t)?
                * v(params.eta_bar, q, &params.nu_bar, t)?
                * ep
                + v(params.eta, -q, &params.nu, t)?
                    * v(params.eta_bar, -q, &params.nu_bar, t)?
                    / ep;
            for a in 0..4 {
                h -= 2.0
                    * params.nu.nu[a]
                    * params.nu_bar.nu[a]
                    * weierstrass_p(q + t.omega(a), t, false)?;
            }
            Ok(h)
        }
        FlowId::Vd4First => {
            let ep = (state.p / (2.0 * params.c)).exp();
            Ok(v(params.eta, q, &params.nu, t)? * ep + v(params.eta, -q, &params.nu, t)? / ep)
        }
        FlowId::Vd4Second => {
            let ep = (state.p / params.c).exp();
            let vp = v(params.eta, q, &params.nu, t)?;
            let vm = v(params.eta, -q, &params.nu, t)?;
            let mut h = 0.5 * vp * vp * ep + 0.5 * vm * vm / ep;
            for a in 0..4 {
                h -= params.nu.nu[a] * params.nu.nu[a] * weierstrass_p(q + t.omega(a), t, false)?;
            }
            Ok(h)
        }
        FlowId::Inoz => {
            let mut h = 0.5 * state.p * state.p;
            for a in 0..4 {
                h -= params.nu.nu[a] * params.nu.nu[a] * weierstrass_p(q + t.omega(a), t, false)?;
            }
            Ok(h)
        }
    }
}

/// Closed-form equations of motion (q_dot, p_dot) for the given flow; these
/// agree with the numerical gradients of the Hamiltonian.
pub fn equations_of_motion(
    flow: FlowId,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<(C64, C64)> {
    let t = &params.torus;
    let q = state.q;
    match flow {
        FlowId::Vd8 => {
            let ep = (state.p / params.c).exp();
            let vp = v(params.eta, q, &params.nu, t)?;
            let vm = v(params.eta, -q, &params.nu, t)?;
            let wp = v(params.eta_bar, q, &params.nu_bar, t)?;
            let wm = v(params.eta_bar, -q, &params.nu_bar, t)?;
            let dvp = v_prime(params.eta, q, &params.nu, t)?;
            let dvm = v_prime(params.eta, -q, &params.nu, t)?;
            let dwp = v_prime(params.eta_bar, q, &params.nu_bar, t)?;
            let dwm = v_prime(params.eta_bar, -q, &params.nu_bar, t)?;
            let q_dot = (vp * wp * ep - vm * wm / ep) / params.c;
            let mut p_dot = -(dvp * wp + vp * dwp) * ep + (dvm * wm + vm * dwm) / ep;
            for a in 0..4 {
                p_dot += 2.0
                    * params.nu.nu[a]
                    * params.nu_bar.nu[a]
                    * weierstrass_p(q + t.omega(a), t, true)?;
            }
            Ok((q_dot, p_dot))
        }
        FlowId::Vd4First => {
            let ep = (state.p / (2.0 * params.c)).exp();
            let vp = v(params.eta, q, &params.nu, t)?;
            let vm = v(params.eta, -q, &params.nu, t)?;
            let q_dot = (vp * ep - vm / ep) / (2.0 * params.c);
            let p_dot = -v_prime(params.eta, q, &params.nu, t)? * ep
                + v_prime(params.eta, -q, &params.nu, t)? / ep;
            Ok((q_dot, p_dot))
        }
        FlowId::Vd4Second => {
            let ep = (state.p / params.c).exp();
            let vp = v(params.eta, q, &params.nu, t)?;
            let vm = v(params.eta, -q, &params.nu, t)?;
            let q_dot = (vp * vp * ep - vm * vm / ep) / (2.0 * params.c);
            let mut p_dot = -vp * v_prime(params.eta, q, &params.nu, t)? * ep
                + vm * v_prime(params.eta, -q, &params.nu, t)? / ep;
            for a in 0..4 {
                p_dot += params.nu.nu[a]
                    * params.nu.nu[a]
                    * weierstrass_p(q + t.omega(a), t, true)?;
            }
            Ok((q_dot, p_dot))
        }
        FlowId::Inoz => {
            let mut p_dot = c64(0.0, 0.0);
            for a in 0..4 {
                p_dot += params.nu.nu[a]
                    * params.nu.nu[a]
                    * weierstrass_p(q + t.omega(a), t, true)?;
            }
            Ok((state.p, p_dot))
        }
    }
}

/// The accompanying M-matrix for the flow. Entries follow the standard
/// row-major layout; the Lax equation reads d/dt Lax = [Lax, M].
pub fn m_matrix(flow: FlowId, z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    let t = &params.torus;
    let q = state.q;
    match flow {
        FlowId::Vd8 => {
            let ep2 = (state.p / (2.0 * params.c)).exp();
            let ep = ep2 * ep2;
            let vp = v(params.eta, q, &params.nu, t)?;
            let vm = v(params.eta, -q, &params.nu, t)?;
            let wp = v(params.eta_bar, q, &params.nu_bar, t)?;
            let wm = v(params.eta_bar, -q, &params.nu_bar, t)?;
            let dvp = v_prime(params.eta, q, &params.nu, t)?;
            let dvm = v_prime(params.eta, -q, &params.nu, t)?;
            let vzq = v(z, q, &params.nu, t)?;
            let vzm = v(z, -q, &params.nu, t)?;
            let dvzq = v_prime(z, q, &params.nu, t)?;
            let dvzm = v_prime(z, -q, &params.nu, t)?;
            let dwzq = v_prime(z, q, &params.nu_bar, t)?;
            let dwzm = v_prime(z, -q, &params.nu_bar, t)?;
            let (_, p_dot) = equations_of_motion(FlowId::Vd8, state, params)?;
            let dq_h = -p_dot;
            let m11 = -dvp * wp * ep + dwzm * vzq + 0.25 * dq_h;
            let m12 = vp * dwzq * ep2 + wm * dvzq / ep2;
            let m21 = vm * dwzm / ep2 + wp * dvzm * ep2;
            let m22 = -dvm * wm / ep + dwzq * vzm - 0.25 * dq_h;
            Ok(Matrix2::new(m11, m12, m21, m22).scale(1.0 / params.c))
        }
        FlowId::Vd4First => {
            let z0 = c64(0.0, 0.0);
            Ok(Matrix2::new(
                z0,
                v_prime(z, q, &params.nu, t)?,
                v_prime(z, -q, &params.nu, t)?,
                z0,
            )
            .scale(1.0 / (2.0 * params.c)))
        }
        FlowId::Vd4Second => {
            let h1 = hamiltonian(FlowId::Vd4First, state, params)?;
            Ok(m_matrix(FlowId::Vd4First, z, state, params)?.scale(h1))
        }
        FlowId::Inoz => panic!("no M-matrix is defined for the Inozemtsev flow"),
    }
}

fn lax_of_flow(flow: FlowId, z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    match flow {
        FlowId::Vd8 => lax_product(z, state, params),
        FlowId::Vd4First | FlowId::Vd4Second => {
            lax_factor(z, state, params.eta, &params.nu, params.c, &params.torus)
        }
        FlowId::Inoz => inozemtsev_lax(z, state, params),
    }
}

/// Max-norm of d/dt Lax - [Lax, M] with the time derivative assembled from
/// finite-difference phase-space partials chained with the closed-form
/// equations of motion.
pub fn lax_residual(flow: FlowId, z: C64, state: &PhaseState, params: &ModelParams) -> Result<f64> {
    let (q_dot, p_dot) = equations_of_motion(flow, state, params)?;
    let opts = FdOptions::default();
    let dq = matrix_derivative(
        |qq| lax_of_flow(flow, z, &PhaseState::new(state.p, qq), params),
        state.q,
        opts,
    )?;
    let dp = matrix_derivative(
        |pp| lax_of_flow(flow, z, &PhaseState::new(pp, state.q), params),
        state.p,
        opts,
    )?;
    let ldot = dq.scale(q_dot) + dp.scale(p_dot);
    let lax = lax_of_flow(flow, z, state, params)?;
    let m = m_matrix(flow, z, state, params)?;
    Ok(crate::report::rel_matrix_residual(&ldot, &lax.commutator(&m)))
}

/// Entrywise 4th-order central difference with one Richardson halving.
pub fn matrix_derivative<F>(f: F, x: C64, opts: FdOptions) -> Result<Matrix2>
where
    F: Fn(C64) -> Result<Matrix2>,
{
    let stencil = |h: f64| -> Result<Matrix2> {
        let hh = c64(h, 0.0);
        let f2p = f(x + 2.0 * hh)?;
        let f1p = f(x + hh)?;
        let f1m = f(x - hh)?;
        let f2m = f(x - 2.0 * hh)?;
        Ok((f1p - f1m).scale(c64(8.0 / (12.0 * h), 0.0))
            + (f2m - f2p).scale(c64(1.0 / (12.0 * h), 0.0)))
    };
    let h = opts.step * 1.0f64.max(x.norm());
    let d_h = stencil(h)?;
    if !opts.richardson {
        return Ok(d_h);
    }
    let d_h2 = stencil(h / 2.0)?;
    Ok(d_h2.scale(c64(16.0 / 15.0, 0.0)) - d_h.scale(c64(1.0 / 15.0, 0.0)))
}

/// A fixed-step trajectory with per-step conserved-quantity probes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub hamiltonians: Vec<C64>,
    pub probe_dets: Vec<C64>,
    /// Set when integration aborted near a pole; the trajectory then holds
    /// the steps completed before the abort.
    pub aborted_at: Option<usize>,
}

impl Trajectory {
    /// Largest relative drift of a recorded complex invariant.
    pub fn max_drift(series: &[C64]) -> f64 {
        if series.is_empty() {
            return 0.0;
        }
        let first = series[0];
        series
            .iter()
            .map(|x| (x - first).norm() / 1.0f64.max(first.norm()))
            .fold(0.0, f64::max)
    }
}

/// Classical fixed-step RK4 on the holomorphic vector field of the flow.
/// Emits H(flow) and det Lax(probe_z) at every step.
pub fn integrate(
    flow: FlowId,
    state0: &PhaseState,
    params: &ModelParams,
    dt: f64,
    steps: usize,
    probe_z: C64,
) -> Result<Trajectory> {
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        hamiltonians: Vec::with_capacity(steps + 1),
        probe_dets: Vec::with_capacity(steps + 1),
        aborted_at: None,
    };
    let mut state = *state0;
    let record = |traj: &mut Trajectory, t: f64, s: &PhaseState| -> Result<()> {
        traj.times.push(t);
        traj.states.push(*s);
        traj.hamiltonians.push(hamiltonian(flow, s, params)?);
        traj.probe_dets.push(lax_of_flow(flow, probe_z, s, params)?.det());
        Ok(())
    };
    state.require_pole_distant(&params.torus, POLE_TOL)?;
    record(&mut traj, 0.0, &state)?;
    let rhs = |s: &PhaseState| -> Result<(C64, C64)> {
        s.require_pole_distant(&params.torus, POLE_TOL)?;
        equations_of_motion(flow, s, params)
    };
    for step in 0..steps {
        let attempt = || -> Result<PhaseState> {
            let h = c64(dt, 0.0);
            let (k1q, k1p) = rhs(&state)?;
            let s2 = PhaseState::new(state.p + 0.5 * h * k1p, state.q + 0.5 * h * k1q);
            let (k2q, k2p) = rhs(&s2)?;
            let s3 = PhaseState::new(state.p + 0.5 * h * k2p, state.q + 0.5 * h * k2q);
            let (k3q, k3p) = rhs(&s3)?;
            let s4 = PhaseState::new(state.p + h * k3p, state.q + h * k3q);
            let (k4q, k4p) = rhs(&s4)?;
            Ok(PhaseState::new(
                state.p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
                state.q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
            ))
        };
        match attempt() {
            Ok(next) => {
                state = next;
                record(&mut traj, dt * (step as f64 + 1.0), &state)?;
            }
            Err(EllaxError::NearPole { .. }) => {
                traj.aborted_at = Some(step);
                return Ok(traj);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// Center-of-mass reduced Lax matrix of the two-particle
/// Ruijsenaars-Schneider model:
/// [[phi(eta,2q) e^{p/c}, phi(z,2q)], [phi(z,-2q), phi(eta,-2q) e^{-p/c}]].
/// Coincides with the symmetric factor at dual couplings (1,0,0,0) once the
/// relativistic parameter is halved (the factor carries e^{p/2c}).
pub fn rs_lax_reduced(z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    use crate::special::kronecker_phi;
    let t = &params.torus;
    let q2 = 2.0 * state.q;
    let ep = (state.p / params.c).exp();
    Ok(Matrix2::new(
        kronecker_phi(params.eta, q2, t)? * ep,
        kronecker_phi(z, q2, t)?,
        kronecker_phi(z, -q2, t)?,
        kronecker_phi(params.eta, -q2, t)? / ep,
    ))
}

/// Non-relativistic Lax matrix [[p/2, vb(q,z)], [vb(-q,z), -p/2]] with
/// vb the potential in the dual couplings.
pub fn inozemtsev_lax(z: C64, state: &PhaseState, params: &ModelParams) -> Result<Matrix2> {
    let nb = params.nu.dual();
    let t = &params.torus;
    Ok(Matrix2::new(
        0.5 * state.p,
        v(state.q, z, &nb, t)?,
        v(-state.q, z, &nb, t)?,
        -0.5 * state.p,
    ))
}

/// Non-relativistic limit probe. For each c in `c_values` this sets
/// eta = kappa/c with kappa = nu_breve_0, shifts the momentum by
/// `2 kappa E1(2q) + 2 sum_k nu_breve_k varphi_k(2q)` and measures
/// `r(c) = || L(z) - c*Id - L_inoz(z) ||`; the remainder is O(1/c), so
/// r(2c)/r(c) -> 1/2.
pub fn inozemtsev_limit_check(
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
    c_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let nb = params.nu.dual();
    let kappa = nb.nu[0];
    if kappa.norm() < 1e-12 {
        return Err(EllaxError::ZeroCoupling);
    }
    let t = &params.torus;
    let mut shift = 2.0 * kappa * eisenstein(1, 2.0 * state.q, t)?;
    for k in 1..=3 {
        shift += 2.0 * nb.nu[k] * varphi1(k, 2.0 * state.q, t)?;
    }
    let target = inozemtsev_lax(z, state, params)?;
    let mut out = Vec::with_capacity(c_values.len());
    for &cv in c_values {
        let c = c64(cv, 0.0);
        let eta_c = kappa / c;
        let shifted = PhaseState::new(state.p - shift, state.q);
        let l = lax_factor(z, &shifted, eta_c, &params.nu, c, t)?;
        let resid = (l - Matrix2::identity().scale(c) - target).max_norm();
        out.push((cv, resid));
    }
    Ok(out)
}
