//! Suite runners: each produces a list of verification records from one run
//! configuration. The CLI and the acceptance tests share these.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::cmatrix::{c64, pauli, sigma_flipped, Matrix2, Matrix4};
use crate::config::RunConfig;
use crate::error::{EllaxError, Result};
use crate::fd::FdOptions;
use crate::gauge::{
    mixed_brackets, numeric_poisson_bracket, theorem2_convergence_ratio, verify_coupled,
    verify_inozemtsev_gauge, verify_theorem1, verify_theorem2, verify_theorem3,
    xi_conjugation_closed_form, xi_matrix, LaxSide,
};
use crate::gyrostat::{
    bracket, casimirs, integrate_gyrostat, lax_residual_zhv, r_matrix, reflection_residual,
    BracketKind, GyrostatParams, SpinState,
};
use crate::identities::{evaluate_v_identity, verify_identity, IdentityId};
use crate::potential::CouplingSet;
use crate::report::{params_digest, rel_matrix4_residual, rel_residual, VerificationRecord};
use crate::sampling::{TorusSampler, RETRY_FACTOR};
use crate::vandiejen::{
    hamiltonian, inozemtsev_limit_check, integrate, lax_chalykh, lax_factor, lax_product,
    lax_residual, rs_lax_reduced, FlowId, ModelParams, PhaseState, Trajectory,
};
use crate::xyz::{
    bold_bracket_coefficients, bold_bracket_exact, boundary_from_couplings, generators,
    k_matrix, k_matrix_shifted_form, transfer_matrix, transfer_matrix_closed, vd_match_residual,
    GeneratorStyle, KSign,
};

type C64 = Complex64;

/// Retry loop shared by the sampled checks: draws are rejected (and counted)
/// when an evaluation lands too close to a pole or a singular gauge point.
fn run_samples(
    samples: usize,
    mut eval: impl FnMut() -> Result<f64>,
) -> Result<(u64, u64, f64)> {
    let mut attempted = 0u64;
    let mut accepted = 0u64;
    let mut max_res = 0.0f64;
    while (accepted as usize) < samples && (attempted as usize) < RETRY_FACTOR * samples {
        attempted += 1;
        match eval() {
            Ok(r) => {
                accepted += 1;
                max_res = max_res.max(r);
            }
            Err(EllaxError::NearPole { .. })
            | Err(EllaxError::Singular { .. })
            | Err(EllaxError::ZeroDenominator) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok((attempted, accepted, max_res))
}

struct Recorder {
    suite: &'static str,
    seed: u64,
    digest: Option<String>,
    records: Vec<VerificationRecord>,
}

impl Recorder {
    fn new(suite: &'static str, seed: u64, digest: Option<String>) -> Self {
        Recorder { suite, seed, digest, records: Vec::new() }
    }

    fn push(&mut self, tag: &str, counts: (u64, u64, f64), tol: f64, t0: Instant) {
        let mut rec = VerificationRecord::new(
            self.suite,
            tag,
            counts.0,
            counts.1,
            counts.2,
            tol,
            self.seed,
        );
        rec.wall_time_ms = t0.elapsed().as_secs_f64() * 1e3;
        rec.params_digest = self.digest.clone();
        self.records.push(rec);
    }
}

fn draw_state(s: &mut TorusSampler, params: &ModelParams) -> PhaseState {
    PhaseState::new(s.box_point(0.6), s.cell_point(&params.torus))
}

fn draw_spin(s: &mut TorusSampler) -> SpinState {
    SpinState::new(s.box_point(1.0), s.box_point(1.0), s.box_point(1.0), s.box_point(1.0))
}

fn digest_of(cfg: &RunConfig) -> String {
    let params: Vec<C64> = cfg
        .nu
        .iter()
        .chain(cfg.nu_bar.iter())
        .chain([cfg.tau, cfg.c, cfg.eta, cfg.eta_bar].iter())
        .map(|p| C64::new(p[0], p[1]))
        .collect();
    params_digest(&params)
}

/// The appendix identity battery: every tag at `samples.identities` points.
pub fn run_identity_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let torus = cfg.torus()?;
    let mut sampler = TorusSampler::new(cfg.seed, 90);
    let nu = sampler.couplings();
    let nu_bar = sampler.couplings();
    let mut out = Vec::new();
    for &id in IdentityId::all() {
        let rec = if id.needs_couplings() {
            evaluate_v_identity(id, cfg.samples.identities, cfg.seed, &nu, &nu_bar, &torus)
        } else {
            verify_identity(id, cfg.samples.identities, cfg.seed, &torus)
        };
        out.push(rec);
    }
    Ok(out)
}

/// Lax-equation residuals for the four flows of the acceptance gate.
pub fn run_lax_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let params = cfg.model_params()?;
    let mut rec = Recorder::new("lax", cfg.seed, Some(digest_of(cfg)));
    for flow in [FlowId::Vd8, FlowId::Vd4First, FlowId::Vd4Second] {
        let t0 = Instant::now();
        let mut s = TorusSampler::new(cfg.seed, 100 + flow as u64);
        let counts = run_samples(cfg.samples.lax, || {
            let z = s.cell_point(&params.torus);
            let state = draw_state(&mut s, &params);
            state.require_pole_distant(&params.torus, 1e-3)?;
            lax_residual(flow, z, &state, &params)
        })?;
        rec.push(flow.tag(), counts, cfg.tolerances.lax, t0);
    }
    // gyrostat Lax residual, exact time derivative
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 110);
    let gp = GyrostatParams {
        lambda: [
            crate::config::from_pair(cfg.rho_plus[0]),
            crate::config::from_pair(cfg.rho_plus[1]),
            crate::config::from_pair(cfg.rho_plus[2]),
        ],
        c: crate::config::from_pair(cfg.c),
        torus: params.torus.clone(),
    };
    let counts = run_samples(cfg.samples.lax, || {
        let z = s.cell_point(&params.torus);
        let spin = draw_spin(&mut s);
        lax_residual_zhv(z, &spin, &gp)
    })?;
    rec.push("gyrostat", counts, cfg.tolerances.lax, t0);

    // trace of the two-factor Lax matrix minus the Hamiltonian is constant
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 111);
    let z = s.cell_point(&params.torus);
    let base_state = draw_state(&mut s, &params);
    let base = lax_chalykh(z, &base_state, &params)?.trace()
        - hamiltonian(FlowId::Vd8, &base_state, &params)?;
    let counts = run_samples(cfg.samples.lax, || {
        let state = draw_state(&mut s, &params);
        let d = lax_chalykh(z, &state, &params)?.trace()
            - hamiltonian(FlowId::Vd8, &state, &params)?;
        Ok(rel_residual(d, base))
    })?;
    rec.push("trace-constant", counts, 1e-9, t0);

    // det of the symmetric factor against its coupling expression
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 112);
    let nb = params.nu.dual();
    let counts = run_samples(cfg.samples.lax, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        let l = lax_factor(z, &state, params.eta, &params.nu, params.c, &params.torus)?;
        let mut want = c64(0.0, 0.0);
        for a in 0..4 {
            want += nb.nu[a]
                * nb.nu[a]
                * (crate::special::weierstrass_p(
                    params.eta + params.torus.omega(a),
                    &params.torus,
                    false,
                )? - crate::special::weierstrass_p(
                    z + params.torus.omega(a),
                    &params.torus,
                    false,
                )?);
        }
        Ok(rel_residual(l.det(), want))
    })?;
    rec.push("factor-determinant", counts, cfg.tolerances.identities, t0);
    Ok(rec.records)
}

/// Reflection equations and algebraic structure of the gyrostat.
pub fn run_gyrostat_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let torus = cfg.torus()?;
    let c = crate::config::from_pair(cfg.c);
    let mut rec = Recorder::new("gyrostat", cfg.seed, Some(digest_of(cfg)));

    for (tag, kind) in [
        ("reflection-linear", BracketKind::Linear),
        ("reflection-quadratic", BracketKind::Quadratic),
    ] {
        let t0 = Instant::now();
        let mut s = TorusSampler::new(cfg.seed, 120 + matches!(kind, BracketKind::Quadratic) as u64);
        let counts = run_samples(cfg.samples.reflection, || {
            let z = s.cell_point(&torus);
            let w = s.cell_point(&torus);
            torus.require_distant(z - w, 1e-3)?;
            torus.require_distant(z + w, 1e-3)?;
            let spin = draw_spin(&mut s);
            let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
            let gp = GyrostatParams { lambda, c, torus: torus.clone() };
            reflection_residual(kind, z, w, &spin, &gp, true)
        })?;
        rec.push(tag, counts, cfg.tolerances.reflection, t0);
    }

    // degenerate spin (1,0,0,0): the quadratic equation becomes the constant
    // K-matrix reflection equation
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 122);
    let kspin = SpinState::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
    let counts = run_samples(cfg.samples.reflection, || {
        let z = s.cell_point(&torus);
        let w = s.cell_point(&torus);
        torus.require_distant(z - w, 1e-3)?;
        torus.require_distant(z + w, 1e-3)?;
        let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
        let gp = GyrostatParams { lambda, c, torus: torus.clone() };
        reflection_residual(BracketKind::Quadratic, z, w, &kspin, &gp, true)
    })?;
    rec.push("reflection-k-degenerate", counts, cfg.tolerances.reflection, t0);

    // Casimirs commute with every generator (Leibniz assembly)
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 123);
    let counts = run_samples(cfg.samples.reflection, || {
        let spin = draw_spin(&mut s);
        let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
        let gp = GyrostatParams { lambda, c, torus: torus.clone() };
        let mut worst = 0.0f64;
        for a in 0..4 {
            let mut c1b = c64(0.0, 0.0);
            let mut c2b = 2.0 * spin.s[0] * bracket(BracketKind::Quadratic, 0, a, &spin, &gp);
            for k in 1..=3 {
                let br = bracket(BracketKind::Quadratic, k, a, &spin, &gp);
                c1b += 2.0 * spin.s[k] * br;
                c2b += (2.0 * spin.s[k] * torus.wp_half_period(k) + 2.0 * gp.lambda_of(k)) * br;
            }
            worst = worst.max(c1b.norm()).max(c2b.norm());
        }
        Ok(worst)
    })?;
    rec.push("casimir-brackets", counts, 1e-12, t0);

    // Jacobi identity for the quadratic table
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 124);
    let counts = run_samples(cfg.samples.reflection, || {
        let spin = draw_spin(&mut s);
        let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
        let gp = GyrostatParams { lambda, c, torus: torus.clone() };
        let grad = |b: usize, g: usize, d: usize, at: &SpinState| -> C64 {
            let h = 0.5;
            let mut plus = *at;
            plus.s[d] += c64(h, 0.0);
            let mut minus = *at;
            minus.s[d] -= c64(h, 0.0);
            (bracket(BracketKind::Quadratic, b, g, &plus, &gp)
                - bracket(BracketKind::Quadratic, b, g, &minus, &gp))
                / c64(2.0 * h, 0.0)
        };
        let mut worst = 0.0f64;
        for (a, b, g) in [(0usize, 1usize, 2usize), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            let mut total = c64(0.0, 0.0);
            for (x, y, z) in [(a, b, g), (b, g, a), (g, a, b)] {
                for d in 0..4 {
                    total += grad(y, z, d, &spin) * bracket(BracketKind::Quadratic, x, d, &spin, &gp);
                }
            }
            worst = worst.max(total.norm());
        }
        Ok(worst)
    })?;
    rec.push("jacobi-quadratic", counts, cfg.tolerances.identities, t0);

    // quarter trace of L^2 with its 1/phi^2 tail subtracted
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 125);
    let counts = run_samples(cfg.samples.reflection, || {
        let z = s.cell_point(&torus);
        let spin = draw_spin(&mut s);
        let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
        let gp = GyrostatParams { lambda, c, torus: torus.clone() };
        let l = crate::gyrostat::lax_zhv(z, &spin, &gp, false)?;
        let mut tail = c64(0.0, 0.0);
        for k in 1..=3 {
            let f = crate::special::varphi1(k, z, &torus)?;
            tail += gp.lambda_of(k) * gp.lambda_of(k) / (f * f);
        }
        let lhs = 0.25 * (l * l).trace() - 0.5 * tail;
        let c_half =
            0.5 * (spin.s[1] * spin.s[1] + spin.s[2] * spin.s[2] + spin.s[3] * spin.s[3]);
        let rhs = c_half * crate::special::weierstrass_p(z, &torus, false)?
            + crate::gyrostat::hamiltonian_zhv(&spin, &gp);
        Ok(rel_residual(lhs, rhs))
    })?;
    rec.push("quarter-trace", counts, cfg.tolerances.identities, t0);

    // det L generates the Casimirs (with the subtracted tail)
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 126);
    let counts = run_samples(cfg.samples.reflection, || {
        let spin = draw_spin(&mut s);
        let lambda = [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)];
        let gp = GyrostatParams { lambda, c, torus: torus.clone() };
        let (c1, c2) = casimirs(&spin, &gp);
        let z1 = s.cell_point(&torus);
        let z2 = s.cell_point(&torus);
        let det_clean = |z: C64| -> Result<C64> {
            let l = crate::gyrostat::lax_zhv(z, &spin, &gp, true)?;
            let mut tail = c64(0.0, 0.0);
            for k in 1..=3 {
                let f = crate::special::varphi1(k, z, &torus)?;
                tail += gp.lambda_of(k) * gp.lambda_of(k) / (f * f);
            }
            Ok(l.det() + tail)
        };
        let d1 = det_clean(z1)?;
        let d2 = det_clean(z2)?;
        let wp1 = crate::special::weierstrass_p(z1, &torus, false)?;
        let wp2 = crate::special::weierstrass_p(z2, &torus, false)?;
        if (wp1 - wp2).norm() < 1e-6 {
            return Err(EllaxError::NearPole { arg: z1 - z2, dist: 0.0 });
        }
        let fit_c1 = (d2 - d1) / (wp1 - wp2);
        let fit_c2 = d1 + wp1 * fit_c1;
        Ok(rel_residual(fit_c1, c1).max(rel_residual(fit_c2, c2)))
    })?;
    rec.push("determinant-casimirs", counts, cfg.tolerances.identities, t0);
    Ok(rec.records)
}

/// Gauge equivalences: the three theorem-level maps plus the generic
/// conjugation cross-check.
pub fn run_gauge_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let params = cfg.model_params()?;
    let mut rec = Recorder::new("gauge", cfg.seed, Some(digest_of(cfg)));

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 130);
    let counts = run_samples(cfg.samples.theorem1, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-3)?;
        verify_theorem1(z, &state, &params)
    })?;
    rec.push("theorem1", counts, cfg.tolerances.theorem1, t0);

    // trace/det invariance under the gauge map
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 131);
    let counts = run_samples(cfg.samples.theorem1, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        let xi = xi_matrix(z, state.q, &params.torus, c64(0.0, 0.0))?;
        let l = lax_factor(z, &state, params.eta, &params.nu, params.c, &params.torus)?;
        let img = xi * l * xi.inverse()?;
        Ok(rel_residual(l.trace(), img.trace()).max(rel_residual(l.det(), img.det())))
    })?;
    rec.push("gauge-invariance", counts, cfg.tolerances.gauge_invariance, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 132);
    let mut bracket_worst = 0.0f64;
    let mut casimir_worst = 0.0f64;
    for _ in 0..cfg.samples.theorem2_states {
        let state = draw_state(&mut s, &params);
        if state.require_pole_distant(&params.torus, 1e-2).is_err() {
            continue;
        }
        let check = verify_theorem2(&state, &params)?;
        bracket_worst = bracket_worst.max(check.bracket_residual);
        casimir_worst = casimir_worst.max(check.casimir_residual);
    }
    let n = cfg.samples.theorem2_states as u64;
    rec.push("theorem2-brackets", (n, n, bracket_worst), cfg.tolerances.theorem2_brackets, t0);
    let t0 = Instant::now();
    rec.push("theorem2-casimirs", (n, n, casimir_worst), cfg.tolerances.theorem2_casimirs, t0);

    // finite-difference convergence certificate (pass iff ratio >= 8,
    // recorded as 8/ratio <= 1)
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 133);
    let state = draw_state(&mut s, &params);
    let ratio = theorem2_convergence_ratio(&state, &params)?;
    rec.push("theorem2-convergence", (1, 1, 8.0 / ratio), 1.0, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 134);
    let counts = run_samples(cfg.samples.theorem3, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-3)?;
        verify_coupled(z, &state, &params)
    })?;
    rec.push("coupled-gyrostats", counts, cfg.tolerances.theorem1, t0);

    for (tag, side) in [("theorem3-l", LaxSide::L), ("theorem3-lbar", LaxSide::LBar)] {
        let t0 = Instant::now();
        let mut s = TorusSampler::new(cfg.seed, 135 + matches!(side, LaxSide::LBar) as u64);
        let counts = run_samples(cfg.samples.theorem3, || {
            let z = s.cell_point(&params.torus);
            let state = draw_state(&mut s, &params);
            state.require_pole_distant(&params.torus, 1e-3)?;
            verify_theorem3(z, &state, &params, side)
        })?;
        rec.push(tag, counts, cfg.tolerances.theorem3, t0);
    }

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 137);
    let counts = run_samples(cfg.samples.theorem3, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-3)?;
        verify_inozemtsev_gauge(z, &state, &params.nu, &params.torus)
    })?;
    rec.push("inozemtsev-gauge", counts, cfg.tolerances.inozemtsev_gauge, t0);

    // numeric linear brackets of the non-relativistic map
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 138);
    let counts = run_samples(3, || {
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-2)?;
        let t = &params.torus;
        let nu = &params.nu;
        let sfn = |a: usize| {
            move |st: &PhaseState| -> Result<C64> {
                Ok(crate::gauge::spin_from_phase_nonrel(st, nu, t)?.0.s[a])
            }
        };
        let (spin, _) = crate::gauge::spin_from_phase_nonrel(&state, nu, t)?;
        let mut worst = 0.0f64;
        for (a, b, g) in [(1usize, 2usize, 3usize), (2, 3, 1), (3, 1, 2)] {
            let num = numeric_poisson_bracket(sfn(a), sfn(b), &state, FdOptions::default())?;
            worst = worst.max(rel_residual(num, -C64::i() * spin.s[g]));
        }
        Ok(worst)
    })?;
    rec.push("nonrel-linear-brackets", counts, cfg.tolerances.theorem2_brackets, t0);

    // generic conjugation closed form against direct multiplication
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 139);
    let counts = run_samples(cfg.samples.theorem3, || {
        let z = s.cell_point(&params.torus);
        let q = s.cell_point(&params.torus);
        params.torus.require_distant(2.0 * q, 1e-3)?;
        let (ap, bp, am, bm) =
            (s.box_point(1.0), s.box_point(1.0), s.box_point(1.0), s.box_point(1.0));
        let a = Matrix2::new(ap, bp, bm, am);
        let xi = xi_matrix(z, q, &params.torus, c64(0.0, 0.0))?;
        let direct = xi * a * xi.inverse()?;
        let closed = xi_conjugation_closed_form(z, q, ap, bp, am, bm, &params.torus)?;
        Ok(crate::report::rel_matrix_residual(&direct, &closed))
    })?;
    rec.push("xi-conjugation-closed-form", counts, 1e-11, t0);
    Ok(rec.records)
}

/// XYZ chain: generator brackets, K-matrices, transfer matrix, van Diejen
/// match.
pub fn run_xyz_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let params = cfg.model_params()?;
    let torus = &params.torus;
    let c = params.c;
    let eta = params.eta;
    let boundary = cfg.boundary();
    let mut rec = Recorder::new("xyz", cfg.seed, Some(digest_of(cfg)));

    // numeric standard-generator brackets against the Sklyanin table
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 140);
    let counts = run_samples(3, || {
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-2)?;
        let sfn = |a: usize| {
            move |st: &PhaseState| -> Result<C64> {
                crate::xyz::sklyanin_generator(GeneratorStyle::Standard, a, st, eta, c, torus)
            }
        };
        let gens = generators(GeneratorStyle::Standard, &state, eta, c, torus)?;
        let spin = SpinState { s: gens };
        let gp = GyrostatParams { lambda: [c64(0.0, 0.0); 3], c, torus: torus.clone() };
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let num =
                    numeric_poisson_bracket(sfn(a), sfn(b), &state, FdOptions::default())?;
                let exact = bracket(BracketKind::Quadratic, a, b, &spin, &gp);
                worst = worst.max(rel_residual(num, exact));
            }
        }
        Ok(worst)
    })?;
    rec.push("standard-generator-brackets", counts, cfg.tolerances.theorem2_brackets, t0);

    // bold-generator brackets against the Eisenstein-coefficient table
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 141);
    let i_consts = bold_bracket_coefficients(eta, torus)?;
    let counts = run_samples(3, || {
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-2)?;
        let sfn = |a: usize| {
            move |st: &PhaseState| -> Result<C64> {
                crate::xyz::sklyanin_generator(GeneratorStyle::Bold, a, st, eta, c, torus)
            }
        };
        let gens = generators(GeneratorStyle::Bold, &state, eta, c, torus)?;
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let num =
                    numeric_poisson_bracket(sfn(a), sfn(b), &state, FdOptions::default())?;
                let exact = bold_bracket_exact(a, b, &gens, &i_consts, c);
                worst = worst.max(rel_residual(num, exact));
            }
        }
        Ok(worst)
    })?;
    rec.push("bold-generator-brackets", counts, cfg.tolerances.theorem2_brackets, t0);

    // the quadratic r-matrix relation for the XYZ Lax matrix
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 142);
    let counts = run_samples(2, || {
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-2)?;
        let z = s.cell_point(torus);
        let w = s.cell_point(torus);
        torus.require_distant(z - w, 1e-3)?;
        let sfn = |a: usize| {
            move |st: &PhaseState| -> Result<C64> {
                crate::xyz::sklyanin_generator(GeneratorStyle::Standard, a, st, eta, c, torus)
            }
        };
        let mut lhs = Matrix4::zero();
        for a in 0..4 {
            for b in 0..4 {
                let num =
                    numeric_poisson_bracket(sfn(a), sfn(b), &state, FdOptions::default())?;
                let ga = if a == 0 { c64(1.0, 0.0) } else { crate::special::varphi1(a, z, torus)? };
                let gb = if b == 0 { c64(1.0, 0.0) } else { crate::special::varphi1(b, w, torus)? };
                let ba = if a == 0 { pauli(0) } else { sigma_flipped(a) };
                let bb = if b == 0 { pauli(0) } else { sigma_flipped(b) };
                lhs = lhs + ba.kron(&bb).scale(num * ga * gb);
            }
        }
        let l1 = crate::xyz::lax_xyz(z, &state, eta, c, torus)?.kron(&pauli(0));
        let l2 = pauli(0).kron(&crate::xyz::lax_xyz(w, &state, eta, c, torus)?);
        let rhs = (l1 * l2).commutator(&r_matrix(z - w, torus)?).scale(1.0 / c);
        Ok(rel_matrix4_residual(&lhs, &rhs))
    })?;
    rec.push("xyz-r-matrix-relation", counts, cfg.tolerances.theorem2_brackets, t0);

    // constant K-matrices solve the reflection equation
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 143);
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(torus);
        let w = s.cell_point(torus);
        torus.require_distant(z - w, 1e-3)?;
        torus.require_distant(z + w, 1e-3)?;
        let b = crate::xyz::BoundaryParams {
            rho_plus: [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)],
            rho_minus: [s.box_point(0.8), s.box_point(0.8), s.box_point(0.8)],
        };
        let mut worst = 0.0f64;
        for sign in [KSign::Plus, KSign::Minus] {
            let k1 = k_matrix(sign, z, &b, torus)?.kron(&pauli(0));
            let k2 = pauli(0).kron(&k_matrix(sign, w, &b, torus)?);
            let lhs = (k1.clone() * k2.clone()).commutator(&r_matrix(z - w, torus)?)
                + k2.clone() * r_matrix(z + w, torus)? * k1.clone()
                - k1 * r_matrix(z + w, torus)? * k2;
            let scale = 1.0f64.max(lhs.max_norm());
            worst = worst.max(lhs.max_norm() / scale.max(1.0));
        }
        Ok(worst)
    })?;
    rec.push("k-matrix-reflection", counts, cfg.tolerances.reflection, t0);

    // the two printed K-matrix forms agree after the constant conversion
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 144);
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(torus);
        let mut worst = 0.0f64;
        for sign in [KSign::Plus, KSign::Minus] {
            let a = k_matrix(sign, z, &boundary, torus)?;
            let b = k_matrix_shifted_form(sign, z, &boundary, torus)?;
            worst = worst.max(crate::report::rel_matrix_residual(&a, &b));
        }
        Ok(worst)
    })?;
    rec.push("k-matrix-form-equivalence", counts, cfg.tolerances.gauge_invariance, t0);

    // transfer matrix closed form and evenness
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 145);
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-3)?;
        let direct = transfer_matrix(z, &state, eta, c, &boundary, torus)?;
        let gens = generators(GeneratorStyle::Standard, &state, eta, c, torus)?;
        let closed = transfer_matrix_closed(z, &gens, &boundary, torus)?;
        Ok(rel_residual(direct, closed))
    })?;
    rec.push("transfer-closed-form", counts, cfg.tolerances.transfer, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 146);
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-3)?;
        let a = transfer_matrix(z, &state, eta, c, &boundary, torus)?;
        let b = transfer_matrix(-z, &state, eta, c, &boundary, torus)?;
        Ok(rel_residual(a, b))
    })?;
    rec.push("transfer-evenness", counts, cfg.tolerances.identities, t0);

    // {t(z), t(w)} = 0 numerically
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 147);
    let counts = run_samples(2, || {
        let z = s.cell_point(torus);
        let w = s.cell_point(torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-2)?;
        let tz = |st: &PhaseState| transfer_matrix(z, st, eta, c, &boundary, torus);
        let tw = |st: &PhaseState| transfer_matrix(w, st, eta, c, &boundary, torus);
        let br = numeric_poisson_bracket(tz, tw, &state, FdOptions::default())?;
        let scale = 1.0f64
            .max(transfer_matrix(z, &state, eta, c, &boundary, torus)?.norm())
            .max(transfer_matrix(w, &state, eta, c, &boundary, torus)?.norm());
        Ok(br.norm() / scale)
    })?;
    rec.push("transfer-involution", counts, cfg.tolerances.theorem2_brackets, t0);

    // H1 as a generator combination
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 148);
    let nb = params.nu.dual();
    let d = crate::xyz::d_constants(eta, torus)?;
    let counts = run_samples(cfg.samples.xyz, || {
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(torus, 1e-3)?;
        let gens = generators(GeneratorStyle::Standard, &state, eta, c, torus)?;
        let mut combo = c64(0.0, 0.0);
        for a in 0..4 {
            combo += nb.nu[a] / d[a] * gens[a];
        }
        let h1 = hamiltonian(FlowId::Vd4First, &state, &params)?;
        Ok(rel_residual(combo, h1))
    })?;
    rec.push("h1-generator-combination", counts, 1e-11, t0);

    // van Diejen match at eta_bar = eta, plus constancy of H1 H1bar - H8
    let t0 = Instant::now();
    let matched = ModelParams { eta_bar: params.eta, ..params.clone() };
    let mut s = TorusSampler::new(cfg.seed, 149);
    let counts = run_samples(cfg.samples.match_states, || {
        let state = draw_state(&mut s, &matched);
        state.require_pole_distant(torus, 1e-3)?;
        vd_match_residual(&state, &matched)
    })?;
    rec.push("vd-match", counts, cfg.tolerances.vd_match, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 150);
    let barred = ModelParams { eta: matched.eta_bar, nu: matched.nu_bar, ..matched.clone() };
    let state0 = draw_state(&mut s, &matched);
    let base = hamiltonian(FlowId::Vd4First, &state0, &matched)?
        * hamiltonian(FlowId::Vd4First, &state0, &barred)?
        - hamiltonian(FlowId::Vd8, &state0, &matched)?;
    let counts = run_samples(cfg.samples.match_states, || {
        let state = draw_state(&mut s, &matched);
        state.require_pole_distant(torus, 1e-3)?;
        let d = hamiltonian(FlowId::Vd4First, &state, &matched)?
            * hamiltonian(FlowId::Vd4First, &state, &barred)?
            - hamiltonian(FlowId::Vd8, &state, &matched)?;
        Ok(rel_residual(d, base))
    })?;
    rec.push("h1h1bar-h8-constancy", counts, cfg.tolerances.vd_match, t0);
    Ok(rec.records)
}

/// Conservation along RK4 trajectories (the acceptance drift gate).
pub fn run_conservation_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let params = cfg.model_params()?;
    let probe = cfg.probe();
    let mut rec = Recorder::new("conservation", cfg.seed, Some(digest_of(cfg)));
    let mut s = TorusSampler::new(cfg.seed, 160);
    let state0 = PhaseState::new(s.box_point(0.2), s.cell_point(&params.torus));

    // The fixed-step integrator must resolve the flow, so the drift gate
    // runs at coupling scales normalized to an O(1) initial vector field;
    // the scaling is deterministic in the configured couplings.
    let tamed = |scale: f64| -> ModelParams {
        let sc = c64(scale, 0.0);
        ModelParams {
            nu: CouplingSet::new(params.nu.nu.map(|x| x * sc)),
            nu_bar: CouplingSet::new(params.nu_bar.nu.map(|x| x * sc)),
            ..params.clone()
        }
    };
    const TARGET_SPEED: f64 = 0.4;
    for (flow, coupling_power, with_det) in [
        (FlowId::Vd4First, 1.0, true),
        (FlowId::Vd8, 2.0, true),
        // det of the probe matrix is not an invariant of the printed
        // non-relativistic Hamiltonian; only H is gated for that flow
        (FlowId::Inoz, 2.0, false),
    ] {
        let t0 = Instant::now();
        let (qd, pd) = crate::vandiejen::equations_of_motion(flow, &state0, &params)?;
        let speed = qd.norm().max(pd.norm()).max(1e-3);
        let scale = (TARGET_SPEED / speed).powf(1.0 / coupling_power).min(1.0);
        let run = tamed(scale);
        let traj = integrate(flow, &state0, &run, cfg.dt, cfg.steps, probe)?;
        let n = traj.states.len() as u64;
        let drift_h = Trajectory::max_drift(&traj.hamiltonians);
        let drift_det = if with_det { Trajectory::max_drift(&traj.probe_dets) } else { 0.0 };
        let aborted = traj.aborted_at.is_some();
        let worst = if aborted { f64::INFINITY } else { drift_h.max(drift_det) };
        rec.push(&format!("{}-drift", flow.tag()), (n, n, worst), cfg.tolerances.conservation, t0);
    }

    let t0 = Instant::now();
    let mut gp = GyrostatParams {
        lambda: [s.box_point(0.3), s.box_point(0.3), s.box_point(0.3)],
        c: params.c,
        torus: params.torus.clone(),
    };
    let mut spin0 = SpinState::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.5, 0.0), c64(0.25, 0.0));
    // same speed normalization for the polynomial spin flow
    let ds = crate::gyrostat::gyrostat_eom(&spin0, &gp);
    let speed = ds.s.iter().fold(0.0f64, |m, x| m.max(x.norm())).max(1e-3);
    let sc = c64((TARGET_SPEED / speed).sqrt().min(1.0), 0.0);
    for x in spin0.s.iter_mut() {
        *x *= sc;
    }
    for l in gp.lambda.iter_mut() {
        *l *= sc;
    }
    let traj = integrate_gyrostat(&spin0, &gp, cfg.dt, cfg.steps, probe)?;
    let n = traj.states.len() as u64;
    let worst = Trajectory::max_drift(&traj.casimir1)
        .max(Trajectory::max_drift(&traj.casimir2))
        .max(Trajectory::max_drift(&traj.hamiltonians))
        .max(Trajectory::max_drift(&traj.probe_dets));
    rec.push("gyrostat-drift", (n, n, worst), cfg.tolerances.conservation, t0);
    Ok(rec.records)
}

/// Limit and reduction checks: the non-relativistic remainder scaling and
/// the Ruijsenaars-Schneider specialization.
pub fn run_limits_suite(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let params = cfg.model_params()?;
    let mut rec = Recorder::new("limits", cfg.seed, Some(digest_of(cfg)));

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 170);
    let state = PhaseState::new(s.box_point(0.5), s.cell_point(&params.torus));
    let z = s.cell_point(&params.torus);
    let table = inozemtsev_limit_check(z, &state, &params, &[100.0, 200.0, 1000.0, 2000.0])?;
    // pass iff both halving ratios sit in [0.4, 0.6]
    let r1 = table[1].1 / table[0].1;
    let r2 = table[3].1 / table[2].1;
    let worst = (r1 - 0.5).abs().max((r2 - 0.5).abs());
    rec.push("inozemtsev-remainder-halving", (2, 2, worst), 0.1, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 171);
    let unit_dual =
        CouplingSet::new([c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).dual();
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-3)?;
        let rs = rs_lax_reduced(z, &state, &params)?;
        let l = lax_factor(z, &state, params.eta, &unit_dual, params.c / 2.0, &params.torus)?;
        Ok(crate::report::rel_matrix_residual(&rs, &l))
    })?;
    rec.push("rs-reduction", counts, cfg.tolerances.gauge_invariance, t0);

    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 172);
    let counts = run_samples(cfg.samples.xyz, || {
        let z = s.cell_point(&params.torus);
        let state = draw_state(&mut s, &params);
        state.require_pole_distant(&params.torus, 1e-3)?;
        let chal = lax_chalykh(z, &state, &params)?;
        let prod = lax_product(z, &state, &params)?;
        let e = (state.p / (4.0 * params.c)).exp();
        let d = Matrix2::diag(1.0 / e, -e);
        let conj = d * prod * d.inverse()?;
        Ok(crate::report::rel_matrix_residual(&chal, &conj))
    })?;
    rec.push("chalykh-symmetric-conjugation", counts, cfg.tolerances.gauge_invariance, t0);
    Ok(rec.records)
}

/// Full verification battery (what `verify` runs).
pub fn run_all(cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    out.extend(run_identity_suite(cfg)?);
    out.extend(run_lax_suite(cfg)?);
    out.extend(run_gyrostat_suite(cfg)?);
    out.extend(run_gauge_suite(cfg)?);
    out.extend(run_xyz_suite(cfg)?);
    out.extend(run_conservation_suite(cfg)?);
    out.extend(run_limits_suite(cfg)?);
    Ok(out)
}

/// One numeric-vs-exact bracket table entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketEntry {
    pub a: usize,
    pub b: usize,
    pub numeric: [f64; 2],
    pub exact: [f64; 2],
    pub residual: f64,
}

/// One mixed-bracket value {S_a, Sbar_b}; reported, never asserted (the
/// algebra has no known closed form for these).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixedEntry {
    pub a: usize,
    pub b: usize,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoissonReport {
    pub records: Vec<VerificationRecord>,
    pub standard_brackets: Vec<BracketEntry>,
    pub bold_brackets: Vec<BracketEntry>,
    pub mixed_brackets: Vec<MixedEntry>,
}

/// The bracket tables and Poisson-map checks (what `poisson` emits).
pub fn poisson_report(cfg: &RunConfig) -> Result<PoissonReport> {
    let params = cfg.model_params()?;
    let torus = &params.torus;
    let mut records = Vec::new();

    // {p, q} = 1 smoke entry
    let t0 = Instant::now();
    let mut s = TorusSampler::new(cfg.seed, 180);
    let state = draw_state(&mut s, &params);
    let pq = numeric_poisson_bracket(
        |st: &PhaseState| Ok(st.p),
        |st: &PhaseState| Ok(st.q),
        &state,
        FdOptions::default(),
    )?;
    let mut rec = VerificationRecord::new(
        "poisson",
        "canonical-pq",
        1,
        1,
        rel_residual(pq, c64(1.0, 0.0)),
        1e-10,
        cfg.seed,
    );
    rec.wall_time_ms = t0.elapsed().as_secs_f64() * 1e3;
    records.push(rec);

    // theorem-2 map at one state (the suite-level record aggregates more)
    let t0 = Instant::now();
    let check = verify_theorem2(&state, &params)?;
    let mut rec = VerificationRecord::new(
        "poisson",
        "theorem2-brackets",
        16,
        16,
        check.bracket_residual,
        cfg.tolerances.theorem2_brackets,
        cfg.seed,
    );
    rec.wall_time_ms = t0.elapsed().as_secs_f64() * 1e3;
    records.push(rec);

    // standard and bold generator tables
    let eta = params.eta;
    let c = params.c;
    let sfn_std = |a: usize| {
        move |st: &PhaseState| -> Result<C64> {
            crate::xyz::sklyanin_generator(GeneratorStyle::Standard, a, st, eta, c, torus)
        }
    };
    let sfn_bold = |a: usize| {
        move |st: &PhaseState| -> Result<C64> {
            crate::xyz::sklyanin_generator(GeneratorStyle::Bold, a, st, eta, c, torus)
        }
    };
    let gens_std = generators(GeneratorStyle::Standard, &state, eta, c, torus)?;
    let gens_bold = generators(GeneratorStyle::Bold, &state, eta, c, torus)?;
    let gp0 = GyrostatParams { lambda: [c64(0.0, 0.0); 3], c, torus: torus.clone() };
    let i_consts = bold_bracket_coefficients(eta, torus)?;
    let mut standard = Vec::new();
    let mut bold = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let num = numeric_poisson_bracket(sfn_std(a), sfn_std(b), &state, FdOptions::default())?;
            let exact = bracket(BracketKind::Quadratic, a, b, &SpinState { s: gens_std }, &gp0);
            standard.push(BracketEntry {
                a,
                b,
                numeric: [num.re, num.im],
                exact: [exact.re, exact.im],
                residual: rel_residual(num, exact),
            });
            let numb =
                numeric_poisson_bracket(sfn_bold(a), sfn_bold(b), &state, FdOptions::default())?;
            let exactb = bold_bracket_exact(a, b, &gens_bold, &i_consts, c);
            bold.push(BracketEntry {
                a,
                b,
                numeric: [numb.re, numb.im],
                exact: [exactb.re, exactb.im],
                residual: rel_residual(numb, exactb),
            });
        }
    }
    let worst_std = standard.iter().map(|e| e.residual).fold(0.0, f64::max);
    let worst_bold = bold.iter().map(|e| e.residual).fold(0.0, f64::max);
    records.push(VerificationRecord::new(
        "poisson",
        "standard-generator-table",
        16,
        16,
        worst_std,
        cfg.tolerances.theorem2_brackets,
        cfg.seed,
    ));
    records.push(VerificationRecord::new(
        "poisson",
        "bold-generator-table",
        16,
        16,
        worst_bold,
        cfg.tolerances.theorem2_brackets,
        cfg.seed,
    ));

    // mixed brackets: reported unasserted
    let table = mixed_brackets(&state, &params)?;
    let mut mixed = Vec::new();
    for (a, row) in table.iter().enumerate() {
        for (b, val) in row.iter().enumerate() {
            mixed.push(MixedEntry { a, b, value: [val.re, val.im] });
        }
    }
    let _ = boundary_from_couplings(&params.nu, &params.nu_bar, params.eta, torus);
    Ok(PoissonReport {
        records,
        standard_brackets: standard,
        bold_brackets: bold,
        mixed_brackets: mixed,
    })
}
