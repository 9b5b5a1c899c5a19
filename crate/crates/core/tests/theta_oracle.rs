//! Independent reference evaluation of the theta functions: plain bilateral
//! summation with a fixed 200-term range and compensated (Kahan) accumulation,
//! no argument reduction, no adaptive truncation. The production evaluator
//! must agree with this oracle to 1e-13 relative on a seeded grid.

use num_complex::Complex64;
use std::f64::consts::PI;

use ellax::sampling::TorusSampler;
use ellax::theta::{theta, theta_z_derivative};
use ellax::torus::Torus;

type C64 = Complex64;

const ORACLE_TERMS: i64 = 200;

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: C64,
    carry: C64,
}

impl Kahan {
    fn add(&mut self, x: C64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// theta_kind and derivatives by raw 200-term bilateral summation.
fn oracle_theta(kind: u8, z: C64, tau: C64, order: usize) -> C64 {
    let i = C64::i();
    let mut acc = Kahan::default();
    match kind {
        1 | 2 => {
            for k in -ORACLE_TERMS..=ORACLE_TERMS {
                let kk = k as f64;
                let half = kk + 0.5;
                let q_pow = (i * PI * tau * half * half).exp();
                let mu = i * PI * (2.0 * kk + 1.0);
                let phase = (mu * z).exp();
                let sign = if kind == 1 && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                let pre = if kind == 1 { -i } else { C64::new(1.0, 0.0) };
                acc.add(pre * sign * q_pow * mu.powu(order as u32) * phase);
            }
        }
        3 | 4 => {
            for k in -ORACLE_TERMS..=ORACLE_TERMS {
                let kk = k as f64;
                let q_pow = (i * PI * tau * kk * kk).exp();
                let mu = i * 2.0 * PI * kk;
                let phase = (mu * z).exp();
                let sign = if kind == 4 && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                let factor = if order == 0 { C64::new(1.0, 0.0) } else { mu.powu(order as u32) };
                acc.add(sign * q_pow * factor * phase);
            }
        }
        _ => unreachable!(),
    }
    acc.sum
}

#[test]
fn production_matches_oracle_on_seeded_grid() {
    // 1000 seeded points across two tori, all four kinds, orders 0..=3.
    for (sd, tau) in [(42u64, C64::new(0.0, 1.0)), (43u64, C64::new(0.13, 0.8))] {
        let torus = Torus::new(tau).unwrap();
        let mut sampler = TorusSampler::new(sd, 77);
        for _ in 0..500 {
            let z = sampler.cell_point(&torus);
            for kind in 1..=4u8 {
                for order in 0..=3usize {
                    let got = theta_z_derivative(kind, z, &torus, order).unwrap();
                    let want = oracle_theta(kind, z, tau, order);
                    let rel = (got - want).norm() / 1.0f64.max(want.norm());
                    assert!(
                        rel <= 1e-13,
                        "kind {kind} order {order} at z = {z}: {got} vs {want} (rel {rel:.2e})"
                    );
                }
            }
        }
    }
}

#[test]
fn oracle_reproduces_frozen_reference_value() {
    // theta3(0 | tau = i) from the high-truncation summation.
    let v = oracle_theta(3, C64::new(0.0, 0.0), C64::new(0.0, 1.0), 0);
    assert!((v.re - 1.0864348112133080146).abs() < 1e-15);
    let torus = Torus::new(C64::new(0.0, 1.0)).unwrap();
    let prod = theta(3, C64::new(0.0, 0.0), &torus).unwrap();
    assert!((prod - v).norm() < 1e-15);
}

#[test]
fn production_handles_shifted_arguments() {
    // the argument reduction must agree with raw summation well outside the
    // fundamental cell (where the oracle still converges at 200 terms)
    let tau = C64::new(0.13, 1.0);
    let torus = Torus::new(tau).unwrap();
    let base = C64::new(0.21, 0.17);
    for (m, n) in [(3.0, 2.0), (-4.0, 1.0), (2.0, -3.0)] {
        let z = base + C64::new(m, 0.0) + C64::new(n, 0.0) * tau;
        for kind in 1..=4u8 {
            let got = theta(kind, z, &torus).unwrap();
            let want = oracle_theta(kind, z, tau, 0);
            let rel = (got - want).norm() / 1.0f64.max(want.norm());
            assert!(rel < 1e-12, "kind {kind}, shift ({m},{n}): rel {rel:.2e}");
        }
    }
}
