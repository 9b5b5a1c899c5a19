//! Run configuration: one JSON document drives every suite. Complex numbers
//! serialize as two-element [re, im] arrays throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EllaxError, Result};
use crate::potential::CouplingSet;
use crate::sampling::TorusSampler;
use crate::torus::Torus;
use crate::vandiejen::ModelParams;
use crate::xyz::BoundaryParams;

type C64 = Complex64;

pub fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SampleCounts {
    pub identities: usize,
    pub lax: usize,
    pub theorem1: usize,
    pub theorem2_states: usize,
    pub theorem3: usize,
    pub reflection: usize,
    pub xyz: usize,
    pub match_states: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            identities: 100,
            lax: 50,
            theorem1: 100,
            theorem2_states: 10,
            theorem3: 50,
            reflection: 50,
            xyz: 50,
            match_states: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Tolerances {
    pub identities: f64,
    pub lax: f64,
    pub theorem1: f64,
    pub gauge_invariance: f64,
    pub theorem2_brackets: f64,
    pub theorem2_casimirs: f64,
    pub theorem3: f64,
    pub reflection: f64,
    pub transfer: f64,
    pub vd_match: f64,
    pub conservation: f64,
    pub inozemtsev_gauge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identities: 1e-10,
            lax: 1e-7,
            theorem1: 1e-10,
            gauge_invariance: 1e-12,
            theorem2_brackets: 1e-6,
            theorem2_casimirs: 1e-9,
            theorem3: 1e-10,
            reflection: 1e-10,
            transfer: 1e-9,
            vd_match: 1e-9,
            conservation: 1e-8,
            inozemtsev_gauge: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub tau: [f64; 2],
    pub c: [f64; 2],
    pub eta: [f64; 2],
    pub eta_bar: [f64; 2],
    pub nu: [[f64; 2]; 4],
    pub nu_bar: [[f64; 2]; 4],
    pub rho_plus: [[f64; 2]; 3],
    pub rho_minus: [[f64; 2]; 3],
    pub seed: u64,
    pub probe_z: [f64; 2],
    pub dt: f64,
    pub steps: usize,
    /// Initial phase-space point for simulated flows.
    pub p0: [f64; 2],
    pub q0: [f64; 2],
    /// Initial spin and constant vector for the gyrostat flow.
    pub spin0: [[f64; 2]; 4],
    pub lambda: [[f64; 2]; 3],
    pub samples: SampleCounts,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        // Couplings and boundary constants are drawn once from the default
        // seed so "seed 42" fully determines the default document.
        let seed = 42u64;
        let mut sampler = TorusSampler::new(seed, 0);
        let nu = sampler.couplings();
        let nu_bar = sampler.couplings();
        let mut rho = [[0.0f64; 2]; 3];
        let mut rho_m = [[0.0f64; 2]; 3];
        for k in 0..3 {
            rho[k] = to_pair(sampler.box_point(0.8));
        }
        for k in 0..3 {
            rho_m[k] = to_pair(sampler.box_point(0.8));
        }
        RunConfig {
            tau: [0.0, 1.0],
            c: [1.3, 0.1],
            eta: [0.31, 0.12],
            eta_bar: [-0.22, 0.27],
            nu: nu.nu.map(to_pair),
            nu_bar: nu_bar.nu.map(to_pair),
            rho_plus: rho,
            rho_minus: rho_m,
            seed,
            probe_z: [0.17, 0.23],
            dt: 1e-3,
            steps: 1000,
            p0: [0.2, -0.1],
            q0: [-0.13, 0.23],
            spin0: [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [0.25, 0.0]],
            lambda: [[0.06, -0.03], [-0.09, 0.12], [0.18, 0.03]],
            samples: SampleCounts::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn torus(&self) -> Result<Torus> {
        Torus::new(from_pair(self.tau))
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let params = ModelParams {
            c: from_pair(self.c),
            eta: from_pair(self.eta),
            eta_bar: from_pair(self.eta_bar),
            nu: CouplingSet::new(self.nu.map(from_pair)),
            nu_bar: CouplingSet::new(self.nu_bar.map(from_pair)),
            torus: self.torus()?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn boundary(&self) -> BoundaryParams {
        BoundaryParams {
            rho_plus: self.rho_plus.map(from_pair),
            rho_minus: self.rho_minus.map(from_pair),
        }
    }

    pub fn probe(&self) -> C64 {
        from_pair(self.probe_z)
    }

    pub fn initial_state(&self) -> crate::vandiejen::PhaseState {
        crate::vandiejen::PhaseState::new(from_pair(self.p0), from_pair(self.q0))
    }

    pub fn initial_spin(&self) -> crate::gyrostat::SpinState {
        crate::gyrostat::SpinState { s: self.spin0.map(from_pair) }
    }

    pub fn gyrostat_params(&self) -> Result<crate::gyrostat::GyrostatParams> {
        Ok(crate::gyrostat::GyrostatParams {
            lambda: self.lambda.map(from_pair),
            c: from_pair(self.c),
            torus: self.torus()?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| EllaxError::Config(e.to_string()))?;
        cfg.torus()?;
        Ok(cfg)
    }

    /// Canonical serialization: field order is fixed by the struct, two-space
    /// pretty printing, trailing newline. Reparsing and reserializing a
    /// canonical document is byte-identical.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
