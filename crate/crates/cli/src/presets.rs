//! Named scenarios. Each returns a complete config that flags may refine.

use std::f64::consts::{SQRT_2, TAU};

use crate::config::{Check, Initial, Mode, RunConfig};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> RunConfig,
}

impl Preset {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            preset: Some(self.name.to_string()),
            ..(self.build)()
        }
    }
}

pub fn presets() -> &'static [Preset] {
    &PRESETS
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

static PRESETS: [Preset; 7] = [
    Preset {
        name: "paper-blowup",
        description: "reduced run from z + √α; H^s norms grow like e^{(2s−1)√α t}",
        build: paper_blowup,
    },
    Preset {
        name: "small-data",
        description: "reduced run from 0.1(1 + z)/√2 at α = 1; discriminant stays far below √α, no growth",
        build: small_data,
    },
    Preset {
        name: "alpha-negative",
        description: "reduced run with α = −1 from (1, 1, 0.3); Sobolev norms stay bounded",
        build: alpha_negative,
    },
    Preset {
        name: "phase-rotation",
        description: "Galerkin run from u = z; the exact flow is e^{−it}z",
        build: phase_rotation,
    },
    Preset {
        name: "verify-identities",
        description: "Hankel and Toeplitz operator identities on random polynomial symbols",
        build: verify_identities,
    },
    Preset {
        name: "kronecker-rank",
        description: "rank of K_u equals the degree of a random rational symbol, k = 1..4",
        build: kronecker_rank,
    },
    Preset {
        name: "cascade-profile",
        description: "closed-form run from z + √α; dominant Fourier mode and spatial profile over time",
        build: cascade_profile,
    },
];

fn paper_blowup() -> RunConfig {
    RunConfig {
        mode: Mode::Reduced,
        alpha: 1.0,
        initial: Initial::GrowthDatum,
        t_end: 5.0,
        sample_every: 0.05,
        adaptive: true,
        adapt_tol: 1e-10,
        s_list: vec![0.5, 1.0, 1.5, 2.0],
        ..RunConfig::default()
    }
}

fn small_data() -> RunConfig {
    let a = 0.1 / SQRT_2;
    RunConfig {
        mode: Mode::Reduced,
        alpha: 1.0,
        initial: Initial::Rational {
            b: [a, 0.0],
            c: [a, 0.0],
            p: [0.0, 0.0],
        },
        t_end: 50.0,
        sample_every: 0.1,
        adaptive: true,
        adapt_tol: 1e-10,
        ..RunConfig::default()
    }
}

fn alpha_negative() -> RunConfig {
    RunConfig {
        mode: Mode::Reduced,
        alpha: -1.0,
        initial: Initial::Rational {
            b: [1.0, 0.0],
            c: [1.0, 0.0],
            p: [0.3, 0.0],
        },
        t_end: 100.0,
        sample_every: 0.1,
        adaptive: true,
        adapt_tol: 1e-10,
        ..RunConfig::default()
    }
}

fn phase_rotation() -> RunConfig {
    RunConfig {
        mode: Mode::Full,
        alpha: 1.0,
        initial: Initial::Rational {
            b: [0.0, 0.0],
            c: [1.0, 0.0],
            p: [0.0, 0.0],
        },
        n: 64,
        dt: 1e-3,
        t_end: TAU,
        sample_every: 0.05,
        spectral_section: Some(16),
        ..RunConfig::default()
    }
}

fn verify_identities() -> RunConfig {
    RunConfig {
        mode: Mode::Verify,
        n: 64,
        checks: vec![Check::Identities],
        trials: 100,
        ..RunConfig::default()
    }
}

fn kronecker_rank() -> RunConfig {
    RunConfig {
        mode: Mode::Verify,
        n: 128,
        checks: vec![Check::Kronecker],
        trials: 50,
        ..RunConfig::default()
    }
}

fn cascade_profile() -> RunConfig {
    RunConfig {
        mode: Mode::Exact,
        alpha: 1.0,
        initial: Initial::GrowthDatum,
        n: 2048,
        t_end: 3.0,
        sample_every: 0.125,
        ..RunConfig::default()
    }
}
