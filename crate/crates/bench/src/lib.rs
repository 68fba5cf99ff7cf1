//! Shared setup for the pusher benchmarks.

use larmor::exp_coeffs::default_coefficients;
use larmor::pushers::{bootstrap_history, StateHistory};
use larmor::{FieldScenario, Method, ParticleState, PusherConfig, Species, UnitsSystem, Vec3};

pub struct BenchSetup {
    pub scenario: FieldScenario,
    pub species: Species,
    pub units: UnitsSystem,
    pub initial: ParticleState,
}

/// Cyclotron configuration: the tightest loop every method exercises.
pub fn cyclotron_setup() -> BenchSetup {
    BenchSetup {
        scenario: FieldScenario::UniformB {
            b0: Vec3::new(0.0, 0.0, 1.0),
        },
        species: Species::new(1.0, 1.0),
        units: UnitsSystem::natural(),
        initial: ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0),
    }
}

/// A ready-to-step pusher config plus seeded history for a multistep method.
pub fn seeded(method: Method, dt: f64) -> (BenchSetup, PusherConfig, StateHistory) {
    let setup = cyclotron_setup();
    let mut cfg = PusherConfig::new(method, dt);
    if method == Method::ExponentialPc {
        cfg.exp_coeffs = Some(default_coefficients().expect("default coefficients"));
    }
    let k = cfg.method.history_len(cfg.exp_coeffs.as_ref());
    let boot = bootstrap_history(
        &setup.scenario,
        &setup.species,
        &setup.units,
        &cfg,
        &setup.initial,
        k,
    )
    .expect("bootstrap");
    (setup, cfg, boot.history)
}
