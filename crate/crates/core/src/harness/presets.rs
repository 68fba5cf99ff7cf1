//! Bundled experiment presets covering the single-particle experiments:
//! linear acceleration, cyclotron orbits (γ = √2 and γ = 2), crossed
//! |E| = |B| fields, the radially varying potential well, and the
//! two-dipole magnetic bottle.

use std::f64::consts::PI;
use std::path::PathBuf;

use crate::fields::FieldScenario;
use crate::harness::{ExperimentConfig, OutputSpec, RunSpec};
use crate::kinematics::{ParticleState, Species, UnitsSystem};
use crate::pushers::{Method, PusherConfig};
use crate::vec3::Vec3;

pub const PRESET_NAMES: [&str; 6] = [
    "linear_accel",
    "cyclotron",
    "cyclotron_gamma2",
    "crossed_eb",
    "radial_well",
    "magnetic_bottle",
];

/// Names of all bundled presets.
pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

fn outputs(stem: &str, convergence: bool) -> OutputSpec {
    OutputSpec {
        trajectory_csv: Some(PathBuf::from(format!("{stem}_trajectory.csv"))),
        energy_csv: Some(PathBuf::from(format!("{stem}_energy.csv"))),
        convergence_csv: convergence.then(|| PathBuf::from(format!("{stem}_convergence.csv"))),
    }
}

fn natural_unit_particle() -> (UnitsSystem, Species) {
    (UnitsSystem::natural(), Species::new(1.0, 1.0))
}

/// Look up a bundled preset by name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let (units, species) = natural_unit_particle();
    match name {
        "linear_accel" => Some(ExperimentConfig {
            units,
            species,
            scenario: FieldScenario::UniformE {
                e0: Vec3::new(1.0, 0.0, 0.0),
            },
            initial: ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0),
            pusher: PusherConfig::new(Method::ExponentialPc, 0.05),
            run: RunSpec {
                t_end: 10.0,
                dt_sweep: Some(vec![
                    0.1, 0.09, 0.08, 0.07, 0.06, 0.05, 0.04, 0.03, 0.02, 0.01, 0.005,
                ]),
                sweep_t_end: None,
            },
            outputs: outputs("linear_accel", true),
        }),
        "cyclotron" => {
            // u0 = (1,0,0): gamma0 = sqrt(2), period T = 2*pi*sqrt(2).
            // Main run: 100-period energy history at dt = T/60.
            // Sweep: single-period position convergence.
            let period = 2.0 * PI * 2f64.sqrt();
            Some(ExperimentConfig {
                units,
                species,
                scenario: FieldScenario::UniformB {
                    b0: Vec3::new(0.0, 0.0, 1.0),
                },
                initial: ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0),
                pusher: PusherConfig::new(Method::Boris, period / 60.0),
                run: RunSpec {
                    t_end: 100.0 * period,
                    dt_sweep: Some(vec![0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05]),
                    sweep_t_end: Some(period),
                },
                outputs: outputs("cyclotron", true),
            })
        }
        "cyclotron_gamma2" => {
            // u0 = (sqrt(3),0,0): gamma0 = 2, period T = 4*pi.
            let period = 4.0 * PI;
            Some(ExperimentConfig {
                units,
                species,
                scenario: FieldScenario::UniformB {
                    b0: Vec3::new(0.0, 0.0, 1.0),
                },
                initial: ParticleState::new(Vec3::ZERO, Vec3::new(3f64.sqrt(), 0.0, 0.0), 0.0),
                pusher: PusherConfig::new(Method::Boris, period / 60.0),
                run: RunSpec {
                    t_end: 100.0 * period,
                    dt_sweep: Some(vec![0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05]),
                    sweep_t_end: Some(period),
                },
                outputs: outputs("cyclotron_gamma2", true),
            })
        }
        "crossed_eb" => Some(ExperimentConfig {
            units,
            species,
            scenario: FieldScenario::CrossedEB {
                e0: Vec3::new(0.0, 1.0, 0.0),
                b0: Vec3::new(0.0, 0.0, 1.0),
            },
            initial: ParticleState::new(Vec3::ZERO, Vec3::ZERO, 0.0),
            pusher: PusherConfig::new(Method::ExponentialPc, 0.02),
            run: RunSpec {
                // long enough that the error norm reflects the asymptotic
                // regime rather than the start-up transient at coarse dt
                t_end: 40.0,
                dt_sweep: Some(vec![1.0, 0.5, 0.2, 0.1, 0.05, 0.02]),
                sweep_t_end: None,
            },
            outputs: outputs("crossed_eb", true),
        }),
        "radial_well" => Some(ExperimentConfig {
            units,
            species,
            scenario: FieldScenario::radial_well_default(),
            initial: ParticleState::new(Vec3::new(0.9, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0), 0.0),
            pusher: PusherConfig::new(Method::ExponentialPc, 1.5e-5),
            run: RunSpec {
                // 50000 steps of 1.5e-5
                t_end: 0.75,
                dt_sweep: None,
                sweep_t_end: None,
            },
            outputs: outputs("radial_well", false),
        }),
        "magnetic_bottle" => Some(ExperimentConfig {
            units: UnitsSystem::mks(),
            // electron with the rounded tabulated constants
            species: Species::new(-1.6e-19, 9.1e-31),
            scenario: FieldScenario::bottle_default(),
            initial: ParticleState::new(Vec3::new(0.0, 5.0, 0.0), Vec3::ZERO, 0.0),
            pusher: PusherConfig::new(Method::ExponentialPc, 2.5e-9),
            run: RunSpec {
                // 40000 steps: the 10 ns kick plus ~50 gyro periods of coasting
                t_end: 1.0e-4,
                dt_sweep: None,
                sweep_t_end: None,
            },
            outputs: outputs("magnetic_bottle", false),
        }),
        _ => None,
    }
}
