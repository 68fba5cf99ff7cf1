//! Relativistic charged-particle trajectory integration.
//!
//! The crate provides three families of particle pushers for the
//! Lorentz-Newton system du/dt = (q/m)(E + v×B), dr/dt = v:
//!
//! * the Boris kick-rotate-kick scheme ([`pushers::boris_step`]),
//! * polynomial Adams predictor-correctors of order 3 and 4
//!   ([`pushers::adams_pc_step`]),
//! * an exponential predictor-corrector whose weights are fitted to
//!   exponential solutions over a semidisk in the complex plane
//!   ([`exp_coeffs::build_exp_pc_coefficients`], [`pushers::exp_pc_step`]),
//!
//! together with analytic field scenarios ([`fields`]), closed-form
//! trajectory oracles ([`oracles`]), amplification-matrix / characteristic-root
//! stability diagnostics ([`stability`]), and an experiment harness
//! ([`harness`]) that reproduces convergence sweeps and energy histories as
//! deterministic CSV tables.

pub mod error;
pub mod exp_coeffs;
pub mod fields;
pub mod harness;
pub mod kinematics;
pub mod oracles;
pub mod pushers;
pub mod stability;
pub mod vec3;

pub use error::{Error, Result};
pub use exp_coeffs::ExpPcCoefficients;
pub use fields::{FieldSample, FieldScenario};
pub use kinematics::{ParticleState, Species, UnitsSystem};
pub use pushers::{Method, Pusher, PusherConfig, StateHistory};
pub use vec3::Vec3;
