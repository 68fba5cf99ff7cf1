//! Relativistic Boris push: half electric kick, exact magnetic rotation,
//! half electric kick.

use crate::error::Result;
use crate::fields::{eval_fields, FieldScenario};
use crate::kinematics::{gamma_from_u, ParticleState, Species, UnitsSystem};

/// Advance one step of size `dt`.
///
/// Fields are sampled at the half-step point (rⁿ + (dt/2)uⁿ/γⁿ, t + dt/2).
/// The magnetic substep uses the half-angle tan form
/// t⃗ = (q·dt/2mγ⁻)B, s⃗ = 2t⃗/(1+|t⃗|²), which rotates u⁻ exactly, so a pure
/// magnetic field never changes |u|. Positions advance symmetrically with
/// the average of the old and new velocities, which keeps the scheme second
/// order with synchronous (r, u) output.
pub fn boris_step(
    state: &ParticleState,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    dt: f64,
) -> Result<ParticleState> {
    let gamma_n = gamma_from_u(state.u, units);
    let v_n = state.u / gamma_n;
    let r_half = state.r + v_n * (0.5 * dt);
    let sample = eval_fields(scenario, r_half, state.t + 0.5 * dt, units)?;

    let eps = sample.e * (0.5 * sp.q / sp.m);
    let u_minus = state.u + eps * dt;

    let gamma_minus = gamma_from_u(u_minus, units);
    let t_vec = sample.b * (0.5 * dt * sp.q / (sp.m * gamma_minus));
    let s_vec = t_vec * (2.0 / (1.0 + t_vec.norm_squared()));
    let u_prime = u_minus + u_minus.cross(t_vec);
    let u_plus = u_minus + u_prime.cross(s_vec);

    let u_new = u_plus + eps * dt;
    let gamma_new = gamma_from_u(u_new, units);
    let r_new = state.r + (v_n + u_new / gamma_new) * (0.5 * dt);

    Ok(ParticleState::new(r_new, u_new, state.t + dt))
}
