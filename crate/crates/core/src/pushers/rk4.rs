//! Classical fourth-order Runge-Kutta on the coupled (r, u) system; the
//! brute-force reference for scenarios without closed forms.

use crate::error::Result;
use crate::fields::{eval_fields, FieldScenario};
use crate::kinematics::{
    lorentz_acceleration, velocity_from_u, ParticleState, Species, UnitsSystem,
};
use crate::vec3::Vec3;

fn derivative(
    r: Vec3,
    u: Vec3,
    t: f64,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
) -> Result<(Vec3, Vec3)> {
    let sample = eval_fields(scenario, r, t, units)?;
    let state = ParticleState::new(r, u, t);
    Ok((
        velocity_from_u(u, units),
        lorentz_acceleration(&state, sample.e, sample.b, sp, units),
    ))
}

/// One RK4 step of size `dt`.
pub fn rk4_reference_step(
    state: &ParticleState,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    dt: f64,
) -> Result<ParticleState> {
    let (r, u, t) = (state.r, state.u, state.t);
    let (k1r, k1u) = derivative(r, u, t, scenario, sp, units)?;
    let (k2r, k2u) = derivative(
        r + k1r * (dt / 2.0),
        u + k1u * (dt / 2.0),
        t + dt / 2.0,
        scenario,
        sp,
        units,
    )?;
    let (k3r, k3u) = derivative(
        r + k2r * (dt / 2.0),
        u + k2u * (dt / 2.0),
        t + dt / 2.0,
        scenario,
        sp,
        units,
    )?;
    let (k4r, k4u) = derivative(r + k3r * dt, u + k3u * dt, t + dt, scenario, sp, units)?;
    Ok(ParticleState::new(
        r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (dt / 6.0),
        u + (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (dt / 6.0),
        t + dt,
    ))
}
