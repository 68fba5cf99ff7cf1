//! Exponential predictor-corrector step.

use crate::error::{Error, Result};
use crate::exp_coeffs::ExpPcCoefficients;
use crate::fields::{eval_fields, FieldScenario};
use crate::kinematics::{
    lorentz_acceleration, velocity_from_u, ParticleState, Species, UnitsSystem,
};
use crate::pushers::{corrector_delta, PusherConfig, StateHistory, StepStats};
use crate::vec3::Vec3;

/// Neumaier-compensated dot product over history samples. The stencil sums
/// k ≈ 22 near-cancelling terms every step; compensation keeps the
/// summation error itself from polluting long energy histories.
fn compensated_dot(weights: &[f64], values: impl Iterator<Item = Vec3>) -> Vec3 {
    let mut sum = [0.0f64; 3];
    let mut comp = [0.0f64; 3];
    for (w, v) in weights.iter().zip(values) {
        for (c, x) in [(0usize, v.x), (1, v.y), (2, v.z)] {
            let term = x * *w;
            let t = sum[c] + term;
            if sum[c].abs() >= term.abs() {
                comp[c] += (sum[c] - t) + term;
            } else {
                comp[c] += (term - t) + sum[c];
            }
            sum[c] = t;
        }
    }
    Vec3::new(sum[0] + comp[0], sum[1] + comp[1], sum[2] + comp[2])
}

/// PE(CE)^m step with the exponential weights: the predictor combines the
/// stored u/r samples and their dt-scaled derivatives; the corrector adds a
/// weight on the derivative at the new point, evaluated at the current
/// iterate, and repeats until converged.
pub fn exp_pc_step(
    hist: &StateHistory,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    cfg: &PusherConfig,
) -> Result<(ParticleState, StepStats)> {
    let coeffs: &ExpPcCoefficients = cfg.exp_coeffs.as_ref().ok_or(Error::MissingCoefficients)?;
    let k = coeffs.k;
    if hist.len() < k {
        return Err(Error::HistoryNotReady {
            have: hist.len(),
            need: k,
        });
    }
    let dt = cfg.dt;
    let t_new = hist.newest().state.t + dt;

    let mut u = compensated_dot(&coeffs.predictor_value_w, hist.iter().map(|e| e.state.u))
        + compensated_dot(&coeffs.predictor_deriv_w, hist.iter().map(|e| e.accel)) * dt;
    let mut r = compensated_dot(&coeffs.predictor_value_w, hist.iter().map(|e| e.state.r))
        + compensated_dot(&coeffs.predictor_deriv_w, hist.iter().map(|e| e.vel)) * dt;

    let u_hist = compensated_dot(&coeffs.corrector_value_w, hist.iter().map(|e| e.state.u));
    let r_hist = compensated_dot(&coeffs.corrector_value_w, hist.iter().map(|e| e.state.r));
    let ua_hist = compensated_dot(&coeffs.corrector_deriv_w[1..], hist.iter().map(|e| e.accel));
    let rv_hist = compensated_dot(&coeffs.corrector_deriv_w[1..], hist.iter().map(|e| e.vel));
    let w_new = coeffs.corrector_deriv_w[0];

    let mut stats = StepStats::default();
    for _ in 0..cfg.max_correctors {
        stats.corrector_iterations += 1;
        let trial = ParticleState::new(r, u, t_new);
        let sample = eval_fields(scenario, trial.r, trial.t, units)?;
        let a_new = lorentz_acceleration(&trial, sample.e, sample.b, sp, units);
        let v_new = velocity_from_u(u, units);
        let u_corr = u_hist + (ua_hist + a_new * w_new) * dt;
        let r_corr = r_hist + (rv_hist + v_new * w_new) * dt;
        let delta = corrector_delta(u_corr, u, r_corr, r);
        u = u_corr;
        r = r_corr;
        if delta < cfg.corrector_tol {
            break;
        }
    }
    Ok((ParticleState::new(r, u, t_new), stats))
}
