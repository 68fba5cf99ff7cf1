//! Adams-Bashforth / Adams-Moulton predictor-corrector steps (orders 3, 4).

use crate::error::{Error, Result};
use crate::fields::{eval_fields, FieldScenario};
use crate::kinematics::{
    lorentz_acceleration, velocity_from_u, ParticleState, Species, UnitsSystem,
};
use crate::pushers::{corrector_delta, Method, PusherConfig, StateHistory, StepStats};
use crate::vec3::Vec3;

/// Adams-Bashforth weights, oldest sample first.
const AB4: [f64; 4] = [-9.0 / 24.0, 37.0 / 24.0, -59.0 / 24.0, 55.0 / 24.0];
const AB3: [f64; 3] = [5.0 / 12.0, -16.0 / 12.0, 23.0 / 12.0];

/// Adams-Moulton weights: new-point weight first, then historical samples
/// oldest first.
const AM4_NEW: f64 = 9.0 / 24.0;
const AM4_HIST: [f64; 3] = [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0];
const AM3_NEW: f64 = 5.0 / 12.0;
const AM3_HIST: [f64; 2] = [-1.0 / 12.0, 8.0 / 12.0];

fn weighted_sum(weights: &[f64], terms: impl Iterator<Item = Vec3>) -> Vec3 {
    let mut acc = Vec3::ZERO;
    for (w, v) in weights.iter().zip(terms) {
        acc += v * *w;
    }
    acc
}

/// PE(CE)^m step: Adams-Bashforth prediction of (u, r), then repeated
/// evaluate-and-correct with the Adams-Moulton stencil until the relative
/// change drops below cfg.corrector_tol or cfg.max_correctors is reached.
///
/// u is driven by the stored acceleration samples and r by the stored
/// velocity samples, with the same weight family for both.
pub fn adams_pc_step(
    hist: &StateHistory,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    cfg: &PusherConfig,
) -> Result<(ParticleState, StepStats)> {
    let (k, ab, am_new, am_hist): (usize, &[f64], f64, &[f64]) = match cfg.method {
        Method::AdamsPc4 => (4, &AB4, AM4_NEW, &AM4_HIST),
        Method::AdamsPc3 => (3, &AB3, AM3_NEW, &AM3_HIST),
        other => panic!("adams_pc_step called with method {other:?}"),
    };
    if hist.len() < k {
        return Err(Error::HistoryNotReady {
            have: hist.len(),
            need: k,
        });
    }
    let dt = cfg.dt;
    let newest = hist.newest();
    let t_new = newest.state.t + dt;

    let mut u = newest.state.u + weighted_sum(ab, hist.iter().map(|e| e.accel)) * dt;
    let mut r = newest.state.r + weighted_sum(ab, hist.iter().map(|e| e.vel)) * dt;

    // historical part of the corrector: skip the oldest sample (the AM
    // stencil reaches back one step less than the AB stencil)
    let hist_accel = weighted_sum(am_hist, hist.iter().skip(1).map(|e| e.accel));
    let hist_vel = weighted_sum(am_hist, hist.iter().skip(1).map(|e| e.vel));

    let mut stats = StepStats::default();
    for _ in 0..cfg.max_correctors {
        stats.corrector_iterations += 1;
        let trial = ParticleState::new(r, u, t_new);
        let sample = eval_fields(scenario, trial.r, trial.t, units)?;
        let a_new = lorentz_acceleration(&trial, sample.e, sample.b, sp, units);
        let v_new = velocity_from_u(u, units);
        let u_corr = newest.state.u + (hist_accel + a_new * am_new) * dt;
        let r_corr = newest.state.r + (hist_vel + v_new * am_new) * dt;
        let delta = corrector_delta(u_corr, u, r_corr, r);
        u = u_corr;
        r = r_corr;
        if delta < cfg.corrector_tol {
            break;
        }
    }
    Ok((ParticleState::new(r, u, t_new), stats))
}
