//! Time integrators: Boris, polynomial Adams predictor-correctors, the
//! exponential predictor-corrector, and a fine-step RK4 reference, plus
//! history bootstrapping for the multistep methods.

mod adams;
mod boris;
mod exp_pc;
mod rk4;

pub use adams::adams_pc_step;
pub use boris::boris_step;
pub use exp_pc::exp_pc_step;
pub use rk4::rk4_reference_step;

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::exp_coeffs::ExpPcCoefficients;
use crate::fields::{eval_fields, FieldScenario};
use crate::kinematics::{
    lorentz_acceleration, velocity_from_u, ParticleState, Species, UnitsSystem,
};
use crate::oracles::{bind_oracle, oracle_state, OracleKind};
use crate::vec3::Vec3;

/// Integration method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Boris,
    AdamsPc3,
    AdamsPc4,
    ExponentialPc,
    Rk4Reference,
}

impl Method {
    /// History length the method consumes (1 for one-step methods; the
    /// exponential stencil length comes from its coefficients).
    pub fn history_len(&self, exp_coeffs: Option<&ExpPcCoefficients>) -> usize {
        match self {
            Method::Boris | Method::Rk4Reference => 1,
            Method::AdamsPc3 => 3,
            Method::AdamsPc4 => 4,
            Method::ExponentialPc => exp_coeffs.map_or(22, |c| c.k),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Boris => "boris",
            Method::AdamsPc3 => "adams_pc3",
            Method::AdamsPc4 => "adams_pc4",
            Method::ExponentialPc => "exponential_pc",
            Method::Rk4Reference => "rk4_reference",
        }
    }
}

fn default_corrector_tol() -> f64 {
    1e-9
}

fn default_max_correctors() -> usize {
    10
}

/// Pusher configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PusherConfig {
    pub method: Method,
    pub dt: f64,
    #[serde(default = "default_corrector_tol")]
    pub corrector_tol: f64,
    #[serde(default = "default_max_correctors")]
    pub max_correctors: usize,
    /// Required when `method` is ExponentialPc; the harness builds the
    /// default set when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_coeffs: Option<ExpPcCoefficients>,
}

impl PusherConfig {
    pub fn new(method: Method, dt: f64) -> Self {
        PusherConfig {
            method,
            dt,
            corrector_tol: default_corrector_tol(),
            max_correctors: default_max_correctors(),
            exp_coeffs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be finite and > 0".into()));
        }
        if !(self.corrector_tol.is_finite() && self.corrector_tol > 0.0) {
            return Err(Error::InvalidConfig("corrector_tol must be > 0".into()));
        }
        if self.max_correctors < 1 {
            return Err(Error::InvalidConfig("max_correctors must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub corrector_iterations: usize,
}

/// One history slot: the state plus the acceleration du/dt and velocity
/// dr/dt evaluated there (cached at evaluation time so corrector sweeps
/// never re-evaluate old samples).
#[derive(Debug, Clone, Copy)]
pub struct HistoryEntry {
    pub state: ParticleState,
    pub accel: Vec3,
    pub vel: Vec3,
}

/// Ring buffer of the most recent k states with uniform spacing dt.
#[derive(Debug, Clone)]
pub struct StateHistory {
    entries: VecDeque<HistoryEntry>,
    capacity: usize,
    dt: f64,
}

impl StateHistory {
    pub fn new(capacity: usize, dt: f64) -> Self {
        assert!(capacity >= 1, "history capacity must be >= 1");
        assert!(
            dt > 0.0 && dt.is_finite(),
            "history dt must be finite and > 0"
        );
        StateHistory {
            entries: VecDeque::with_capacity(capacity + 1),
            capacity,
            dt,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Entries oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }

    pub fn newest(&self) -> &HistoryEntry {
        self.entries.back().expect("history is empty")
    }

    /// Append an entry, dropping the oldest when full. Spacing against the
    /// previous entry must match dt to within 1e-12·dt plus the
    /// representation noise of t itself (which dominates once t ≫ dt).
    pub fn push(&mut self, entry: HistoryEntry) {
        if let Some(last) = self.entries.back() {
            let gap = entry.state.t - last.state.t;
            let tol = 1e-12 * self.dt + 4.0 * f64::EPSILON * entry.state.t.abs();
            assert!(
                (gap - self.dt).abs() <= tol,
                "non-uniform history spacing: gap {gap:.17e} vs dt {:.17e}",
                self.dt
            );
        }
        self.entries.push_back(entry);
        if self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }
}

/// How the history of a multistep run was seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapKind {
    /// Entries sampled from a closed-form oracle at t ≤ t₀; no warm-up.
    Oracle,
    /// Entries generated forward from t₀ by fine-step RK4; the first
    /// (k−1)·dt of simulated time counts as warm-up.
    Reference,
}

/// Seeded history plus its warm-up bookkeeping.
#[derive(Debug, Clone)]
pub struct Bootstrap {
    pub history: StateHistory,
    pub kind: BootstrapKind,
    /// Number of leading trajectory samples to exclude from error metrics.
    pub warmup_steps: usize,
}

fn make_entry(
    state: ParticleState,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
) -> Result<HistoryEntry> {
    let sample = eval_fields(scenario, state.r, state.t, units)?;
    Ok(HistoryEntry {
        state,
        accel: lorentz_acceleration(&state, sample.e, sample.b, sp, units),
        vel: velocity_from_u(state.u, units),
    })
}

/// Seed a k-entry history ending at `initial`.
///
/// Scenarios with a closed form are seeded exactly at
/// t = t₀ − (k−1)dt, …, t₀. Everything else is seeded forward from t₀ with
/// RK4 at dt/1000 substeps; those samples stay in the trajectory but are
/// flagged as warm-up.
pub fn bootstrap_history(
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    cfg: &PusherConfig,
    initial: &ParticleState,
    k: usize,
) -> Result<Bootstrap> {
    let dt = cfg.dt;
    let mut history = StateHistory::new(k, dt);
    if k == 1 {
        history.push(make_entry(*initial, scenario, sp, units)?);
        return Ok(Bootstrap {
            history,
            kind: BootstrapKind::Oracle,
            warmup_steps: 0,
        });
    }
    let oracle = bind_oracle(scenario, sp, units, initial);
    if oracle != OracleKind::FineStepReference {
        for j in 0..k {
            let t = initial.t - (k - 1 - j) as f64 * dt;
            let mut st = oracle_state(oracle, scenario, sp, units, initial, t);
            st.t = initial.t - (k - 1 - j) as f64 * dt;
            history.push(make_entry(st, scenario, sp, units)?);
        }
        Ok(Bootstrap {
            history,
            kind: BootstrapKind::Oracle,
            warmup_steps: 0,
        })
    } else {
        const SUBSTEPS: usize = 1000;
        let mut state = *initial;
        history.push(make_entry(state, scenario, sp, units)?);
        for j in 1..k {
            let sub = dt / SUBSTEPS as f64;
            for _ in 0..SUBSTEPS {
                state = rk4_reference_step(&state, scenario, sp, units, sub)?;
            }
            state.t = initial.t + j as f64 * dt;
            history.push(make_entry(state, scenario, sp, units)?);
        }
        Ok(Bootstrap {
            history,
            kind: BootstrapKind::Reference,
            warmup_steps: k - 1,
        })
    }
}

enum Engine {
    OneStep(ParticleState),
    Multistep(StateHistory),
}

/// Stateful driver that owns a pusher's history and advances one trajectory.
pub struct Pusher {
    cfg: PusherConfig,
    scenario: FieldScenario,
    sp: Species,
    units: UnitsSystem,
    engine: Engine,
    warmup_steps: usize,
    seeded: Vec<ParticleState>,
    last_stats: StepStats,
}

impl Pusher {
    /// Bootstrap a pusher at `initial`. For multistep methods this seeds the
    /// history per [`bootstrap_history`].
    pub fn new(
        scenario: &FieldScenario,
        sp: &Species,
        units: &UnitsSystem,
        cfg: &PusherConfig,
        initial: &ParticleState,
    ) -> Result<Self> {
        cfg.validate()?;
        scenario.validate()?;
        if cfg.method == Method::ExponentialPc && cfg.exp_coeffs.is_none() {
            return Err(Error::MissingCoefficients);
        }
        let k = cfg.method.history_len(cfg.exp_coeffs.as_ref());
        let (engine, warmup_steps, seeded) = if k == 1 {
            (Engine::OneStep(*initial), 0, vec![*initial])
        } else {
            let boot = bootstrap_history(scenario, sp, units, cfg, initial, k)?;
            let seeded = match boot.kind {
                BootstrapKind::Oracle => vec![*initial],
                BootstrapKind::Reference => boot.history.iter().map(|e| e.state).collect(),
            };
            (Engine::Multistep(boot.history), boot.warmup_steps, seeded)
        };
        Ok(Pusher {
            cfg: cfg.clone(),
            scenario: scenario.clone(),
            sp: *sp,
            units: *units,
            engine,
            warmup_steps,
            seeded,
            last_stats: StepStats::default(),
        })
    }

    /// Trajectory samples the bootstrap already produced (the initial state,
    /// plus the seeded window for reference-seeded multistep runs).
    pub fn seeded_states(&self) -> &[ParticleState] {
        &self.seeded
    }

    /// Leading sample count excluded from error metrics.
    pub fn warmup_steps(&self) -> usize {
        self.warmup_steps
    }

    pub fn current(&self) -> ParticleState {
        match &self.engine {
            Engine::OneStep(s) => *s,
            Engine::Multistep(h) => h.newest().state,
        }
    }

    pub fn last_stats(&self) -> StepStats {
        self.last_stats
    }

    /// Advance one step of cfg.dt and return the new state.
    pub fn step(&mut self) -> Result<ParticleState> {
        let (state, stats) = match &mut self.engine {
            Engine::OneStep(s) => {
                let next = match self.cfg.method {
                    Method::Boris => {
                        boris_step(s, &self.scenario, &self.sp, &self.units, self.cfg.dt)?
                    }
                    Method::Rk4Reference => {
                        rk4_reference_step(s, &self.scenario, &self.sp, &self.units, self.cfg.dt)?
                    }
                    _ => unreachable!("multistep methods use the history engine"),
                };
                *s = next;
                (next, StepStats::default())
            }
            Engine::Multistep(history) => {
                let (next, stats) = match self.cfg.method {
                    Method::AdamsPc3 | Method::AdamsPc4 => {
                        adams_pc_step(history, &self.scenario, &self.sp, &self.units, &self.cfg)?
                    }
                    Method::ExponentialPc => {
                        exp_pc_step(history, &self.scenario, &self.sp, &self.units, &self.cfg)?
                    }
                    _ => unreachable!("one-step methods do not use the history engine"),
                };
                history.push(make_entry(next, &self.scenario, &self.sp, &self.units)?);
                (next, stats)
            }
        };
        self.last_stats = stats;
        Ok(state)
    }
}

/// Corrector stopping metric: max of the relative changes in u and r.
pub(crate) fn corrector_delta(u_new: Vec3, u_old: Vec3, r_new: Vec3, r_old: Vec3) -> f64 {
    let du = (u_new - u_old).norm() / (u_new.norm() + f64::EPSILON);
    let dr = (r_new - r_old).norm() / (r_new.norm() + f64::EPSILON);
    du.max(dr)
}
