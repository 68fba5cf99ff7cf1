//! Experiment harness: configured scenario × pusher runs, error norms,
//! energy histories, convergence sweeps, and deterministic CSV artifacts.

mod csv;
mod presets;

pub use csv::{
    emit_convergence_csv, emit_energy_csv, emit_stability_csv, emit_trajectory_csv, load_csv,
};
pub use presets::{preset, preset_names};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::exp_coeffs::default_coefficients;
use crate::fields::FieldScenario;
use crate::kinematics::{ParticleState, Species, UnitsSystem};
use crate::oracles::{bind_oracle, oracle_state, OracleKind};
use crate::pushers::{rk4_reference_step, Method, Pusher, PusherConfig};
use crate::vec3::Vec3;

/// Error floor below which convergence points are considered tolerance
/// limited and excluded from slope fits.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Time span and optional convergence sweep of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub t_end: f64,
    /// Step sizes for `converge`; must be positive and distinct.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_sweep: Option<Vec<f64>>,
    /// End time used by the sweep when it differs from the main run
    /// (e.g. single-period convergence vs many-period energy history).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_t_end: Option<f64>,
}

/// Output file paths, joined to the CLI's --out-dir when relative.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_csv: Option<PathBuf>,
}

/// Full experiment description; the JSON config document mirrors this
/// structure field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub units: UnitsSystem,
    pub species: Species,
    pub scenario: FieldScenario,
    pub initial: ParticleState,
    pub pusher: PusherConfig,
    pub run: RunSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.species.m.is_finite() && self.species.m > 0.0) {
            return Err(Error::InvalidConfig(
                "species mass must be finite and > 0".into(),
            ));
        }
        if !self.species.q.is_finite() {
            return Err(Error::InvalidConfig("species charge must be finite".into()));
        }
        self.scenario.validate()?;
        self.pusher.validate()?;
        if !self.initial.r.is_finite() || !self.initial.u.is_finite() || !self.initial.t.is_finite()
        {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        if !(self.run.t_end.is_finite() && self.run.t_end > self.initial.t) {
            return Err(Error::InvalidConfig(
                "t_end must exceed the initial time".into(),
            ));
        }
        if let Some(sweep) = &self.run.dt_sweep {
            if sweep.iter().any(|dt| !(dt.is_finite() && *dt > 0.0)) {
                return Err(Error::InvalidConfig(
                    "dt_sweep entries must be positive".into(),
                ));
            }
            let mut sorted = sweep.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidConfig(
                    "dt_sweep entries must be distinct".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Fill in the default exponential coefficients when the method needs
    /// them and the config omits them.
    pub fn ensure_coefficients(&mut self) -> Result<()> {
        if self.pusher.method == Method::ExponentialPc && self.pusher.exp_coeffs.is_none() {
            self.pusher.exp_coeffs = Some(default_coefficients()?);
        }
        Ok(())
    }
}

/// One output sample of a run.
#[derive(Debug, Clone, Copy)]
pub struct TimeSeriesSample {
    pub t: f64,
    pub r: Vec3,
    pub u: Vec3,
    pub gamma: f64,
    /// (γ − 1) m c².
    pub kinetic_energy: f64,
    /// q φ(r) when the scenario defines a scalar potential.
    pub potential_energy: Option<f64>,
    /// kinetic + potential (kinetic alone when no potential exists).
    pub total_energy: f64,
    /// |r − r*| against the closed-form oracle, when one is bound.
    pub error_vs_oracle: Option<f64>,
}

/// Uniform-time trajectory output of [`run_simulation`].
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub samples: Vec<TimeSeriesSample>,
    /// Leading samples excluded from error metrics (reference-seeded
    /// multistep warm-up).
    pub warmup_samples: usize,
    pub has_potential: bool,
    pub has_oracle: bool,
    pub method: Method,
    pub dt: f64,
}

impl TimeSeries {
    /// Energy observable used for drift metrics: total energy when a
    /// potential exists, kinetic energy otherwise.
    pub fn energy_metric(&self, sample: &TimeSeriesSample) -> f64 {
        if self.has_potential {
            sample.total_energy
        } else {
            sample.kinetic_energy
        }
    }
}

fn make_sample(
    cfg: &ExperimentConfig,
    state: &ParticleState,
    oracle: Option<OracleKind>,
) -> TimeSeriesSample {
    let gamma = state.gamma(&cfg.units);
    let c = cfg.units.c;
    let kinetic = (gamma - 1.0) * cfg.species.m * c * c;
    let potential = cfg
        .scenario
        .potential(state.r)
        .map(|phi| cfg.species.q * phi);
    let total = kinetic + potential.unwrap_or(0.0);
    let error = oracle.map(|kind| {
        let exact = oracle_state(
            kind,
            &cfg.scenario,
            &cfg.species,
            &cfg.units,
            &cfg.initial,
            state.t,
        );
        (state.r - exact.r).norm()
    });
    TimeSeriesSample {
        t: state.t,
        r: state.r,
        u: state.u,
        gamma,
        kinetic_energy: kinetic,
        potential_energy: potential,
        total_energy: total,
        error_vs_oracle: error,
    }
}

/// Execute one configured run and collect the per-step time series.
///
/// Multistep histories must never straddle a field-time discontinuity
/// (the stencil would mis-integrate the jump and ring for many steps), so
/// the run is split at [`FieldScenario::time_discontinuities`] and the
/// history is re-seeded at each boundary. Segments shorter than the history
/// length are produced entirely by the fine-step reference integrator.
///
/// Deterministic: identical configs produce identical output bit for bit.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    cfg.ensure_coefficients()?;
    let oracle = match bind_oracle(&cfg.scenario, &cfg.species, &cfg.units, &cfg.initial) {
        OracleKind::FineStepReference => None,
        kind => Some(kind),
    };
    let dt = cfg.pusher.dt;
    let t0 = cfg.initial.t;
    let n_steps = ((cfg.run.t_end - t0) / dt).round() as usize;
    if n_steps == 0 {
        return Err(Error::InvalidConfig("run shorter than one step".into()));
    }
    let k = cfg
        .pusher
        .method
        .history_len(cfg.pusher.exp_coeffs.as_ref());
    // closed-form-seeded histories live at t < t₀ and never constrain
    // segment lengths; only reference-seeded bootstraps march forward
    let reference_seeded = oracle.is_none();

    // segment boundaries as step indices, snapped onto the step grid
    let mut seg_ends: Vec<usize> = Vec::new();
    if k > 1 {
        for b in cfg.scenario.time_discontinuities() {
            let x = (b - t0) / dt;
            let idx = if (x - x.round()).abs() < 1e-9 {
                x.round() as usize
            } else {
                x.ceil() as usize
            };
            if idx >= 1 && idx < n_steps {
                seg_ends.push(idx);
            }
        }
        seg_ends.sort_unstable();
        seg_ends.dedup();
    }
    seg_ends.push(n_steps);

    let mut samples: Vec<TimeSeriesSample> = vec![make_sample(&cfg, &cfg.initial, oracle)];
    let mut current = cfg.initial;
    let mut done = 0usize;
    let mut warmup_samples = 0usize;
    let mut method_started = false;
    for seg_end in seg_ends {
        let seg_len = seg_end - done;
        // snap the segment start time onto the grid so discontinuity
        // comparisons stay exact
        current.t = t0 + done as f64 * dt;
        if k > 1 && reference_seeded && seg_len < k {
            // too short for the stencil: fine-step reference throughout
            const SUBSTEPS: usize = 1000;
            for j in 0..seg_len {
                let sub = dt / SUBSTEPS as f64;
                for s in 0..SUBSTEPS {
                    current =
                        rk4_reference_step(&current, &cfg.scenario, &cfg.species, &cfg.units, sub)
                            .map_err(|e| e.at_step(done + j + 1, current.t + s as f64 * sub))?;
                }
                current.t = t0 + (done + j + 1) as f64 * dt;
                samples.push(make_sample(&cfg, &current, oracle));
                if !method_started {
                    warmup_samples += 1;
                }
            }
        } else {
            let mut pusher = Pusher::new(
                &cfg.scenario,
                &cfg.species,
                &cfg.units,
                &cfg.pusher,
                &current,
            )?;
            // seeded_states[0] is the segment start, already emitted
            for s in &pusher.seeded_states()[1..] {
                samples.push(make_sample(&cfg, s, oracle));
                if !method_started {
                    warmup_samples += 1;
                }
            }
            let seeded = pusher.seeded_states().len() - 1;
            for step in seeded..seg_len {
                let state = pusher
                    .step()
                    .map_err(|e| e.at_step(done + step + 1, pusher.current().t))?;
                samples.push(make_sample(&cfg, &state, oracle));
                method_started = true;
            }
            current = pusher.current();
        }
        done = seg_end;
    }
    Ok(TimeSeries {
        samples,
        warmup_samples,
        has_potential: matches!(cfg.scenario, FieldScenario::RadialWell { .. }),
        has_oracle: oracle.is_some(),
        method: cfg.pusher.method,
        dt,
    })
}

/// Relative trajectory error √(Σ|rₙ−r*ₙ|²)/√(Σ|r*ₙ|²) over post-warm-up
/// samples. Falls back to the absolute norm √(Σ|rₙ−r*ₙ|²) when the oracle
/// positions are all zero.
pub fn error_norm(traj: &TimeSeries, oracle_positions: &[Vec3]) -> Result<f64> {
    if traj.samples.len() != oracle_positions.len() {
        return Err(Error::LengthMismatch {
            left: traj.samples.len(),
            right: oracle_positions.len(),
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (s, r_exact) in traj
        .samples
        .iter()
        .zip(oracle_positions)
        .skip(traj.warmup_samples)
    {
        num += (s.r - *r_exact).norm_squared();
        den += r_exact.norm_squared();
    }
    let num = num.sqrt();
    let den = den.sqrt();
    Ok(if den > 0.0 { num / den } else { num })
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub error: f64,
    /// True when the row participated in the slope fit (error > 10·floor).
    pub in_fit_window: bool,
}

/// Convergence sweep result: rows sorted by dt descending plus the fitted
/// log-log slope over the pre-floor window.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub method: Method,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of ln(error) vs ln(dt); None when fewer than 3
    /// rows sit above the floor (AllPointsAtFloor is reported, not fatal).
    pub fitted_slope: Option<f64>,
    pub floor: f64,
}

impl ConvergenceTable {
    pub fn all_at_floor(&self) -> bool {
        self.rows.iter().all(|r| !r.in_fit_window)
    }
}

/// Run the config once per dt_sweep entry and fit the convergence order
/// against the scenario's closed-form oracle.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    let sweep = cfg
        .run
        .dt_sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("convergence study needs run.dt_sweep".into()))?;
    if sweep.len() < 4 {
        return Err(Error::InvalidConfig(
            "dt_sweep needs at least 4 entries".into(),
        ));
    }
    if bind_oracle(&cfg.scenario, &cfg.species, &cfg.units, &cfg.initial)
        == OracleKind::FineStepReference
    {
        return Err(Error::InvalidConfig(
            "convergence study requires a scenario with a closed-form oracle".into(),
        ));
    }
    let mut dts = sweep.clone();
    dts.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::with_capacity(dts.len());
    for dt in dts {
        let mut run_cfg = cfg.clone();
        run_cfg.pusher.dt = dt;
        run_cfg.run.t_end = cfg.run.sweep_t_end.unwrap_or(cfg.run.t_end);
        let traj = run_simulation(&run_cfg)?;
        let oracle_kind = bind_oracle(
            &run_cfg.scenario,
            &run_cfg.species,
            &run_cfg.units,
            &run_cfg.initial,
        );
        let oracle_positions: Vec<Vec3> = traj
            .samples
            .iter()
            .map(|s| {
                oracle_state(
                    oracle_kind,
                    &run_cfg.scenario,
                    &run_cfg.species,
                    &run_cfg.units,
                    &run_cfg.initial,
                    s.t,
                )
                .r
            })
            .collect();
        let error = error_norm(&traj, &oracle_positions)?;
        rows.push(ConvergenceRow {
            dt,
            error,
            in_fit_window: error > 10.0 * ERROR_FLOOR,
        });
    }
    let fit: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.in_fit_window).collect();
    let fitted_slope = if fit.len() >= 3 {
        let n = fit.len() as f64;
        let sx: f64 = fit.iter().map(|r| r.dt.ln()).sum();
        let sy: f64 = fit.iter().map(|r| r.error.ln()).sum();
        let sxx: f64 = fit.iter().map(|r| r.dt.ln().powi(2)).sum();
        let sxy: f64 = fit.iter().map(|r| r.dt.ln() * r.error.ln()).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };
    Ok(ConvergenceTable {
        method: cfg.pusher.method,
        rows,
        fitted_slope,
        floor: ERROR_FLOOR,
    })
}

/// Energy drift over a time window.
#[derive(Debug, Clone, Copy)]
pub struct DriftReport {
    /// (max − min)/initial of the energy metric within the window.
    pub peak_to_peak: f64,
    /// (last − first)/initial, signed.
    pub net: f64,
}

/// Measure energy drift of `traj` restricted to `start_t ≤ t ≤ end_t`,
/// using total energy when the scenario defines a potential and kinetic
/// energy otherwise.
pub fn energy_drift(traj: &TimeSeries, start_t: f64, end_t: f64) -> DriftReport {
    let window: Vec<f64> = traj
        .samples
        .iter()
        .filter(|s| s.t >= start_t && s.t <= end_t)
        .map(|s| traj.energy_metric(s))
        .collect();
    assert!(
        window.len() >= 2,
        "energy window [{start_t}, {end_t}] holds {} samples",
        window.len()
    );
    let first = window[0];
    let last = *window.last().unwrap();
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = first.abs().max(f64::MIN_POSITIVE);
    DriftReport {
        peak_to_peak: (max - min) / scale,
        net: (last - first) / scale,
    }
}
