//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantities (run with `-- --nocapture` to see them).

use larmor::exp_coeffs::{
    build_exp_pc_coefficients, default_coefficients, verify_stencil_on_semidisk,
};
use larmor::harness::{
    convergence_study, emit_convergence_csv, emit_energy_csv, emit_trajectory_csv, energy_drift,
    preset, preset_names, run_simulation, ExperimentConfig, OutputSpec, RunSpec,
};
use larmor::oracles::{
    crossed_field_state, cyclotron_period, cyclotron_state, linear_accel_state,
    reference_trajectory,
};
use larmor::stability::{adams4_characteristic_roots, boris_amplification_eigenvalues};
use larmor::{
    ExpPcCoefficients, FieldScenario, Method, ParticleState, PusherConfig, Species, UnitsSystem,
    Vec3,
};

struct Criterion {
    id: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion {
            id,
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.checks.push((msg, ok));
    }

    fn finish(self) {
        let ok = self.checks.iter().all(|c| c.1);
        println!(
            "ACCEPTANCE {:02} {}: {}",
            self.id,
            self.name,
            if ok { "PASS" } else { "FAIL" }
        );
        for (msg, good) in &self.checks {
            println!("    [{}] {msg}", if *good { "ok" } else { "FAIL" });
        }
        assert!(
            ok,
            "acceptance criterion {} ({}) failed",
            self.id, self.name
        );
    }
}

/// Deterministic low-discrepancy points in [-10, 10]^3.
fn weyl_omegas(n: usize) -> Vec<Vec3> {
    let a = [
        0.618_033_988_749_894_9,
        0.414_213_562_373_095_1,
        0.732_050_807_568_877_3,
    ];
    (1..=n)
        .map(|i| {
            Vec3::new(
                20.0 * (i as f64 * a[0]).fract() - 10.0,
                20.0 * (i as f64 * a[1]).fract() - 10.0,
                20.0 * (i as f64 * a[2]).fract() - 10.0,
            )
        })
        .collect()
}

fn sharp_coefficients() -> ExpPcCoefficients {
    // tighter SVD truncation than the default build: the long energy
    // histories need the stencil residual near the imaginary axis at the
    // least-squares floor
    build_exp_pc_coefficients(22, 3.15, 22, 1e-14).expect("sharp build")
}

fn unit_species() -> Species {
    Species::new(1.0, 1.0)
}

fn natural_config(
    scenario: FieldScenario,
    initial: ParticleState,
    method: Method,
    dt: f64,
    t_end: f64,
) -> ExperimentConfig {
    ExperimentConfig {
        units: UnitsSystem::natural(),
        species: unit_species(),
        scenario,
        initial,
        pusher: PusherConfig::new(method, dt),
        run: RunSpec {
            t_end,
            dt_sweep: None,
            sweep_t_end: None,
        },
        outputs: OutputSpec::default(),
    }
}

fn max_gamma_drift(cfg: &ExperimentConfig) -> f64 {
    let traj = run_simulation(cfg).unwrap();
    let g0 = traj.samples[0].gamma;
    traj.samples
        .iter()
        .map(|s| (s.gamma - g0).abs() / g0)
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_boris_unit_circle_eigenvalues() {
    let mut c = Criterion::new(1, "boris unit-circle eigenvalues");
    let mut worst: f64 = 0.0;
    for omega in weyl_omegas(1000) {
        for l in boris_amplification_eigenvalues(omega) {
            worst = worst.max((l.norm() - 1.0).abs());
        }
    }
    c.check(
        worst <= 1e-12,
        format!("1000 quasi-random ω in [-10,10]³: max | |λ|−1 | = {worst:.3e} ≤ 1e-12"),
    );
    c.finish();
}

#[test]
fn criterion_02_adams4_off_unit_circle_roots() {
    let mut c = Criterion::new(2, "adams-4 off-unit-circle roots");
    for omega_z in [0.05, 0.1, 0.2, 0.5] {
        let report = adams4_characteristic_roots(omega_z);
        let trivial = &report.root_sets[0];
        let mut mags: Vec<f64> = trivial.roots.iter().map(|z| z.norm()).collect();
        mags.sort_by(f64::total_cmp);
        let trivial_ok = mags[0] <= 1e-10 && mags[1] <= 1e-10 && (mags[2] - 1.0).abs() <= 1e-10;
        c.check(
            trivial_ok,
            format!("ω_z = {omega_z}: trivial combination roots {{0, 0, 1}} within 1e-10"),
        );
        let off = report.root_sets[1..]
            .iter()
            .map(|s| s.roots.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        c.check(
            (off - 1.0).abs() >= 1e-6,
            format!(
                "ω_z = {omega_z}: conjugate combination max|z| = {off:.6} off the circle by ≥ 1e-6"
            ),
        );
    }
    c.finish();
}

#[test]
fn criterion_03_exponential_coefficient_exactness() {
    let mut c = Criterion::new(3, "exponential coefficient exactness");
    let coeffs = default_coefficients().expect("default build");
    let held_out = verify_stencil_on_semidisk(&coeffs, 500);
    c.check(
        held_out <= 1e-10,
        format!(
            "defaults (k=22, ρ=3.15, rank=18, tol=1e-12): held-out residual {held_out:.3e} ≤ 1e-10"
        ),
    );
    let sp: f64 = coeffs.predictor_value_w.iter().sum();
    let sc: f64 = coeffs.corrector_value_w.iter().sum();
    c.check(
        (sp - 1.0).abs() <= 1e-10 && (sc - 1.0).abs() <= 1e-10,
        format!(
            "value-weight sums 1{:+.2e} (predictor), 1{:+.2e} (corrector) within 1e-10",
            sp - 1.0,
            sc - 1.0
        ),
    );
    c.finish();
}

#[test]
fn criterion_04_linear_acceleration_convergence() {
    let mut c = Criterion::new(4, "linear-acceleration convergence");
    let base = preset("linear_accel").unwrap();
    let slope_of = |method: Method| -> f64 {
        let mut cfg = base.clone();
        cfg.pusher = PusherConfig::new(method, 0.05);
        convergence_study(&cfg)
            .unwrap()
            .fitted_slope
            .expect("slope fit")
    };
    let boris = slope_of(Method::Boris);
    c.check(
        (boris - 2.0).abs() <= 0.3,
        format!("Boris slope {boris:.2} = 2 ± 0.3"),
    );
    let pc3 = slope_of(Method::AdamsPc3);
    c.check(pc3 >= 2.5, format!("AdamsPC3 slope {pc3:.2} ≥ 2.5"));
    let pc4 = slope_of(Method::AdamsPc4);
    c.check(pc4 >= 3.5, format!("AdamsPC4 slope {pc4:.2} ≥ 3.5"));
    let exp = slope_of(Method::ExponentialPc);
    c.check(
        exp >= 8.0,
        format!("ExponentialPC slope {exp:.2} ≥ 8 (floor 1e-12)"),
    );
    c.finish();
}

#[test]
fn criterion_05_cyclotron_energy() {
    let mut c = Criterion::new(5, "cyclotron energy conservation");
    let period = cyclotron_period(1.0, &unit_species(), 2f64.sqrt());
    let scenario = FieldScenario::UniformB {
        b0: Vec3::new(0.0, 0.0, 1.0),
    };
    let initial = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);

    let boris_cfg = natural_config(
        scenario.clone(),
        initial,
        Method::Boris,
        period / 60.0,
        100.0 * period,
    );
    let boris_drift = max_gamma_drift(&boris_cfg);
    c.check(
        boris_drift <= 1e-12,
        format!("Boris γ-drift {boris_drift:.3e} ≤ 1e-12 over 100 periods"),
    );

    let mut exp_cfg = natural_config(
        scenario.clone(),
        initial,
        Method::ExponentialPc,
        period / 60.0,
        100.0 * period,
    );
    exp_cfg.pusher.exp_coeffs = Some(sharp_coefficients());
    let exp_drift = max_gamma_drift(&exp_cfg);
    c.check(
        exp_drift <= 1e-12,
        format!("ExponentialPC γ-drift {exp_drift:.3e} ≤ 1e-12 over 100 periods"),
    );

    let adams_cfg = natural_config(
        scenario,
        initial,
        Method::AdamsPc4,
        period / 60.0,
        100.0 * period,
    );
    let traj = run_simulation(&adams_cfg).unwrap();
    let drift = energy_drift(&traj, 0.0, f64::INFINITY);
    c.check(
        drift.net >= 1e-6,
        format!(
            "AdamsPC4 at dt = T/60 gains energy: net drift {:+.3e} ≥ 1e-6",
            drift.net
        ),
    );
    c.finish();
}

#[test]
fn criterion_06_cyclotron_position_convergence() {
    let mut c = Criterion::new(6, "cyclotron position convergence");
    for (label, preset_name) in [("γ=√2", "cyclotron"), ("γ=2", "cyclotron_gamma2")] {
        let base = preset(preset_name).unwrap();
        let study = |method: Method| {
            let mut cfg = base.clone();
            cfg.pusher = PusherConfig::new(method, cfg.pusher.dt);
            convergence_study(&cfg).unwrap()
        };
        let boris = study(Method::Boris).fitted_slope.expect("boris slope");
        c.check(
            (boris - 2.0).abs() <= 0.3,
            format!("{label}: Boris slope {boris:.2} = 2 ± 0.3"),
        );
        let exp_table = study(Method::ExponentialPc);
        let exp_slope = exp_table.fitted_slope.expect("exp slope");
        c.check(
            exp_slope >= 8.0,
            format!("{label}: ExponentialPC slope {exp_slope:.2} ≥ 8"),
        );
        if preset_name == "cyclotron_gamma2" {
            let min_err = exp_table
                .rows
                .iter()
                .map(|r| r.error)
                .fold(f64::INFINITY, f64::min);
            c.check(
                min_err <= 1e-12,
                format!("{label}: ExponentialPC reaches the 1e-12 floor (min error {min_err:.3e})"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_07_crossed_field_accuracy() {
    let mut c = Criterion::new(7, "crossed-field accuracy");
    let base = preset("crossed_eb").unwrap();
    let table_of = |method: Method| {
        let mut cfg = base.clone();
        cfg.pusher = PusherConfig::new(method, cfg.pusher.dt);
        convergence_study(&cfg).unwrap()
    };
    let exp = table_of(Method::ExponentialPc);
    let boris = table_of(Method::Boris);
    for (e, b) in exp.rows.iter().zip(&boris.rows) {
        c.check(
            e.error < b.error,
            format!(
                "dt = {:<4}: ExponentialPC {:.3e} < Boris {:.3e}",
                e.dt, e.error, b.error
            ),
        );
    }
    let slope = boris.fitted_slope.expect("boris slope");
    c.check(
        (slope - 2.0).abs() <= 0.3,
        format!("Boris slope {slope:.2} = 2 ± 0.3"),
    );
    c.finish();
}

#[test]
fn criterion_08_space_varying_orbit() {
    let mut c = Criterion::new(8, "space-varying orbit energy");
    let cfg = preset("radial_well").unwrap();
    let traj = run_simulation(&cfg).unwrap();
    let drift = energy_drift(&traj, 0.0, f64::INFINITY);
    c.check(
        drift.peak_to_peak <= 1e-6,
        format!(
            "ExponentialPC (dt=1.5e-5, 50000 steps): total-energy drift {:.3e} ≤ 1e-6",
            drift.peak_to_peak
        ),
    );
    let max_r = traj.samples.iter().map(|s| s.r.norm()).fold(0.0, f64::max);
    c.check(
        max_r <= 1.1,
        format!("bounded orbit: max |r| = {max_r:.4} ≤ 1.1"),
    );
    c.finish();
}

#[test]
fn criterion_09_magnetic_bottle_energy() {
    let mut c = Criterion::new(9, "magnetic bottle energy");
    let base = preset("magnetic_bottle").unwrap();
    let dt = base.pusher.dt;
    let kick_end = match &base.scenario {
        FieldScenario::MagneticBottle { kick_duration, .. } => *kick_duration,
        _ => unreachable!(),
    };
    // window starts after the kick plus the history re-seed flush
    let window_start = kick_end + 60.0 * dt;
    let drift_of = |method: Method, coeffs: Option<ExpPcCoefficients>| {
        let mut cfg = base.clone();
        cfg.pusher = PusherConfig::new(method, dt);
        cfg.pusher.exp_coeffs = coeffs;
        let traj = run_simulation(&cfg).unwrap();
        energy_drift(&traj, window_start, f64::INFINITY)
    };
    let boris = drift_of(Method::Boris, None);
    c.check(
        boris.peak_to_peak <= 1e-9,
        format!(
            "Boris post-kick kinetic-energy drift {:.3e} ≤ 1e-9",
            boris.peak_to_peak
        ),
    );
    let exp = drift_of(Method::ExponentialPc, Some(sharp_coefficients()));
    c.check(
        exp.peak_to_peak <= 1e-9,
        format!(
            "ExponentialPC post-kick drift {:.3e} ≤ 1e-9",
            exp.peak_to_peak
        ),
    );
    let adams = drift_of(Method::AdamsPc4, None);
    let ratio = adams.peak_to_peak / exp.peak_to_peak;
    c.check(
        ratio >= 1e3,
        format!(
            "AdamsPC4 drift {:.3e} ≥ 1e3 × ExponentialPC (ratio {ratio:.2e})",
            adams.peak_to_peak
        ),
    );
    c.finish();
}

#[test]
fn criterion_10_oracle_self_consistency() {
    let mut c = Criterion::new(10, "oracle self-consistency");
    let sp = unit_species();
    let units = UnitsSystem::natural();

    let lin = FieldScenario::UniformE {
        e0: Vec3::new(1.0, 0.0, 0.0),
    };
    let lin_init = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
    let reference = reference_trajectory(&lin, &sp, &units, &lin_init, 10.0, 21).unwrap();
    let worst = reference
        .samples
        .iter()
        .map(|s| {
            let exact = linear_accel_state(s.t, 1.0, &sp, 2f64.sqrt(), &units);
            (s.r - exact.r).norm() / exact.r.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    c.check(
        worst <= 1e-10,
        format!("linear accel: reference vs closed form {worst:.3e} ≤ 1e-10"),
    );

    let cyc = FieldScenario::UniformB {
        b0: Vec3::new(0.0, 0.0, 1.0),
    };
    let cyc_init = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
    let period = cyclotron_period(1.0, &sp, 2f64.sqrt());
    let reference = reference_trajectory(&cyc, &sp, &units, &cyc_init, period, 21).unwrap();
    let worst = reference
        .samples
        .iter()
        .map(|s| {
            let exact = cyclotron_state(s.t, 1.0, &sp, 1.0, &units);
            (s.r - exact.r).norm() / exact.r.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    c.check(
        worst <= 1e-10,
        format!("cyclotron: reference vs closed form {worst:.3e} ≤ 1e-10"),
    );

    let crossed = FieldScenario::CrossedEB {
        e0: Vec3::new(0.0, 1.0, 0.0),
        b0: Vec3::new(0.0, 0.0, 1.0),
    };
    let crossed_init = ParticleState::new(Vec3::ZERO, Vec3::ZERO, 0.0);
    let reference = reference_trajectory(&crossed, &sp, &units, &crossed_init, 10.0, 21).unwrap();
    let worst = reference
        .samples
        .iter()
        .map(|s| {
            let exact = crossed_field_state(s.t);
            (s.r - exact.r).norm() / exact.r.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    c.check(
        worst <= 1e-10,
        format!("crossed field: reference vs closed form {worst:.3e} ≤ 1e-10"),
    );

    // closed form satisfies the equation of motion by central differences
    let h = 1e-4;
    let dudt = (crossed_field_state(1.0 + h).u - crossed_field_state(1.0 - h).u) / (2.0 * h);
    let st = crossed_field_state(1.0);
    let v = st.velocity(&units);
    let rhs = Vec3::new(0.0, 1.0, 0.0) + v.cross(Vec3::new(0.0, 0.0, 1.0));
    let resid = (dudt - rhs).norm();
    c.check(
        resid <= 1e-6,
        format!("crossed-field oracle ODE residual {resid:.3e} ≤ 1e-6"),
    );
    c.finish();
}

#[test]
fn criterion_11_preset_determinism() {
    let mut c = Criterion::new(11, "preset determinism");
    let dir = tempfile::tempdir().unwrap();
    for name in preset_names() {
        let cfg = preset(name).unwrap();
        let mut digests = Vec::new();
        for round in 0..2 {
            let traj = run_simulation(&cfg).unwrap();
            let tpath = dir.path().join(format!("{name}_{round}_traj.csv"));
            let epath = dir.path().join(format!("{name}_{round}_energy.csv"));
            emit_trajectory_csv(&traj, &tpath).unwrap();
            emit_energy_csv(&traj, &epath).unwrap();
            let mut bytes = std::fs::read(&tpath).unwrap();
            bytes.extend(std::fs::read(&epath).unwrap());
            if cfg.run.dt_sweep.is_some() && *name == "linear_accel" {
                let table = convergence_study(&cfg).unwrap();
                let cpath = dir.path().join(format!("{name}_{round}_conv.csv"));
                emit_convergence_csv(&table, &cpath).unwrap();
                bytes.extend(std::fs::read(&cpath).unwrap());
            }
            digests.push(bytes);
        }
        c.check(
            digests[0] == digests[1],
            format!(
                "preset {name}: two invocations byte-identical ({} bytes)",
                digests[0].len()
            ),
        );
    }
    c.finish();
}
