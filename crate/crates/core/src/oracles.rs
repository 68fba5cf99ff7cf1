//! Closed-form relativistic trajectories for the uniform-field experiments
//! and a fine-step reference integrator for everything else.

use crate::error::{Error, Result};
use crate::fields::FieldScenario;
use crate::kinematics::{gamma_from_u, ParticleState, Species, UnitsSystem};
use crate::pushers::rk4_reference_step;
use crate::vec3::Vec3;

/// Which closed form (or fallback) the harness binds to a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    LinearAccel,
    Cyclotron,
    CrossedEB,
    FineStepReference,
}

/// Displacement along E for constant acceleration from aligned initial
/// momentum: x(t) = (m c²/(q|E|))(γ(t) − γ₀) with u(t) = u₀ + (q|E|/m)t
/// and u₀ = c·√(γ₀² − 1).
pub fn linear_accel_position(
    t: f64,
    emag: f64,
    sp: &Species,
    gamma0: f64,
    units: &UnitsSystem,
) -> f64 {
    let c = units.c;
    let u0 = c * (gamma0 * gamma0 - 1.0).sqrt();
    let u = u0 + sp.q.abs() * emag * t / sp.m;
    let gamma = (1.0 + (u / c) * (u / c)).sqrt();
    sp.m * c * c / (sp.q.abs() * emag) * (gamma - gamma0)
}

/// Full state for the linear-acceleration configuration, with motion and E
/// along +x from the origin.
pub fn linear_accel_state(
    t: f64,
    emag: f64,
    sp: &Species,
    gamma0: f64,
    units: &UnitsSystem,
) -> ParticleState {
    let c = units.c;
    let u0 = c * (gamma0 * gamma0 - 1.0).sqrt();
    let u = u0 + sp.q.abs() * emag * t / sp.m;
    ParticleState::new(
        Vec3::new(linear_accel_position(t, emag, sp, gamma0, units), 0.0, 0.0),
        Vec3::new(u, 0.0, 0.0),
        t,
    )
}

/// Circular orbit under B = b_z ẑ with u⁰ = (u₀, 0, 0) starting at the
/// origin: r(t) = (v₀γ₀m/(q b_z))·(sin ωt, cos ωt − 1, 0), ω = q b_z/(γ₀ m).
///
/// The signed b_z and charge give the rotation sense; the gyro frequency
/// carries 1/γ₀ so the relativistic period stretches by exactly γ₀.
pub fn cyclotron_position(
    t: f64,
    b_z: f64,
    sp: &Species,
    v0: f64,
    gamma0: f64,
    _units: &UnitsSystem,
) -> Vec3 {
    let omega = sp.q * b_z / (gamma0 * sp.m);
    let prefactor = v0 * gamma0 * sp.m / (sp.q * b_z);
    Vec3::new(
        prefactor * (omega * t).sin(),
        prefactor * ((omega * t).cos() - 1.0),
        0.0,
    )
}

/// Full cyclotron state: u(t) = u₀(cos ωt, −sin ωt, 0).
pub fn cyclotron_state(
    t: f64,
    b_z: f64,
    sp: &Species,
    u0: f64,
    units: &UnitsSystem,
) -> ParticleState {
    let gamma0 = gamma_from_u(Vec3::new(u0, 0.0, 0.0), units);
    let v0 = u0 / gamma0;
    let omega = sp.q * b_z / (gamma0 * sp.m);
    let u = Vec3::new(u0 * (omega * t).cos(), -u0 * (omega * t).sin(), 0.0);
    ParticleState::new(cyclotron_position(t, b_z, sp, v0, gamma0, units), u, t)
}

/// Relativistic cyclotron period 2πγ₀m/(q b_z).
pub fn cyclotron_period(b_z: f64, sp: &Species, gamma0: f64) -> f64 {
    2.0 * std::f64::consts::PI * gamma0 * sp.m / (sp.q * b_z).abs()
}

/// Parameter U(t) of the crossed-field closed form, the real root of
/// U + U³/6 = t. Valid for all real t; for t < 0 the conjugate expression
/// 8/(√(9t²+8) + 3|t|) avoids cancellation.
pub fn crossed_field_u(t: f64) -> f64 {
    let disc = (9.0 * t * t + 8.0).sqrt();
    let x = if t >= 0.0 {
        disc + 3.0 * t
    } else {
        8.0 / (disc - 3.0 * t)
    };
    let c = x.cbrt();
    c - 2.0 / c
}

/// Position for the fixed crossed-field configuration E = (0,1,0),
/// B = (0,0,1), particle starting at rest at the origin, q = m = c = 1:
/// r(t) = (U³/6, U²/2, 0).
pub fn crossed_field_position(t: f64) -> Vec3 {
    let u = crossed_field_u(t);
    Vec3::new(u * u * u / 6.0, u * u / 2.0, 0.0)
}

/// Full state for the crossed-field configuration: u(t) = (U²/2, U, 0).
pub fn crossed_field_state(t: f64) -> ParticleState {
    let u = crossed_field_u(t);
    ParticleState::new(
        Vec3::new(u * u * u / 6.0, u * u / 2.0, 0.0),
        Vec3::new(u * u / 2.0, u, 0.0),
        t,
    )
}

/// Fine-step RK4 reference trajectory with a step-halving self-check.
#[derive(Debug, Clone)]
pub struct ReferenceTrajectory {
    pub samples: Vec<ParticleState>,
    /// Worst relative disagreement between the dt_ref and dt_ref/2 runs.
    pub halving_disagreement: f64,
}

/// Integrate `scenario` from `initial` to `t_end` with RK4 at
/// dt_ref = spacing/substeps, sampling `n_samples` states at uniform times
/// (endpoints included). The whole run is repeated at half the step and
/// must agree to `tol_rel`, else [`Error::ReferenceNotConverged`].
pub fn reference_trajectory(
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    initial: &ParticleState,
    t_end: f64,
    n_samples: usize,
) -> Result<ReferenceTrajectory> {
    const SUBSTEPS: usize = 1000;
    const TOL_REL: f64 = 1e-10;
    if t_end <= initial.t {
        return Err(Error::InvalidConfig(
            "t_end must exceed initial time".into(),
        ));
    }
    if n_samples < 2 {
        return Err(Error::InvalidConfig(
            "need at least 2 reference samples".into(),
        ));
    }
    let coarse = rk4_sampled(scenario, sp, units, initial, t_end, n_samples, SUBSTEPS)?;
    let fine = rk4_sampled(scenario, sp, units, initial, t_end, n_samples, 2 * SUBSTEPS)?;
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.iter().zip(&fine) {
        let scale = a.r.norm().max(a.u.norm()).max(1.0);
        worst = worst
            .max((a.r - b.r).norm() / scale)
            .max((a.u - b.u).norm() / scale);
    }
    if worst > TOL_REL {
        return Err(Error::ReferenceNotConverged(worst));
    }
    Ok(ReferenceTrajectory {
        samples: fine,
        halving_disagreement: worst,
    })
}

fn rk4_sampled(
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    initial: &ParticleState,
    t_end: f64,
    n_samples: usize,
    substeps: usize,
) -> Result<Vec<ParticleState>> {
    let spacing = (t_end - initial.t) / (n_samples - 1) as f64;
    let dt = spacing / substeps as f64;
    let mut state = *initial;
    let mut samples = Vec::with_capacity(n_samples);
    samples.push(state);
    for i in 1..n_samples {
        for _ in 0..substeps {
            state = rk4_reference_step(&state, scenario, sp, units, dt)?;
        }
        // pin sample times exactly to the uniform grid
        state.t = initial.t + i as f64 * spacing;
        samples.push(state);
    }
    Ok(samples)
}

/// Pick the closed-form oracle matching a scenario and initial state, if the
/// bundled configurations apply (otherwise the fine-step reference is used).
pub fn bind_oracle(
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    initial: &ParticleState,
) -> OracleKind {
    match scenario {
        FieldScenario::UniformE { e0 } => {
            // closed form needs u0 parallel to E (1D motion)
            let aligned =
                initial.u.cross(*e0).norm() <= 1e-12 * initial.u.norm().max(1.0) * e0.norm();
            if aligned && e0.norm() > 0.0 {
                OracleKind::LinearAccel
            } else {
                OracleKind::FineStepReference
            }
        }
        FieldScenario::UniformB { b0 } => {
            let planar = b0.x == 0.0 && b0.y == 0.0 && initial.u.z == 0.0 && initial.u.y == 0.0;
            if planar && b0.z != 0.0 {
                OracleKind::Cyclotron
            } else {
                OracleKind::FineStepReference
            }
        }
        FieldScenario::CrossedEB { e0, b0 } => {
            let canonical = *e0 == Vec3::new(0.0, 1.0, 0.0)
                && *b0 == Vec3::new(0.0, 0.0, 1.0)
                && initial.u == Vec3::ZERO
                && sp.q == 1.0
                && sp.m == 1.0
                && units.c == 1.0;
            if canonical {
                OracleKind::CrossedEB
            } else {
                OracleKind::FineStepReference
            }
        }
        _ => OracleKind::FineStepReference,
    }
}

/// Evaluate the bound closed form at time `t` (absolute position including
/// the initial offset). Only valid for kinds other than FineStepReference.
pub fn oracle_state(
    kind: OracleKind,
    scenario: &FieldScenario,
    sp: &Species,
    units: &UnitsSystem,
    initial: &ParticleState,
    t: f64,
) -> ParticleState {
    match kind {
        OracleKind::LinearAccel => {
            let FieldScenario::UniformE { e0 } = scenario else {
                panic!("oracle bound to wrong scenario");
            };
            let gamma0 = initial.gamma(units);
            let emag = e0.norm();
            let dir = *e0 / emag;
            // signed displacement along the force direction q·E
            let force_dir = if sp.q >= 0.0 { dir } else { -dir };
            let mut st = linear_accel_state(t - initial.t, emag, sp, gamma0, units);
            let x = st.r.x;
            let umag = st.u.x;
            st.r = initial.r + force_dir * x;
            st.u = force_dir * umag;
            st.t = t;
            st
        }
        OracleKind::Cyclotron => {
            let FieldScenario::UniformB { b0 } = scenario else {
                panic!("oracle bound to wrong scenario");
            };
            let mut st = cyclotron_state(t - initial.t, b0.z, sp, initial.u.x, units);
            st.r += initial.r;
            st.t = t;
            st
        }
        OracleKind::CrossedEB => {
            let mut st = crossed_field_state(t - initial.t);
            st.r += initial.r;
            st.t = t;
            st
        }
        OracleKind::FineStepReference => panic!("fine-step reference has no closed form"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn nat() -> UnitsSystem {
        UnitsSystem::natural()
    }

    fn unit_species() -> Species {
        Species::new(1.0, 1.0)
    }

    #[test]
    fn linear_accel_starts_at_zero() {
        let x = linear_accel_position(0.0, 1.0, &unit_species(), 2f64.sqrt(), &nat());
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn linear_accel_at_t1() {
        // sqrt(5) - sqrt(2)
        let x = linear_accel_position(1.0, 1.0, &unit_species(), 2f64.sqrt(), &nat());
        assert_relative_eq!(x, 0.821_854_415_126_694_6, max_relative = 1e-14);
    }

    #[test]
    fn linear_accel_ultrarelativistic_limit() {
        let x = linear_accel_position(100.0, 1.0, &unit_species(), 2f64.sqrt(), &nat());
        assert!((x / 100.0 - 1.0).abs() < 0.03, "x/t = {}", x / 100.0);
    }

    #[test]
    fn linear_accel_convex_in_t() {
        let sp = unit_species();
        let f = |t: f64| linear_accel_position(t, 1.0, &sp, 2f64.sqrt(), &nat());
        for i in 0..50 {
            let t = 0.1 * i as f64;
            let second = f(t + 0.2) - 2.0 * f(t + 0.1) + f(t);
            assert!(second >= -1e-12);
        }
    }

    #[test]
    fn cyclotron_starts_at_origin() {
        let r = cyclotron_position(
            0.0,
            1.0,
            &unit_species(),
            1.0 / 2f64.sqrt(),
            2f64.sqrt(),
            &nat(),
        );
        assert_eq!(r, Vec3::ZERO);
    }

    #[test]
    fn cyclotron_radius_is_one_for_unit_momentum() {
        // u0 = (1,0,0): v0 = 1/sqrt2, gamma0 = sqrt2 -> r_c = 1
        let sp = unit_species();
        let g0 = 2f64.sqrt();
        let v0 = 1.0 / 2f64.sqrt();
        let center = Vec3::new(0.0, -1.0, 0.0);
        for i in 0..100 {
            let t = 0.37 * i as f64;
            let r = cyclotron_position(t, 1.0, &sp, v0, g0, &nat());
            assert_relative_eq!((r - center).norm(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn cyclotron_half_period() {
        let sp = unit_species();
        let g0 = 2f64.sqrt();
        let t_half = cyclotron_period(1.0, &sp, g0) / 2.0;
        assert_relative_eq!(
            t_half,
            std::f64::consts::PI * 2f64.sqrt(),
            max_relative = 1e-15
        );
        let r = cyclotron_position(t_half, 1.0, &sp, 1.0 / 2f64.sqrt(), g0, &nat());
        assert_abs_diff_eq!(r.x, 0.0, epsilon = 1e-14);
        assert_relative_eq!(r.y, -2.0, max_relative = 1e-13);
    }

    #[test]
    fn crossed_field_at_zero() {
        let r = crossed_field_position(0.0);
        assert!(r.norm() <= 1e-30, "r(0) = {r:?}");
        assert_abs_diff_eq!(crossed_field_u(0.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn crossed_field_at_t1() {
        let r = crossed_field_position(1.0);
        assert_relative_eq!(r.x, 0.115_377_799_603_094_69, max_relative = 1e-13);
        assert_relative_eq!(r.y, 0.391_278_218_717_531_25, max_relative = 1e-13);
    }

    #[test]
    fn crossed_field_small_t_nonrelativistic() {
        let r = crossed_field_position(0.01);
        assert_relative_eq!(r.y, 0.5e-4, max_relative = 0.01);
    }

    #[test]
    fn crossed_field_u_odd_and_stable_for_negative_t() {
        for t in [0.1, 1.0, 17.0, 250.0] {
            assert_relative_eq!(
                crossed_field_u(-t),
                -crossed_field_u(t),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn crossed_field_satisfies_ode_by_central_difference() {
        // du/dt at t=1 vs E + v x B, h = 1e-4
        let h = 1e-4;
        let up = crossed_field_state(1.0 + h).u;
        let um = crossed_field_state(1.0 - h).u;
        let dudt = (up - um) / (2.0 * h);
        let st = crossed_field_state(1.0);
        let v = st.velocity(&nat());
        let rhs = Vec3::new(0.0, 1.0, 0.0) + v.cross(Vec3::new(0.0, 0.0, 1.0));
        assert!((dudt - rhs).norm() <= 1e-6, "residual {:?}", dudt - rhs);
    }

    #[test]
    fn reference_matches_cyclotron_oracle() {
        let sp = unit_species();
        let units = nat();
        let scenario = FieldScenario::UniformB {
            b0: Vec3::new(0.0, 0.0, 1.0),
        };
        let initial = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
        let t_end = cyclotron_period(1.0, &sp, 2f64.sqrt());
        let reference = reference_trajectory(&scenario, &sp, &units, &initial, t_end, 25).unwrap();
        for s in &reference.samples {
            let exact = cyclotron_state(s.t, 1.0, &sp, 1.0, &units);
            assert!((s.r - exact.r).norm() <= 1e-10, "err {:?}", s.r - exact.r);
        }
    }

    #[test]
    fn reference_zero_field_is_linear() {
        let sp = unit_species();
        let units = nat();
        let scenario = FieldScenario::UniformE { e0: Vec3::ZERO };
        let u = Vec3::new(0.6, 0.0, -0.3);
        let v = crate::kinematics::velocity_from_u(u, &units);
        let initial = ParticleState::new(Vec3::new(1.0, 2.0, 3.0), u, 0.0);
        let reference = reference_trajectory(&scenario, &sp, &units, &initial, 5.0, 11).unwrap();
        for s in &reference.samples {
            let expect = initial.r + v * s.t;
            // exact up to the rounding accumulated over ~2e4 substeps
            assert!((s.r - expect).norm() <= 1e-10);
            assert_eq!(s.u, u);
        }
    }

    #[test]
    fn reference_conserves_radial_well_energy() {
        // total energy (γ−1)mc² + qφ under the reference integrator over
        // the space-varying-field configuration
        let sp = unit_species();
        let units = nat();
        let scenario = FieldScenario::radial_well_default();
        let initial = ParticleState::new(Vec3::new(0.9, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0), 0.0);
        let reference = reference_trajectory(&scenario, &sp, &units, &initial, 0.75, 11).unwrap();
        let energy =
            |s: &ParticleState| (s.gamma(&units) - 1.0) + sp.q * scenario.potential(s.r).unwrap();
        let e0 = energy(&reference.samples[0]);
        let worst = reference
            .samples
            .iter()
            .map(|s| (energy(s) - e0).abs() / e0.abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-10, "energy drift {worst:.3e}");
    }

    #[test]
    fn oracle_binding() {
        let sp = unit_species();
        let units = nat();
        let at_rest = ParticleState::new(Vec3::ZERO, Vec3::ZERO, 0.0);
        let moving_x = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
        assert_eq!(
            bind_oracle(
                &FieldScenario::UniformE {
                    e0: Vec3::new(1.0, 0.0, 0.0)
                },
                &sp,
                &units,
                &moving_x
            ),
            OracleKind::LinearAccel
        );
        assert_eq!(
            bind_oracle(
                &FieldScenario::UniformB {
                    b0: Vec3::new(0.0, 0.0, 1.0)
                },
                &sp,
                &units,
                &moving_x
            ),
            OracleKind::Cyclotron
        );
        assert_eq!(
            bind_oracle(
                &FieldScenario::CrossedEB {
                    e0: Vec3::new(0.0, 1.0, 0.0),
                    b0: Vec3::new(0.0, 0.0, 1.0)
                },
                &sp,
                &units,
                &at_rest
            ),
            OracleKind::CrossedEB
        );
        assert_eq!(
            bind_oracle(&FieldScenario::radial_well_default(), &sp, &units, &at_rest),
            OracleKind::FineStepReference
        );
    }
}
