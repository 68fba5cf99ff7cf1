//! Analytic electromagnetic field scenarios, evaluated pointwise at (r, t).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::UnitsSystem;
use crate::vec3::Vec3;

/// Minimum distance to a dipole before evaluation is reported as singular.
pub const DIPOLE_SINGULARITY_RADIUS: f64 = 1e-9;

/// Field values at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e: Vec3,
    pub b: Vec3,
}

/// One analytic (E, B) field law plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldScenario {
    /// Spatially and temporally uniform electric field, B = 0.
    UniformE { e0: Vec3 },
    /// Uniform magnetic field, E = 0.
    UniformB { b0: Vec3 },
    /// Uniform crossed fields.
    CrossedEB { e0: Vec3, b0: Vec3 },
    /// Scalar potential φ = phi_coeff·√(x²+y²) (so E = −∇φ) with
    /// B = ẑ·b_coeff·√(x²+y²).
    RadialWell { phi_coeff: f64, b_coeff: f64 },
    /// Two z-oriented point dipoles plus a transient uniform kick field
    /// active for t < kick_duration.
    MagneticBottle {
        moment: Vec3,
        dipole_positions: [Vec3; 2],
        kick_e: Vec3,
        kick_duration: f64,
    },
}

impl Default for FieldScenario {
    fn default() -> Self {
        FieldScenario::UniformB {
            b0: Vec3::new(0.0, 0.0, 1.0),
        }
    }
}

impl FieldScenario {
    /// Magnetic bottle with the stock parameters: moment 1e5 ẑ A·m²,
    /// dipoles at (0,0,±10) m, y-directed 2 kV/m kick for 10 ns.
    ///
    /// The kick magnitude is sized so a 10 ns pulse on an electron yields a
    /// clearly nonrelativistic trapped orbit (gyroradius ~1 m inside the
    /// 20 m bottle).
    pub fn bottle_default() -> Self {
        FieldScenario::MagneticBottle {
            moment: Vec3::new(0.0, 0.0, 1.0e5),
            dipole_positions: [Vec3::new(0.0, 0.0, -10.0), Vec3::new(0.0, 0.0, 10.0)],
            kick_e: Vec3::new(0.0, 2.0e3, 0.0),
            kick_duration: 1.0e-8,
        }
    }

    /// Radial well with the stock φ and B coefficients.
    pub fn radial_well_default() -> Self {
        FieldScenario::RadialWell {
            phi_coeff: 0.01,
            b_coeff: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: Vec3, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{what} must be finite")))
            }
        };
        match self {
            FieldScenario::UniformE { e0 } => finite(*e0, "e0"),
            FieldScenario::UniformB { b0 } => finite(*b0, "b0"),
            FieldScenario::CrossedEB { e0, b0 } => {
                finite(*e0, "e0")?;
                finite(*b0, "b0")
            }
            FieldScenario::RadialWell { phi_coeff, b_coeff } => {
                if phi_coeff.is_finite() && b_coeff.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(
                        "radial well coefficients must be finite".into(),
                    ))
                }
            }
            FieldScenario::MagneticBottle {
                moment,
                dipole_positions,
                kick_e,
                kick_duration,
            } => {
                finite(*moment, "moment")?;
                finite(dipole_positions[0], "dipole position")?;
                finite(dipole_positions[1], "dipole position")?;
                finite(*kick_e, "kick_e")?;
                if dipole_positions[0] == dipole_positions[1] {
                    return Err(Error::InvalidConfig(
                        "dipole positions must be distinct".into(),
                    ));
                }
                if !kick_duration.is_finite() || *kick_duration < 0.0 {
                    return Err(Error::InvalidConfig("kick_duration must be >= 0".into()));
                }
                Ok(())
            }
        }
    }

    /// True when the scenario defines a scalar potential (used by the
    /// harness to report potential energy).
    pub fn potential(&self, r: Vec3) -> Option<f64> {
        match self {
            FieldScenario::RadialWell { phi_coeff, .. } => {
                Some(phi_coeff * (r.x * r.x + r.y * r.y).sqrt())
            }
            _ => None,
        }
    }

    /// Times at which the fields jump discontinuously. Multistep histories
    /// must not straddle these, so the harness restarts there.
    pub fn time_discontinuities(&self) -> Vec<f64> {
        match self {
            FieldScenario::MagneticBottle { kick_duration, .. } if *kick_duration > 0.0 => {
                vec![*kick_duration]
            }
            _ => Vec::new(),
        }
    }
}

/// Field of one point dipole with moment `m` located at `pos`:
/// B(r) = (μ₀/4π)(3 d (m·d)/|d|⁵ − m/|d|³) with d = r − pos.
fn dipole_b(r: Vec3, pos: Vec3, m: Vec3, mu0: f64) -> Result<Vec3> {
    let d = r - pos;
    let n2 = d.norm_squared();
    let n1 = n2.sqrt();
    if n1 < DIPOLE_SINGULARITY_RADIUS {
        return Err(Error::FieldSingularity(format!(
            "point ({}, {}, {}) within {DIPOLE_SINGULARITY_RADIUS:.0e} m of a dipole",
            r.x, r.y, r.z
        )));
    }
    let n5 = n2 * n2 * n1;
    let n3 = n2 * n1;
    Ok((d * (3.0 * m.dot(d) / n5) - m / n3) * (mu0 / (4.0 * std::f64::consts::PI)))
}

/// Evaluate a scenario's fields at position `r` and time `t`.
///
/// RadialWell on the axis (ρ = 0) returns E = B = 0: the B limit is 0 and
/// E has no limit there, so the on-axis value is pinned to 0 by convention.
pub fn eval_fields(
    scenario: &FieldScenario,
    r: Vec3,
    t: f64,
    units: &UnitsSystem,
) -> Result<FieldSample> {
    match scenario {
        FieldScenario::UniformE { e0 } => Ok(FieldSample {
            e: *e0,
            b: Vec3::ZERO,
        }),
        FieldScenario::UniformB { b0 } => Ok(FieldSample {
            e: Vec3::ZERO,
            b: *b0,
        }),
        FieldScenario::CrossedEB { e0, b0 } => Ok(FieldSample { e: *e0, b: *b0 }),
        FieldScenario::RadialWell { phi_coeff, b_coeff } => {
            let rho = (r.x * r.x + r.y * r.y).sqrt();
            if rho == 0.0 {
                return Ok(FieldSample {
                    e: Vec3::ZERO,
                    b: Vec3::ZERO,
                });
            }
            // E = -∇(phi_coeff·ρ) = -phi_coeff·ρ̂
            let e = Vec3::new(-phi_coeff * r.x / rho, -phi_coeff * r.y / rho, 0.0);
            let b = Vec3::new(0.0, 0.0, b_coeff * rho);
            Ok(FieldSample { e, b })
        }
        FieldScenario::MagneticBottle {
            moment,
            dipole_positions,
            kick_e,
            kick_duration,
        } => {
            let b = dipole_b(r, dipole_positions[0], *moment, units.mu0)?
                + dipole_b(r, dipole_positions[1], *moment, units.mu0)?;
            let e = if t < *kick_duration {
                *kick_e
            } else {
                Vec3::ZERO
            };
            Ok(FieldSample { e, b })
        }
    }
}
