//! Relativistic kinematic primitives shared by every pusher.
//!
//! The relativistic velocity u = γv is the working unknown throughout:
//! γ is always recovered from u as √(1 + |u|²/c²), which is a pure sum and
//! never cancels, unlike the v-form 1/√(1 − |v|²/c²) as |v| → c.

use serde::{Deserialize, Serialize};

use crate::vec3::Vec3;

/// Particle charge and mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Species {
    /// Charge (C in MKS, 1 in natural units); any sign.
    pub q: f64,
    /// Mass (kg in MKS, 1 in natural units); must be > 0.
    pub m: f64,
}

impl Species {
    pub fn new(q: f64, m: f64) -> Self {
        assert!(
            m > 0.0 && m.is_finite(),
            "species mass must be finite and > 0"
        );
        Species { q, m }
    }

    /// Charge-to-mass ratio q/m.
    pub fn qm(&self) -> f64 {
        self.q / self.m
    }
}

/// Unit system: natural (c = 1) or MKS.
///
/// Deserializes from `{"label": "natural"}` or `{"label": "mks"}`, with
/// optional `c`/`mu0` overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitsSystem {
    /// Speed of light.
    pub c: f64,
    /// Vacuum permeability; only the magnetic-bottle scenario uses it.
    pub mu0: f64,
    pub label: UnitsLabel,
}

impl<'de> Deserialize<'de> for UnitsSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            label: UnitsLabel,
            c: Option<f64>,
            mu0: Option<f64>,
        }
        let raw = Raw::deserialize(d)?;
        let mut base = match raw.label {
            UnitsLabel::Natural => UnitsSystem::natural(),
            UnitsLabel::Mks => UnitsSystem::mks(),
        };
        if let Some(c) = raw.c {
            base.c = c;
        }
        if let Some(mu0) = raw.mu0 {
            base.mu0 = mu0;
        }
        Ok(base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitsLabel {
    Natural,
    Mks,
}

impl UnitsSystem {
    /// Natural units: c = 1, mu0 = 4π.
    pub fn natural() -> Self {
        UnitsSystem {
            c: 1.0,
            mu0: 4.0 * std::f64::consts::PI,
            label: UnitsLabel::Natural,
        }
    }

    /// MKS units: c = 299 792 458 m/s, mu0 = 4π × 10⁻⁷.
    pub fn mks() -> Self {
        UnitsSystem {
            c: 299_792_458.0,
            mu0: 4.0e-7 * std::f64::consts::PI,
            label: UnitsLabel::Mks,
        }
    }
}

/// Position, relativistic velocity u = γv, and time of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub r: Vec3,
    pub u: Vec3,
    #[serde(default)]
    pub t: f64,
}

impl ParticleState {
    pub fn new(r: Vec3, u: Vec3, t: f64) -> Self {
        ParticleState { r, u, t }
    }

    pub fn gamma(&self, units: &UnitsSystem) -> f64 {
        gamma_from_u(self.u, units)
    }

    pub fn velocity(&self, units: &UnitsSystem) -> Vec3 {
        velocity_from_u(self.u, units)
    }
}

/// Lorentz factor from the relativistic velocity: γ = √(1 + |u|²/c²).
///
/// Total on finite input, ≥ 1, monotone in |u|.
pub fn gamma_from_u(u: Vec3, units: &UnitsSystem) -> f64 {
    let c = units.c;
    (1.0 + u.norm_squared() / (c * c)).sqrt()
}

/// Coordinate velocity v = u/γ; always |v| < c.
pub fn velocity_from_u(u: Vec3, units: &UnitsSystem) -> Vec3 {
    u / gamma_from_u(u, units)
}

/// Inverse map u = v/√(1 − |v|²/c²); requires |v| < c.
pub fn u_from_v(v: Vec3, units: &UnitsSystem) -> Vec3 {
    let c = units.c;
    let b2 = v.norm_squared() / (c * c);
    assert!(b2 < 1.0, "|v| must be below c");
    v / (1.0 - b2).sqrt()
}

/// Lorentz acceleration du/dt = (q/m)(E + v×B) with v = u/γ.
///
/// With E = 0 the result is exactly work-free: a·v = 0 up to round-off.
pub fn lorentz_acceleration(
    state: &ParticleState,
    e: Vec3,
    b: Vec3,
    sp: &Species,
    units: &UnitsSystem,
) -> Vec3 {
    let v = velocity_from_u(state.u, units);
    (e + v.cross(b)) * sp.qm()
}
