//! Vector-field guidance onto an elliptical orbit: tangential heading along
//! the local concentric ellipse, an offset heading steering toward the
//! level-set value 1, and a saturated proportional turn-rate command.
//!
//! Everything here works in the ellipse-centric frame, so one code path
//! serves stationary and moving ellipses.

use serde::{Deserialize, Serialize};

use crate::geom::{wrap_angle, Vec2};

/// Controller gains: `k_gamma` shapes the offset heading, `k_psi` (1/s) is
/// the proportional heading-loop gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceGains {
    pub k_gamma: f64,
    pub k_psi: f64,
}

/// Traversal direction on the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitDirection {
    Ccw,
    Cw,
}

/// The composed heading command at one point of the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingCommand {
    pub psi_t: f64,
    pub psi_o: f64,
    pub psi_d: f64,
    pub gamma: f64,
}

/// Tangential direction of the concentric ellipse through `p_local`
/// (coordinates in the ellipse-centered tilted frame).
///
/// CCW: `arctan2(b^2 x, -a^2 y)`; CW: `arctan2(-b^2 x, a^2 y)`. The origin,
/// where the field is undefined, maps to 0.
pub fn tangent_heading(p_local: Vec2, a: f64, b: f64, dir: OrbitDirection) -> f64 {
    if p_local.x == 0.0 && p_local.y == 0.0 {
        return 0.0;
    }
    match dir {
        OrbitDirection::Ccw => (b * b * p_local.x).atan2(-a * a * p_local.y),
        OrbitDirection::Cw => (-b * b * p_local.x).atan2(a * a * p_local.y),
    }
}

/// Offset heading `arctan(k_gamma * (gamma - 1))`: negative inside the
/// ellipse, zero on it, positive outside; always within `(-pi/2, pi/2)`.
pub fn offset_heading(gamma: f64, k_gamma: f64) -> f64 {
    (k_gamma * (gamma - 1.0)).atan()
}

/// Compose tangential and offset headings at the agent's position in the
/// ellipse frame. CCW adds the offset, CW subtracts it.
pub fn desired_heading(
    agent_local: Vec2,
    a: f64,
    b: f64,
    dir: OrbitDirection,
    gains: GuidanceGains,
) -> HeadingCommand {
    let gamma = (agent_local.x / a).powi(2) + (agent_local.y / b).powi(2);
    let psi_t = tangent_heading(agent_local, a, b, dir);
    let psi_o = offset_heading(gamma, gains.k_gamma);
    let psi_d = match dir {
        OrbitDirection::Ccw => wrap_angle(psi_t + psi_o),
        OrbitDirection::Cw => wrap_angle(psi_t - psi_o),
    };
    HeadingCommand {
        psi_t,
        psi_o,
        psi_d,
        gamma,
    }
}

/// Unsaturated proportional turn rate `k_psi * wrap(psi_d - psi_e)`.
///
/// The heading error is wrapped to the shortest arc before the gain is
/// applied; a raw difference would command spurious full turns across the
/// `+-pi` seam.
pub fn proportional_rate(psi_d: f64, psi_e: f64, k_psi: f64) -> f64 {
    k_psi * wrap_angle(psi_d - psi_e)
}

/// Proportional turn-rate command clamped into `[-omega_max, omega_max]`.
pub fn angular_velocity_command(psi_d: f64, psi_e: f64, k_psi: f64, omega_max: f64) -> f64 {
    proportional_rate(psi_d, psi_e, k_psi).clamp(-omega_max, omega_max)
}
