//! Motion models: the unicycle agent under a zero-order-hold turn-rate
//! command with optional constant wind, and the convoy target models.

use serde::{Deserialize, Serialize};

use crate::error::RegressionError;
use crate::geom::{wrap_angle, Vec2};
use crate::regression::ConvoySnapshot;

/// Agent position and heading in the global frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub position: Vec2,
    pub psi: f64,
}

/// Unicycle state: pose plus commanded constant linear speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub pose: Pose2D,
    pub speed: f64,
}

/// Constant velocity disturbance added component-wise to the agent's
/// position derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wind {
    pub speed: f64,
    pub heading: f64,
}

impl Wind {
    pub const NONE: Wind = Wind {
        speed: 0.0,
        heading: 0.0,
    };

    pub fn velocity(&self) -> Vec2 {
        Vec2::new(
            self.speed * self.heading.cos(),
            self.speed * self.heading.sin(),
        )
    }
}

/// One RK4 step of the unicycle ODE
/// `(xdot, ydot, psidot) = (V cos psi + w_x, V sin psi + w_y, omega)`
/// with `omega` held constant across the step. The heading is wrapped after
/// the step, not inside the stages.
pub fn step_unicycle(s: AgentState, omega: f64, wind: Wind, dt: f64) -> AgentState {
    assert!(dt > 0.0, "step_unicycle requires dt > 0");
    let w = wind.velocity();
    let v = s.speed;
    let deriv = |psi: f64| (v * psi.cos() + w.x, v * psi.sin() + w.y, omega);

    let psi0 = s.pose.psi;
    let k1 = deriv(psi0);
    let k2 = deriv(psi0 + 0.5 * dt * k1.2);
    let k3 = deriv(psi0 + 0.5 * dt * k2.2);
    let k4 = deriv(psi0 + dt * k3.2);

    let x = s.pose.position.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
    let y = s.pose.position.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    let psi = wrap_angle(psi0 + dt * omega);
    AgentState {
        pose: Pose2D {
            position: Vec2::new(x, y),
            psi,
        },
        speed: s.speed,
    }
}

/// Point on the Lissajous curve `(A cos phi, B sin 2phi)`.
pub fn lissajous_position(phi: f64, amp_x: f64, amp_y: f64) -> Vec2 {
    Vec2::new(amp_x * phi.cos(), amp_y * (2.0 * phi).sin())
}

/// Convoy motion model. Targets are ordered along the direction of travel;
/// the last one is the leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetModel {
    /// Targets on `(A cos phi, B sin 2phi)` with `phi_i(t) = phi_init[i] +
    /// phi_rate * t`.
    Lissajous {
        amp_x: f64,
        amp_y: f64,
        phi_rate: f64,
        phi_init: Vec<f64>,
    },
    /// Targets translating along a common heading at constant speed from
    /// per-target origins.
    LinearPath {
        heading: f64,
        speed: f64,
        origins: Vec<Vec2>,
    },
    /// Targets advancing by arc length along a shared polyline, each from
    /// its own initial offset; motion clamps at the final vertex.
    WaypointPath {
        points: Vec<Vec2>,
        speed: f64,
        offsets: Vec<f64>,
    },
}

impl TargetModel {
    pub fn target_count(&self) -> usize {
        match self {
            TargetModel::Lissajous { phi_init, .. } => phi_init.len(),
            TargetModel::LinearPath { origins, .. } => origins.len(),
            TargetModel::WaypointPath { offsets, .. } => offsets.len(),
        }
    }

    /// Closed-form upper bound on any target's speed; for the Lissajous
    /// model this is `sqrt(A^2 + 4 B^2) * phi_rate`.
    pub fn max_speed(&self) -> f64 {
        match self {
            TargetModel::Lissajous {
                amp_x,
                amp_y,
                phi_rate,
                ..
            } => (amp_x * amp_x + 4.0 * amp_y * amp_y).sqrt() * phi_rate.abs(),
            TargetModel::LinearPath { speed, .. } => speed.abs(),
            TargetModel::WaypointPath { speed, .. } => speed.abs(),
        }
    }
}

fn polyline_point(points: &[Vec2], s: f64) -> Vec2 {
    let mut remaining = s.max(0.0);
    for pair in points.windows(2) {
        let seg = pair[1].sub(pair[0]);
        let len = seg.norm();
        if remaining <= len || len == 0.0 {
            if len == 0.0 {
                continue;
            }
            return pair[0].add(seg.scale(remaining / len));
        }
        remaining -= len;
    }
    *points.last().expect("polyline has at least one point")
}

/// Target positions at time `t`, ordered so the leader is last.
pub fn advance_targets(model: &TargetModel, t: f64) -> Result<ConvoySnapshot, RegressionError> {
    let positions = match model {
        TargetModel::Lissajous {
            amp_x,
            amp_y,
            phi_rate,
            phi_init,
        } => phi_init
            .iter()
            .map(|phi0| lissajous_position(phi0 + phi_rate * t, *amp_x, *amp_y))
            .collect(),
        TargetModel::LinearPath {
            heading,
            speed,
            origins,
        } => {
            let step = Vec2::new(heading.cos(), heading.sin()).scale(speed * t);
            origins.iter().map(|o| o.add(step)).collect()
        }
        TargetModel::WaypointPath {
            points,
            speed,
            offsets,
        } => offsets
            .iter()
            .map(|off| polyline_point(points, off + speed * t))
            .collect(),
    };
    ConvoySnapshot::new(positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn agent(x: f64, y: f64, psi: f64, v: f64) -> AgentState {
        AgentState {
            pose: Pose2D {
                position: Vec2::new(x, y),
                psi,
            },
            speed: v,
        }
    }

    #[test]
    fn straight_line_step() {
        let s = step_unicycle(agent(0.0, 0.0, 0.0, 15.0), 0.0, Wind::NONE, 1.0);
        assert!((s.pose.position.x - 15.0).abs() < 1e-12);
        assert!(s.pose.position.y.abs() < 1e-12);
        assert_eq!(s.pose.psi, 0.0);
    }

    #[test]
    fn pure_wind_drift() {
        let w = Wind {
            speed: 3.0,
            heading: FRAC_PI_4,
        };
        let s = step_unicycle(agent(0.0, 0.0, 0.0, 0.0), 0.0, w, 1.0);
        let d = 3.0 / 2.0f64.sqrt();
        assert!((s.pose.position.x - d).abs() < 1e-12);
        assert!((s.pose.position.y - d).abs() < 1e-12);
    }

    #[test]
    fn circle_closure() {
        // omega=0.3, V=15: circle of radius 50 m, period 2pi/0.3
        let dt = 0.05;
        let steps = (2.0 * PI / 0.3 / dt).round() as usize;
        let dt = 2.0 * PI / 0.3 / steps as f64;
        let start = agent(10.0, -5.0, 1.1, 15.0);
        let mut s = start;
        for _ in 0..steps {
            s = step_unicycle(s, 0.3, Wind::NONE, dt);
        }
        assert!(s.pose.position.dist(start.pose.position) < 1e-3);
    }

    #[test]
    fn rk4_matches_refined_step_on_circle() {
        // integrate 100 s at dt=0.05 against a dt/10 reference
        let mut coarse = agent(0.0, 0.0, 0.3, 12.0);
        let mut fine = coarse;
        let dt = 0.05;
        for _ in 0..2000 {
            coarse = step_unicycle(coarse, 0.25, Wind::NONE, dt);
            for _ in 0..10 {
                fine = step_unicycle(fine, 0.25, Wind::NONE, dt / 10.0);
            }
        }
        assert!(coarse.pose.position.dist(fine.pose.position) < 1e-4);
    }

    #[test]
    fn wind_is_pure_translation() {
        // same omega sequence with and without wind: trajectories differ by
        // exactly t * wind velocity at every step
        let w = Wind {
            speed: 3.0,
            heading: FRAC_PI_4,
        };
        let mut dry = agent(5.0, 5.0, 0.4, 15.0);
        let mut wet = dry;
        let dt = 0.05;
        for k in 1..=500 {
            let omega = 0.2 * ((k as f64) * 0.01).sin();
            dry = step_unicycle(dry, omega, Wind::NONE, dt);
            wet = step_unicycle(wet, omega, w, dt);
            let t = k as f64 * dt;
            let expected = dry.pose.position.add(w.velocity().scale(t));
            assert!(wet.pose.position.dist(expected) < 1e-9);
            assert_eq!(wet.pose.psi, dry.pose.psi);
        }
    }

    #[test]
    #[should_panic]
    fn rejects_non_positive_dt() {
        step_unicycle(agent(0.0, 0.0, 0.0, 1.0), 0.0, Wind::NONE, 0.0);
    }

    #[test]
    fn lissajous_values() {
        let p = lissajous_position(0.0, 1500.0, 1000.0);
        assert_eq!(p, Vec2::new(1500.0, 0.0));
        let q = lissajous_position(std::f64::consts::FRAC_PI_2, 1500.0, 1000.0);
        assert!(q.x.abs() < 1e-10);
        assert!(q.y.abs() < 1e-10);
    }

    #[test]
    fn lissajous_speed_bound_is_three() {
        let model = TargetModel::Lissajous {
            amp_x: 1500.0,
            amp_y: 1000.0,
            phi_rate: 0.0012,
            phi_init: vec![0.0],
        };
        assert!((model.max_speed() - 3.0).abs() < 1e-12);
        // densely sampled parametric speed never exceeds the closed form
        let (a, b, rate) = (1500.0, 1000.0, 0.0012);
        for i in 0..20_000 {
            let phi = 2.0 * PI * i as f64 / 20_000.0;
            let v = (a * a * phi.sin().powi(2) + 4.0 * b * b * (2.0 * phi).cos().powi(2)).sqrt()
                * rate;
            assert!(v <= model.max_speed() + 1e-9);
        }
    }

    #[test]
    fn lissajous_sim1_spacing() {
        let phi_init: Vec<f64> = (0..5).map(|i| i as f64 * PI / 20.0).collect();
        let model = TargetModel::Lissajous {
            amp_x: 1500.0,
            amp_y: 1000.0,
            phi_rate: 0.0012,
            phi_init,
        };
        let snap = advance_targets(&model, 0.0).unwrap();
        assert_eq!(snap.len(), 5);
        for (i, p) in snap.positions.iter().enumerate() {
            let phi = i as f64 * PI / 20.0;
            assert!(p.dist(lissajous_position(phi, 1500.0, 1000.0)) < 1e-12);
        }
    }

    #[test]
    fn linear_path_advance() {
        let model = TargetModel::LinearPath {
            heading: 0.0,
            speed: 2.0,
            origins: vec![Vec2::new(0.0, 0.0), Vec2::new(5.0, 0.0)],
        };
        let snap = advance_targets(&model, 10.0).unwrap();
        assert!(snap.positions[0].dist(Vec2::new(20.0, 0.0)) < 1e-12);
        assert!(snap.positions[1].dist(Vec2::new(25.0, 0.0)) < 1e-12);
    }

    #[test]
    fn waypoint_path_advance_and_clamp() {
        let model = TargetModel::WaypointPath {
            points: vec![Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0), Vec2::new(10.0, 10.0)],
            speed: 1.0,
            offsets: vec![0.0, 5.0],
        };
        let snap = advance_targets(&model, 7.0).unwrap();
        assert!(snap.positions[0].dist(Vec2::new(7.0, 0.0)) < 1e-12);
        assert!(snap.positions[1].dist(Vec2::new(10.0, 2.0)) < 1e-12);
        let end = advance_targets(&model, 1e6).unwrap();
        assert!(end.positions[1].dist(Vec2::new(10.0, 10.0)) < 1e-12);
    }
}
