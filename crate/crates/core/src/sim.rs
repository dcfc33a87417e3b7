//! Per-tick simulation loop: targets advance, the bounding rectangle is
//! refit, the orbit ellipse is selected with stand-off inflation and
//! turn-radius floors, the guidance command is computed, and the unicycle
//! steps. Every run is fully deterministic.

use serde::{Deserialize, Serialize};

use crate::dynamics::{advance_targets, step_unicycle, AgentState, Pose2D, TargetModel, Wind};
use crate::error::SimError;
use crate::geom::{ellipse_level, to_frame, wrap_angle, EllipseSpec, Vec2};
use crate::guidance::{desired_heading, proportional_rate, GuidanceGains, OrbitDirection};
use crate::regression::{init_regression, update_regression, RegressionFrame};

/// Agent speed/turn-rate envelope and the stand-off clearance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentLimits {
    pub v_a_min: f64,
    pub v_a_max: f64,
    pub v_t_max: f64,
    pub omega_max: f64,
    pub standoff: f64,
}

impl AgentLimits {
    /// Maximum relative speed between agent and targets.
    pub fn v_r_max(&self) -> f64 {
        self.v_a_max + self.v_t_max
    }
}

/// What the agent orbits: a fixed ellipse, or a convoy whose ellipse is
/// refit every tick.
#[derive(Debug, Clone, PartialEq)]
pub enum Mission {
    FixedEllipse(EllipseSpec),
    Convoy(TargetModel),
}

/// A full, deterministic scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub description: String,
    pub limits: AgentLimits,
    pub gains: GuidanceGains,
    pub direction: OrbitDirection,
    pub agent_init: Pose2D,
    pub agent_speed: f64,
    pub wind: Wind,
    pub mission: Mission,
    pub dt: f64,
    pub duration: f64,
    /// Run the regression every this many ticks, holding the last frame in
    /// between (zero-order hold). 1 = every tick.
    pub regression_every: u32,
}

impl SimConfig {
    /// Check every physical invariant, naming the violated one.
    pub fn validate(&self) -> Result<(), SimError> {
        let inv = |cond: bool, msg: &str| {
            if cond {
                Ok(())
            } else {
                Err(SimError::InvalidConfig(msg.to_string()))
            }
        };
        inv(self.dt.is_finite() && self.dt > 0.0, "dt > 0")?;
        inv(
            self.duration.is_finite() && self.duration > 0.0,
            "duration > 0",
        )?;
        let l = &self.limits;
        inv(
            l.omega_max.is_finite() && l.omega_max > 0.0,
            "omega_max > 0",
        )?;
        inv(l.v_a_min.is_finite() && l.v_a_min > 0.0, "V_A_min > 0")?;
        inv(l.v_a_max.is_finite() && l.v_a_max >= l.v_a_min, "V_A_max >= V_A_min")?;
        inv(
            self.agent_speed >= l.v_a_min && self.agent_speed <= l.v_a_max,
            "V_A within [V_A_min, V_A_max]",
        )?;
        inv(
            l.v_t_max.is_finite() && l.v_t_max >= 0.0 && l.v_t_max < l.v_a_min,
            "V_T_max < V_A_min",
        )?;
        inv(l.standoff.is_finite() && l.standoff >= 0.0, "standoff >= 0")?;
        inv(
            self.gains.k_gamma.is_finite() && self.gains.k_gamma > 0.0,
            "k_gamma > 0",
        )?;
        inv(
            self.gains.k_psi.is_finite() && self.gains.k_psi > 0.0,
            "k_psi > 0",
        )?;
        inv(
            self.agent_init.position.is_finite() && self.agent_init.psi.is_finite(),
            "finite agent initial pose",
        )?;
        inv(
            self.wind.speed.is_finite() && self.wind.speed >= 0.0 && self.wind.heading.is_finite(),
            "finite wind with speed >= 0",
        )?;
        inv(self.regression_every >= 1, "regression_every >= 1")?;
        match &self.mission {
            Mission::FixedEllipse(_) => {} // EllipseSpec construction already enforces a >= b > 0
            Mission::Convoy(model) => {
                inv(model.target_count() >= 1, "at least one target")?;
                inv(
                    model.max_speed() <= l.v_t_max + 1e-9,
                    "target speed bound <= V_T_max",
                )?;
                if let TargetModel::WaypointPath { points, offsets, .. } = model {
                    inv(points.len() >= 2, "waypoint path with >= 2 points")?;
                    inv(
                        offsets.iter().all(|o| o.is_finite() && *o >= 0.0),
                        "finite non-negative waypoint offsets",
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Orbit semi-axes from the rectangle fit: stand-off inflation, the
/// minimum-area circumscription, and the turn-radius floors which keep the
/// ellipse's tightest curvature flyable at maximum relative speed.
pub fn select_axes(frame: &RegressionFrame, limits: &AgentLimits) -> (f64, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let l1s = frame.l1 + 2.0 * limits.standoff;
    let l2s = frame.l2 + 2.0 * limits.standoff;
    let r_floor = limits.v_r_max() / limits.omega_max;
    let mut a = (l1s * s).max(r_floor);
    let b = (l2s * s).max((a * r_floor).sqrt());
    // l2 > l1 can occur transiently after tick 0 (no swap rule there);
    // inflating a to b keeps containment and a >= b
    if b > a {
        a = b;
    }
    (a, b)
}

/// Runtime monitor values at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitors {
    /// `(level - 1)^2` against the ellipse frozen at tick 0.
    pub v_lyap: f64,
    /// `(level - 1)^2` against the current (possibly moving) ellipse.
    pub v_tilde: f64,
    /// |inner product of the commanded direction with the outward ellipse
    /// gradient|; vanishes exactly on the desired orbit.
    pub big_gamma: f64,
    /// Level-set value of each target against the current ellipse.
    pub gamma_targets: Vec<f64>,
}

/// Monitor computation for one tick. `agent_local` and `psi_d` are in the
/// current ellipse frame; `targets` are global positions.
pub fn compute_monitors(
    agent_global: Vec2,
    agent_local: Vec2,
    psi_d: f64,
    ellipse: &EllipseSpec,
    frozen: &EllipseSpec,
    targets: &[Vec2],
) -> Monitors {
    let gamma_now = (agent_local.x / ellipse.a).powi(2) + (agent_local.y / ellipse.b).powi(2);
    let gamma_frozen = ellipse_level(agent_global, frozen);
    let grad = Vec2::new(
        2.0 * agent_local.x / (ellipse.a * ellipse.a),
        2.0 * agent_local.y / (ellipse.b * ellipse.b),
    );
    let big_gamma = grad.dot(Vec2::new(psi_d.cos(), psi_d.sin())).abs();
    let gamma_targets = targets.iter().map(|p| ellipse_level(*p, ellipse)).collect();
    Monitors {
        v_lyap: (gamma_frozen - 1.0).powi(2),
        v_tilde: (gamma_now - 1.0).powi(2),
        big_gamma,
        gamma_targets,
    }
}

/// One recorded tick. Field order matches the trace-file column order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x_a: f64,
    pub y_a: f64,
    pub psi_a: f64,
    pub x_o: f64,
    pub y_o: f64,
    pub a: f64,
    pub b: f64,
    pub theta_e: f64,
    pub gamma: f64,
    pub psi_t: f64,
    pub psi_o: f64,
    pub psi_d: f64,
    pub omega_raw: f64,
    pub omega: f64,
    pub v_lyap: f64,
    pub v_tilde: f64,
    pub big_gamma: f64,
    pub gamma_targets: Vec<f64>,
}

/// Time-indexed record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub config: SimConfig,
    pub target_count: usize,
    pub rows: Vec<TraceRow>,
}

fn check_finite(v: f64, field: &'static str, tick: usize, t: f64) -> Result<f64, SimError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SimError::NonFinite { field, tick, t })
    }
}

/// Run a validated scenario to completion.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimTrace, SimError> {
    cfg.validate()?;
    run_validated(cfg)
}

pub(crate) fn run_validated(cfg: &SimConfig) -> Result<SimTrace, SimError> {
    let steps = (cfg.duration / cfg.dt).round() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = AgentState {
        pose: cfg.agent_init,
        speed: cfg.agent_speed,
    };
    let target_count = match &cfg.mission {
        Mission::FixedEllipse(_) => 0,
        Mission::Convoy(model) => model.target_count(),
    };
    let mut prev_theta: f64 = 0.0;
    let mut held: Option<(RegressionFrame, EllipseSpec)> = None;
    let mut frozen: Option<EllipseSpec> = None;

    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        check_finite(state.pose.position.x, "agent x", k, t)?;
        check_finite(state.pose.position.y, "agent y", k, t)?;
        check_finite(state.pose.psi, "agent psi", k, t)?;

        let (ellipse, targets): (EllipseSpec, Vec<Vec2>) = match &cfg.mission {
            Mission::FixedEllipse(e) => (*e, Vec::new()),
            Mission::Convoy(model) => {
                let snap = advance_targets(model, t)?;
                let refit = k == 0 || k % cfg.regression_every as usize == 0;
                if refit {
                    let frame = if k == 0 {
                        init_regression(&snap)
                    } else {
                        update_regression(prev_theta, &snap)
                    };
                    prev_theta = frame.theta_e;
                    let (a, b) = select_axes(&frame, &cfg.limits);
                    let ellipse = EllipseSpec::new(frame.center, a, b, frame.theta_e)?;
                    held = Some((frame, ellipse));
                }
                let (_, ellipse) = held.as_ref().expect("regression ran at tick 0");
                (*ellipse, snap.positions)
            }
        };
        check_finite(ellipse.theta_e, "theta_E", k, t)?;
        let frozen_e = *frozen.get_or_insert(ellipse);

        let local = to_frame(state.pose.position, ellipse.frame());
        let psi_e = wrap_angle(state.pose.psi - ellipse.theta_e);
        let cmd = desired_heading(local, ellipse.a, ellipse.b, cfg.direction, cfg.gains);
        let omega_raw = proportional_rate(cmd.psi_d, psi_e, cfg.gains.k_psi);
        let omega = check_finite(omega_raw, "omega", k, t)?
            .clamp(-cfg.limits.omega_max, cfg.limits.omega_max);
        let mon = compute_monitors(
            state.pose.position,
            local,
            cmd.psi_d,
            &ellipse,
            &frozen_e,
            &targets,
        );

        rows.push(TraceRow {
            t,
            x_a: state.pose.position.x,
            y_a: state.pose.position.y,
            psi_a: state.pose.psi,
            x_o: ellipse.center.x,
            y_o: ellipse.center.y,
            a: ellipse.a,
            b: ellipse.b,
            theta_e: ellipse.theta_e,
            gamma: cmd.gamma,
            psi_t: cmd.psi_t,
            psi_o: cmd.psi_o,
            psi_d: cmd.psi_d,
            omega_raw,
            omega,
            v_lyap: mon.v_lyap,
            v_tilde: mon.v_tilde,
            big_gamma: mon.big_gamma,
            gamma_targets: mon.gamma_targets,
        });

        if k < steps {
            state = step_unicycle(state, omega, cfg.wind, cfg.dt);
        }
    }

    Ok(SimTrace {
        config: cfg.clone(),
        target_count,
        rows,
    })
}
