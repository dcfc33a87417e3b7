//! Scenario files: a human-editable TOML document mapping one-to-one onto
//! `SimConfig`. Unknown keys are rejected with the offending location; all
//! physical parameters must be explicit (only `dt`, `duration`,
//! `description`, `wind`, and `regression_every` have defaults).
//!
//! Units are fixed: meters, radians, seconds. No conversion anywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Pose2D, TargetModel, Wind};
use crate::error::SimError;
use crate::geom::{EllipseSpec, Vec2};
use crate::guidance::{GuidanceGains, OrbitDirection};
use crate::sim::{AgentLimits, Mission, SimConfig};

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_DURATION: f64 = 600.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation in {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid scenario {path}: violates invariant {message}")]
    Invariant { path: String, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    x: f64,
    y: f64,
    psi: f64,
    speed: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseDoc {
    x: f64,
    y: f64,
    a: f64,
    b: f64,
    theta: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_duration")]
    duration: f64,
    direction: OrbitDirection,
    #[serde(default = "default_regression_every")]
    regression_every: u32,
    limits: AgentLimits,
    gains: GuidanceGains,
    agent: AgentDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wind: Option<Wind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ellipse: Option<EllipseDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    convoy: Option<TargetModel>,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_duration() -> f64 {
    DEFAULT_DURATION
}
fn default_regression_every() -> u32 {
    1
}

fn doc_to_config(doc: ScenarioDoc, path: &str) -> Result<SimConfig, ScenarioError> {
    let mission = match (doc.ellipse, doc.convoy) {
        (Some(e), None) => Mission::FixedEllipse(
            EllipseSpec::new(Vec2::new(e.x, e.y), e.a, e.b, e.theta).map_err(|err| {
                ScenarioError::Invariant {
                    path: path.to_string(),
                    message: format!("ellipse axes: {err}"),
                }
            })?,
        ),
        (None, Some(model)) => Mission::Convoy(model),
        _ => {
            return Err(ScenarioError::Schema {
                path: path.to_string(),
                message: "exactly one of [ellipse] or [convoy] must be present".into(),
            })
        }
    };
    let cfg = SimConfig {
        name: doc.name,
        description: doc.description,
        limits: doc.limits,
        gains: doc.gains,
        direction: doc.direction,
        agent_init: Pose2D {
            position: Vec2::new(doc.agent.x, doc.agent.y),
            psi: doc.agent.psi,
        },
        agent_speed: doc.agent.speed,
        wind: doc.wind.unwrap_or(Wind::NONE),
        mission,
        dt: doc.dt,
        duration: doc.duration,
        regression_every: doc.regression_every,
    };
    cfg.validate().map_err(|err| {
        let message = match err {
            SimError::InvalidConfig(m) => m,
            other => other.to_string(),
        };
        ScenarioError::Invariant {
            path: path.to_string(),
            message,
        }
    })?;
    Ok(cfg)
}

fn config_to_doc(cfg: &SimConfig) -> ScenarioDoc {
    let (ellipse, convoy) = match &cfg.mission {
        Mission::FixedEllipse(e) => (
            Some(EllipseDoc {
                x: e.center.x,
                y: e.center.y,
                a: e.a,
                b: e.b,
                theta: e.theta_e,
            }),
            None,
        ),
        Mission::Convoy(model) => (None, Some(model.clone())),
    };
    ScenarioDoc {
        name: cfg.name.clone(),
        description: cfg.description.clone(),
        dt: cfg.dt,
        duration: cfg.duration,
        direction: cfg.direction,
        regression_every: cfg.regression_every,
        limits: cfg.limits,
        gains: cfg.gains,
        agent: AgentDoc {
            x: cfg.agent_init.position.x,
            y: cfg.agent_init.position.y,
            psi: cfg.agent_init.psi,
            speed: cfg.agent_speed,
        },
        wind: if cfg.wind == Wind::NONE {
            None
        } else {
            Some(cfg.wind)
        },
        ellipse,
        convoy,
    }
}

/// Parse and validate a scenario document from a string. `path` is used
/// only for error context.
pub fn parse_scenario_str(text: &str, path: &str) -> Result<SimConfig, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|err| ScenarioError::Schema {
        path: path.to_string(),
        message: err.to_string(),
    })?;
    doc_to_config(doc, path)
}

/// Parse and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<SimConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text, &path.display().to_string())
}

/// Serialize a config back to the scenario document format.
/// `parse_scenario_str(scenario_to_toml(cfg)) == cfg` for every valid config.
pub fn scenario_to_toml(cfg: &SimConfig) -> String {
    toml::to_string(&config_to_doc(cfg)).expect("scenario serialization cannot fail")
}
