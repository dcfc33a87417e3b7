//! Deterministic 2-D simulator and library for aerial convoy surveillance.
//!
//! A ground convoy is wrapped each tick in a moving bounding ellipse fit by
//! convoy-centric regression; a unicycle agent is driven onto that ellipse
//! by a vector-field guidance law and orbits it in either direction while
//! the convoy moves. The crate also ships the scenario/trace file formats,
//! summary statistics, and static SVG plot emission behind the
//! `convoy-sim` CLI.

pub mod dynamics;
pub mod error;
pub mod geom;
pub mod guidance;
pub mod plot;
pub mod regression;
pub mod scenario;
pub mod sim;
pub mod summary;
pub mod trace;

pub use dynamics::{
    advance_targets, lissajous_position, step_unicycle, AgentState, Pose2D, TargetModel, Wind,
};
pub use error::{GeomError, RegressionError, SimError};
pub use geom::{
    ellipse_level, from_frame, min_area_circumscribing_axes, min_radius_of_curvature, to_frame,
    wrap_angle, EllipseSpec, FrameTilt, Vec2,
};
pub use guidance::{
    angular_velocity_command, desired_heading, offset_heading, proportional_rate, tangent_heading,
    GuidanceGains, HeadingCommand, OrbitDirection,
};
pub use regression::{
    init_regression, project_extent, update_regression, ConvoySnapshot, RegressionFrame,
};
pub use scenario::{parse_scenario, parse_scenario_str, scenario_to_toml, ScenarioError};
pub use sim::{
    compute_monitors, run_simulation, select_axes, AgentLimits, Mission, Monitors, SimConfig,
    SimTrace, TraceRow,
};
pub use summary::{summarize, Summary};
pub use trace::{read_trace, trace_to_string, write_trace, TraceError, TraceFormat};
