//! Deterministic scalar summary of a trace, printed as a single JSON
//! object. Backs the acceptance checks and the `summarize` CLI verb.

use serde::{Deserialize, Serialize};

use crate::dynamics::advance_targets;
use crate::geom::Vec2;
use crate::sim::{Mission, SimTrace};

/// Settling band on the ellipse level-set value.
pub const SETTLE_BAND: f64 = 0.05;
/// Upper bound on the alignment transient, seconds.
pub const TRANSIENT_MAX: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub duration: f64,
    pub ticks: usize,
    pub settled: bool,
    /// First time with |gamma - 1| < 0.05; absent if the run never settled.
    pub settle_time: Option<f64>,
    /// End of the alignment transient: the earlier of 30 s and settle time.
    pub transient_end: f64,
    pub max_abs_omega_post: Option<f64>,
    pub max_abs_omega_raw_post: Option<f64>,
    pub mean_abs_gamma_err_post: Option<f64>,
    pub max_abs_gamma_err_post: Option<f64>,
    /// Max over targets and ticks of the target level-set value.
    pub max_gamma_target: Option<f64>,
    /// Min agent-target distance over settled ticks (|gamma - 1| < 0.05).
    pub min_target_distance: Option<f64>,
}

/// Pure function of the trace (target positions are re-derived from the
/// embedded scenario, which is part of the trace).
pub fn summarize(trace: &SimTrace) -> Summary {
    let rows = &trace.rows;
    let settle_time = rows
        .iter()
        .find(|r| (r.gamma - 1.0).abs() < SETTLE_BAND)
        .map(|r| r.t);
    let transient_end = settle_time.map_or(TRANSIENT_MAX, |s| s.min(TRANSIENT_MAX));
    let post: Vec<_> = rows.iter().filter(|r| r.t > transient_end).collect();

    let (mut max_w, mut max_w_raw, mut sum_g, mut max_g) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for r in &post {
        max_w = max_w.max(r.omega.abs());
        max_w_raw = max_w_raw.max(r.omega_raw.abs());
        let e = (r.gamma - 1.0).abs();
        sum_g += e;
        max_g = max_g.max(e);
    }

    let max_gamma_target = rows
        .iter()
        .flat_map(|r| r.gamma_targets.iter().copied())
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.max(g))));

    let min_target_distance = match (&trace.config.mission, settle_time) {
        (Mission::Convoy(model), Some(s)) => {
            let mut best: Option<f64> = None;
            for r in rows.iter().filter(|r| r.t >= s && (r.gamma - 1.0).abs() < SETTLE_BAND) {
                if let Ok(snap) = advance_targets(model, r.t) {
                    let agent = Vec2::new(r.x_a, r.y_a);
                    for p in &snap.positions {
                        let d = agent.dist(*p);
                        best = Some(best.map_or(d, |b: f64| b.min(d)));
                    }
                }
            }
            best
        }
        _ => None,
    };

    let has_post = !post.is_empty() && settle_time.is_some();
    Summary {
        scenario: trace.config.name.clone(),
        duration: trace.config.duration,
        ticks: rows.len(),
        settled: settle_time.is_some(),
        settle_time,
        transient_end,
        max_abs_omega_post: has_post.then_some(max_w),
        max_abs_omega_raw_post: has_post.then_some(max_w_raw),
        mean_abs_gamma_err_post: has_post.then(|| sum_g / post.len() as f64),
        max_abs_gamma_err_post: has_post.then_some(max_g),
        max_gamma_target,
        min_target_distance,
    }
}
