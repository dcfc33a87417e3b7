//! Convoy-centric regression: per-tick bounding rectangle, tilt angle, and
//! rectangle center from the ordered target positions.
//!
//! The tilt is initialised from a global least-squares fit and thereafter
//! updated incrementally in a frame aligned with the previous tilt, so the
//! per-tick slope stays small and the near-vertical instability of
//! global-frame regression never appears.

use crate::error::RegressionError;
use crate::geom::{from_frame, to_frame, wrap_angle, FrameTilt, Vec2};

/// Ordered target positions at one instant; the last entry is the convoy
/// leader.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvoySnapshot {
    pub positions: Vec<Vec2>,
}

impl ConvoySnapshot {
    pub fn new(positions: Vec<Vec2>) -> Result<Self, RegressionError> {
        if positions.is_empty() {
            return Err(RegressionError::EmptySnapshot);
        }
        for (index, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(RegressionError::NonFinitePosition { index });
            }
        }
        Ok(ConvoySnapshot { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn leader(&self) -> Vec2 {
        *self.positions.last().expect("snapshot is never empty")
    }

    pub fn mean(&self) -> Vec2 {
        let n = self.positions.len() as f64;
        let sum = self
            .positions
            .iter()
            .fold(Vec2::ZERO, |acc, p| acc.add(*p));
        sum.scale(1.0 / n)
    }
}

/// Per-tick rectangle fit: tilt, extents, rectangle center, and target mean.
///
/// `l1` runs along the tilt direction, `l2` is twice the maximum normal
/// projection error. The tilt always points from the mean toward the
/// leader's projection on the fitted line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFrame {
    pub theta_e: f64,
    pub l1: f64,
    pub l2: f64,
    pub center: Vec2,
    pub mean: Vec2,
}

/// Project every target onto the line through `mean` at tilt `theta_e` and
/// measure the extents.
///
/// `l1` is the distance between the extreme projections, `l2 = 2 * d_max`
/// where `d_max` is the largest normal distance, and the center is the
/// midpoint of the extreme projections in the global frame. The returned
/// tilt is re-aimed along the ray from the mean to the leader's projection
/// (so it lands in the full `(-pi, pi]` range); the `arctan2(0, 0)` case is
/// defined as 0.
pub fn project_extent(snapshot: &ConvoySnapshot, mean: Vec2, theta_e: f64) -> RegressionFrame {
    let frame = FrameTilt::new(mean, theta_e);
    let mut iter = snapshot.positions.iter();
    let first = to_frame(*iter.next().expect("snapshot is never empty"), frame);
    let mut x_min = first.x;
    let mut x_max = first.x;
    let mut d_max = first.y.abs();
    let mut x_lead = first.x;
    for p in iter {
        let q = to_frame(*p, frame);
        // ties keep the first occurrence (strict comparisons)
        if q.x < x_min {
            x_min = q.x;
        }
        if q.x > x_max {
            x_max = q.x;
        }
        if q.y.abs() > d_max {
            d_max = q.y.abs();
        }
        x_lead = q.x;
    }
    let p_min = from_frame(Vec2::new(x_min, 0.0), frame);
    let p_max = from_frame(Vec2::new(x_max, 0.0), frame);
    let p_lead = from_frame(Vec2::new(x_lead, 0.0), frame);
    let center = p_min.add(p_max).scale(0.5);
    let l1 = p_min.dist(p_max);
    let l2 = 2.0 * d_max;
    let (dx, dy) = (p_lead.x - mean.x, p_lead.y - mean.y);
    let theta_out = if dx == 0.0 && dy == 0.0 {
        0.0
    } else {
        dy.atan2(dx)
    };
    RegressionFrame {
        theta_e: theta_out,
        l1,
        l2,
        center,
        mean,
    }
}

/// Tilt initialisation (tick 0): global least-squares slope, the vertical
/// convention when both slope numerator and denominator vanish, and a single
/// quarter-turn swap when the normal extent exceeds the along-line extent.
pub fn init_regression(snapshot: &ConvoySnapshot) -> RegressionFrame {
    let mean = snapshot.mean();
    if snapshot.len() == 1 {
        return RegressionFrame {
            theta_e: 0.0,
            l1: 0.0,
            l2: 0.0,
            center: snapshot.positions[0],
            mean,
        };
    }
    let n = snapshot.len() as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in &snapshot.positions {
        sxy += p.x * p.y;
        sxx += p.x * p.x;
    }
    let m_n = sxy - n * mean.x * mean.y;
    let m_d = sxx - n * mean.x * mean.x;
    let theta_e = if m_n == 0.0 && m_d == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (m_n / m_d).atan()
    };
    let frame = project_extent(snapshot, mean, theta_e);
    if frame.l1 < frame.l2 {
        // large projection error: the fit latched onto the minor direction
        let swapped = wrap_angle(std::f64::consts::FRAC_PI_2 - frame.theta_e);
        project_extent(snapshot, mean, swapped)
    } else {
        frame
    }
}

/// Tilt update (tick k > 0): fit a through-origin slope in the frame tilted
/// by the previous tilt, then add the resulting small correction angle.
pub fn update_regression(prev_theta_e: f64, snapshot: &ConvoySnapshot) -> RegressionFrame {
    let mean = snapshot.mean();
    if snapshot.len() == 1 {
        return RegressionFrame {
            theta_e: wrap_angle(prev_theta_e),
            l1: 0.0,
            l2: 0.0,
            center: snapshot.positions[0],
            mean,
        };
    }
    let frame = FrameTilt::new(mean, prev_theta_e);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in &snapshot.positions {
        let q = to_frame(*p, frame);
        sxy += q.x * q.y;
        sxx += q.x * q.x;
    }
    // all targets stacked on the local y-axis: same convention as tick 0
    let delta = if sxx == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (sxy / sxx).atan()
    };
    let theta_e = wrap_angle(prev_theta_e + delta);
    project_extent(snapshot, mean, theta_e)
}
