//! Planar frame transforms, ellipse level sets, and the two closed-form
//! ellipse lemmas (minimum-area circumscription and minimum radius of
//! curvature).

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Wrap an angle into `(-pi, pi]`.
///
/// Every angle in this crate is normalized through this single helper
/// immediately after any arithmetic, so heading errors are always
/// shortest-arc.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    } else if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// 2-D position or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        self.sub(o).norm()
    }
}

/// A tilted local frame: origin plus tilt angle of its x-axis, in `(-pi, pi]`.
///
/// The rotation convention maps global coordinates into the tilted frame as
/// `R_theta * (p - origin)` with
/// `R_theta = [[cos t, sin t], [-sin t, cos t]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTilt {
    pub origin: Vec2,
    pub theta: f64,
}

impl FrameTilt {
    pub fn new(origin: Vec2, theta: f64) -> Self {
        FrameTilt {
            origin,
            theta: wrap_angle(theta),
        }
    }
}

/// Global -> local: `R_theta * (p - origin)`.
pub fn to_frame(p: Vec2, f: FrameTilt) -> Vec2 {
    let (s, c) = f.theta.sin_cos();
    let d = p.sub(f.origin);
    Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
}

/// Local -> global: `R_theta^-1 * p_local + origin`.
pub fn from_frame(p_local: Vec2, f: FrameTilt) -> Vec2 {
    let (s, c) = f.theta.sin_cos();
    Vec2::new(
        c * p_local.x - s * p_local.y + f.origin.x,
        s * p_local.x + c * p_local.y + f.origin.y,
    )
}

/// An ellipse with semi-major axis `a` along the tilt direction `theta_e`.
///
/// `a >= b > 0` is enforced at construction; orientation responsibility
/// (which extent is the major one) lives with the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseSpec {
    pub center: Vec2,
    pub a: f64,
    pub b: f64,
    pub theta_e: f64,
}

impl EllipseSpec {
    pub fn new(center: Vec2, a: f64, b: f64, theta_e: f64) -> Result<Self, GeomError> {
        if !center.is_finite() || !a.is_finite() || !b.is_finite() || !theta_e.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if !(b > 0.0) || a < b {
            return Err(GeomError::DegenerateAxes { a, b });
        }
        Ok(EllipseSpec {
            center,
            a,
            b,
            theta_e: wrap_angle(theta_e),
        })
    }

    pub fn frame(&self) -> FrameTilt {
        FrameTilt {
            origin: self.center,
            theta: self.theta_e,
        }
    }
}

/// Level-set value `x_e^2/a^2 + y_e^2/b^2` of `p` in the ellipse-centric
/// frame. 0 at the center, 1 on the ellipse, >1 outside.
pub fn ellipse_level(p: Vec2, e: &EllipseSpec) -> f64 {
    let q = to_frame(p, e.frame());
    (q.x / e.a).powi(2) + (q.y / e.b).powi(2)
}

/// Semi-axes of the minimum-area ellipse circumscribing an `l1 x l2`
/// rectangle: `a = l1/sqrt(2)`, `b = l2/sqrt(2)`. The result passes
/// exactly through all four rectangle corners.
pub fn min_area_circumscribing_axes(l1: f64, l2: f64) -> Result<(f64, f64), GeomError> {
    if !(l1.is_finite() && l2.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if l1 < l2 || l2 < 0.0 || l1 <= 0.0 {
        return Err(GeomError::BadRectangle { l1, l2 });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok((l1 * s, l2 * s))
}

/// Minimum radius of curvature of an ellipse with semi-axes `a >= b > 0`,
/// attained at the ends of the major axis: `b^2 / a`.
pub fn min_radius_of_curvature(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b && b > 0.0);
    b * b / a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn wrap_covers_branch_points() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-6.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn to_frame_identity_tilt() {
        let p = to_frame(Vec2::new(3.0, 4.0), FrameTilt::new(Vec2::ZERO, 0.0));
        assert_eq!(p, Vec2::new(3.0, 4.0));
    }

    #[test]
    fn to_frame_quarter_turn() {
        let p = to_frame(Vec2::new(1.0, 0.0), FrameTilt::new(Vec2::ZERO, FRAC_PI_2));
        assert!(p.x.abs() < 1e-15);
        assert!((p.y + 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_frame_quarter_turn() {
        let f = FrameTilt::new(Vec2::ZERO, FRAC_PI_2);
        let p = from_frame(Vec2::new(1.0, 0.0), f);
        assert!(p.x.abs() < 1e-15);
        assert!((p.y - 1.0).abs() < 1e-15);
        let o = from_frame(Vec2::ZERO, FrameTilt::new(Vec2::new(2.0, -7.0), 1.3));
        assert_eq!(o, Vec2::new(2.0, -7.0));
    }

    #[test]
    fn ellipse_level_values() {
        let e = EllipseSpec::new(Vec2::new(5.0, -2.0), 4.0, 2.0, 0.7).unwrap();
        assert!(ellipse_level(e.center, &e) < 1e-30);
        let on = from_frame(Vec2::new(4.0, 0.0), e.frame());
        assert!((ellipse_level(on, &e) - 1.0).abs() < 1e-12);
        let out = from_frame(Vec2::new(8.0, 0.0), e.frame());
        assert!((ellipse_level(out, &e) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_rejects_degenerate() {
        assert!(EllipseSpec::new(Vec2::ZERO, 1.0, 2.0, 0.0).is_err());
        assert!(EllipseSpec::new(Vec2::ZERO, 1.0, 0.0, 0.0).is_err());
        assert!(EllipseSpec::new(Vec2::ZERO, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn lemma_axes_examples() {
        let (a, b) = min_area_circumscribing_axes(2.0, 1.0).unwrap();
        assert!((a - SQRT_2).abs() < 1e-15);
        assert!((b - FRAC_1_SQRT_2).abs() < 1e-15);
        let (a, b) = min_area_circumscribing_axes(2.0, 2.0).unwrap();
        assert_eq!(a, b);
        assert!(min_area_circumscribing_axes(1.0, 2.0).is_err());
    }

    // Brute-force sweep from the proof of the minimum-area lemma:
    // A(e) = pi/4 * (l1^2 sqrt(1-e^2) + l2^2 / sqrt(1-e^2)).
    fn area_sweep_min(l1: f64, l2: f64, n: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            let e = 0.999 * i as f64 / (n - 1) as f64;
            let r = (1.0 - e * e).sqrt();
            let area = std::f64::consts::PI / 4.0 * (l1 * l1 * r + l2 * l2 / r);
            if area < best {
                best = area;
            }
        }
        best
    }

    #[test]
    fn lemma_axes_beat_eccentricity_sweep() {
        let (l1, l2) = (3.0, 1.0);
        let (a, b) = min_area_circumscribing_axes(l1, l2).unwrap();
        let closed = PI * a * b;
        assert!(area_sweep_min(l1, l2, 2000) >= closed - 1e-9);
    }

    #[test]
    fn lemma_axes_hit_corners_exactly() {
        let (l1, l2) = (3.0, 1.0);
        let (a, b) = min_area_circumscribing_axes(l1, l2).unwrap();
        let e = EllipseSpec::new(Vec2::ZERO, a, b, 0.0).unwrap();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                let corner = Vec2::new(sx * l1 / 2.0, sy * l2 / 2.0);
                assert!((ellipse_level(corner, &e) - 1.0).abs() < 1e-12);
            }
        }
    }

    // Curvature-sampling oracle: R(s) = (a^2 sin^2 s + b^2 cos^2 s)^(3/2) / (ab).
    fn curvature_radius_min(a: f64, b: f64, n: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            let s = 2.0 * PI * i as f64 / n as f64;
            let v = a * a * s.sin().powi(2) + b * b * s.cos().powi(2);
            let r = v.powf(1.5) / (a * b);
            if r < best {
                best = r;
            }
        }
        best
    }

    #[test]
    fn min_curvature_radius_examples() {
        assert!((min_radius_of_curvature(250.0, 150.0) - 90.0).abs() < 1e-12);
        assert_eq!(min_radius_of_curvature(5.0, 5.0), 5.0);
        let closed = min_radius_of_curvature(350.0, 170.0);
        assert!((closed - 170.0 * 170.0 / 350.0).abs() < 1e-12);
        let sampled = curvature_radius_min(350.0, 170.0, 100_000);
        assert!((sampled - closed).abs() / closed < 1e-6);
        assert!(sampled >= closed - 1e-9);
    }

    proptest! {
        #[test]
        fn frame_round_trip(px in -1e4..1e4f64, py in -1e4..1e4f64,
                            ox in -1e4..1e4f64, oy in -1e4..1e4f64,
                            th in -10.0..10.0f64) {
            let f = FrameTilt::new(Vec2::new(ox, oy), th);
            let p = Vec2::new(px, py);
            let back = from_frame(to_frame(p, f), f);
            prop_assert!(back.dist(p) < 1e-12 * (1.0 + p.norm()));
        }

        #[test]
        fn level_is_rigid_motion_invariant(px in -50.0..50.0f64, py in -50.0..50.0f64,
                                           a in 1.0..30.0f64, db in 0.1..1.0f64,
                                           th in -3.0..3.0f64,
                                           mth in -3.0..3.0f64,
                                           mx in -100.0..100.0f64, my in -100.0..100.0f64) {
            let b = a * db;
            let e = EllipseSpec::new(Vec2::new(1.0, -2.0), a, b, th).unwrap();
            let p = Vec2::new(px, py);
            let g0 = ellipse_level(p, &e);
            // apply rigid motion (rotate by mth about origin, then translate)
            let rot = |v: Vec2| Vec2::new(
                mth.cos() * v.x - mth.sin() * v.y + mx,
                mth.sin() * v.x + mth.cos() * v.y + my,
            );
            let e2 = EllipseSpec::new(rot(e.center), a, b, e.theta_e + mth).unwrap();
            let g1 = ellipse_level(rot(p), &e2);
            prop_assert!((g0 - g1).abs() <= 1e-9 * (1.0 + g0.abs()));
        }

        #[test]
        fn lemma_corners_on_ellipse(l1 in 0.2..500.0f64, frac in 0.01..1.0f64) {
            let l2 = l1 * frac;
            let (a, b) = min_area_circumscribing_axes(l1, l2).unwrap();
            let e = EllipseSpec::new(Vec2::ZERO, a, b, 0.0).unwrap();
            let g = ellipse_level(Vec2::new(l1 / 2.0, l2 / 2.0), &e);
            prop_assert!((g - 1.0).abs() < 1e-12);
        }
    }
}
