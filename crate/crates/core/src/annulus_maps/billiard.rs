//! The billiard map in Birkhoff coordinates.
//!
//! A state is a normalised arclength `s` on the boundary together with the
//! angle `theta in (0, pi)` between the outgoing chord and the
//! counter-clockwise tangent. In annulus coordinates `x = s`, `y = theta / pi`.

use super::curve::ConvexCurve;
use super::LiftedPoint;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Angles closer than this to `0` or `pi` are treated as tangential.
pub const TANGENCY_TOL: f64 = 1e-9;
const BRACKET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BilliardError {
    /// The chord is tangential; the state is returned unchanged.
    #[error("degenerate chord at s = {s}, theta = {theta}")]
    DegenerateChord { s: f64, theta: f64 },
}

/// Result of one bounce. `ds` is the counter-clockwise arclength travelled,
/// in `(0, 1)`, so `s + ds` is the lifted next position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounce {
    pub s: f64,
    pub theta: f64,
    pub ds: f64,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Next bounce from boundary point `s` (mod 1) leaving at angle `theta`.
pub fn billiard_step(curve: &ConvexCurve, s: f64, theta: f64) -> Result<Bounce, BilliardError> {
    if theta <= TANGENCY_TOL || theta >= PI - TANGENCY_TOL {
        return Err(BilliardError::DegenerateChord { s, theta });
    }
    let s0 = s.rem_euclid(1.0);
    let phi = curve.phi_at(s0);
    let p = curve.point(phi);
    let t = curve.unit_tangent(phi);
    let (sin_t, cos_t) = theta.sin_cos();
    let d = [cos_t * t[0] - sin_t * t[1], sin_t * t[0] + cos_t * t[1]];

    // Angle from d to the chord p -> P(u) increases from -theta to pi - theta
    // as u runs over (phi, phi + 2 pi); its zero is the exit point.
    let chord_angle = |u: f64| {
        let q = curve.point(u);
        let c = [q[0] - p[0], q[1] - p[1]];
        cross(d, c).atan2(dot(d, c))
    };
    let mut lo = phi;
    let mut hi = phi + TAU;
    while hi - lo > BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        if chord_angle(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..2 {
        let q = curve.point(u);
        let c = [q[0] - p[0], q[1] - p[1]];
        let g = cross(d, c);
        let dg = cross(d, curve.derivative(u));
        if dg.abs() < 1e-300 {
            break;
        }
        let next = u - g / dg;
        if next > phi && next < phi + TAU {
            u = next;
        }
    }
    let t_out = curve.unit_tangent(u);
    let theta_out = cross(d, t_out).atan2(dot(d, t_out));
    let ds = curve.s_at(u) - curve.s_at(phi);
    Ok(Bounce {
        s: (s0 + ds).rem_euclid(1.0),
        theta: theta_out,
        ds,
    })
}

/// Lifted billiard map on the strip. The boundary circles are fixed pointwise
/// with shifts `0` (at `y = 0`) and `1` (at `y = 1`).
pub(crate) fn billiard_lift(curve: &ConvexCurve, z: LiftedPoint) -> LiftedPoint {
    match billiard_step(curve, z.x, PI * z.y) {
        Ok(b) => LiftedPoint::new(z.x + b.ds, b.theta / PI),
        Err(_) if z.y < 0.5 => z,
        Err(_) => LiftedPoint::new(z.x + 1.0, z.y),
    }
}

/// Inverse of [`billiard_lift`], from time reversal `(s, theta) -> (s, pi - theta)`.
pub(crate) fn billiard_lift_inverse(curve: &ConvexCurve, z: LiftedPoint) -> LiftedPoint {
    let w = billiard_lift(curve, LiftedPoint::new(z.x, 1.0 - z.y));
    LiftedPoint::new(w.x - 1.0, 1.0 - w.y)
}
