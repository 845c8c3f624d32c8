//! Annulus homeomorphisms isotopic to the identity, with explicit lifts to
//! the strip `R x [0, 1]`.

mod billiard;
mod cone;
mod curve;
mod isotopy;
mod spec;

pub use billiard::{billiard_step, BilliardError, Bounce, TANGENCY_TOL};
pub use cone::{twist_cone_angle, TwistCone};
pub use curve::{ConvexCurve, CurveKind};
pub use isotopy::IsotopyHandle;
pub use spec::MapSpec;

#[allow(unused_imports)]
pub(crate) use spec::newton_invert;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed outside `[0, 1]` before a y value is considered invalid.
pub const Y_CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("numeric inversion did not converge at ({x}, {y})")]
    InversionFailure { x: f64, y: f64 },
    #[error("isotopy probe collision at t = {t}")]
    NonInjectiveSample { t: f64 },
    #[error("invalid map: {0}")]
    InvalidSpec(String),
    #[error("curve is not strictly convex near phi = {phi}")]
    NotConvex { phi: f64 },
}

/// A point of the universal cover `R x [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftedPoint {
    pub x: f64,
    pub y: f64,
}

impl LiftedPoint {
    /// Clamps `y` into `[0, 1]`.
    pub fn new(x: f64, y: f64) -> Self {
        LiftedPoint {
            x,
            y: y.clamp(0.0, 1.0),
        }
    }

    /// Deck transformation `T^n`.
    pub fn translate(self, n: i64) -> Self {
        LiftedPoint {
            x: self.x + n as f64,
            y: self.y,
        }
    }

    pub fn dist(self, other: LiftedPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Projection of the first coordinate to the circle `[0, 1)`.
    pub fn x_mod1(self) -> f64 {
        self.x.rem_euclid(1.0)
    }
}
