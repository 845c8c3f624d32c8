use crate::annulus_maps::{LiftedPoint, MapError, MapSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Circle {
    C0,
    C1,
}

impl Circle {
    pub fn y(self) -> f64 {
        match self {
            Circle::C0 => 0.0,
            Circle::C1 => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: f64,
    /// `|value - rho| < half_width` whenever the point lies on an invariant
    /// circle with rotation number `rho`.
    pub half_width: f64,
}

/// Rotation number of the orbit of `z`: `(p1(f~^n z) - p1(z)) / n`.
pub fn rotation_number_at(
    m: &MapSpec,
    z: LiftedPoint,
    iterations: usize,
) -> Result<RotationEstimate, MapError> {
    let n = iterations.max(1);
    let mut w = z;
    for _ in 0..n {
        w = m.apply_lift(w)?;
    }
    Ok(RotationEstimate {
        value: (w.x - z.x) / n as f64,
        half_width: 1.0 / n as f64,
    })
}

pub fn rotation_number(
    m: &MapSpec,
    circle: Circle,
    iterations: usize,
) -> Result<RotationEstimate, MapError> {
    rotation_number_at(m, LiftedPoint::new(0.0, circle.y()), iterations)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistInterval {
    pub rho0: f64,
    pub rho1: f64,
    pub half_width: f64,
    /// Set when the boundary rotation numbers are in decreasing order.
    pub reversed: bool,
}

pub fn twist_interval(m: &MapSpec, iterations: usize) -> Result<TwistInterval, MapError> {
    let r0 = rotation_number(m, Circle::C0, iterations)?;
    let r1 = rotation_number(m, Circle::C1, iterations)?;
    Ok(TwistInterval {
        rho0: r0.value,
        rho1: r1.value,
        half_width: r0.half_width,
        reversed: r0.value > r1.value,
    })
}
