use super::orbits::leaf_zeros;
use super::TheoremError;
use crate::annulus_maps::{LiftedPoint, MapSpec};
use crate::foliation_engine::{tau, FoliationRef};
use serde::{Deserialize, Serialize};

const LEAF_SAMPLES: usize = 512;

/// Extreme points of `phi ∩ f~^{-1}(phi)` for the vertical `phi` at `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafExtremes {
    pub x: f64,
    /// Lowest intersection point on the vertical.
    pub z0: LiftedPoint,
    /// Intersection point whose image is highest.
    pub z1: LiftedPoint,
    pub intersections: usize,
    /// `tau(z0, z1, V, f^{-1}(V))` when the two points differ.
    pub tau_check: Option<i64>,
}

pub fn leaf_intersection_extremes(
    m: &MapSpec,
    x: f64,
    tol: f64,
) -> Result<LeafExtremes, TheoremError> {
    m.validate()?;
    let zeros = leaf_zeros(m, x, LEAF_SAMPLES)?;
    if zeros.is_empty() {
        return Err(TheoremError::NoIntersectionFound { x });
    }
    let points: Vec<LiftedPoint> = zeros.iter().map(|&(y, _)| LiftedPoint::new(x, y)).collect();
    let z0 = points[0];
    let mut z1 = z0;
    let mut top = f64::NEG_INFINITY;
    for &z in &points {
        let h = m.apply_lift(z)?.y;
        if h > top {
            top = h;
            z1 = z;
        }
    }
    let tau_check = if z0.dist(z1) <= tol {
        z1 = z0;
        None
    } else {
        let v = FoliationRef::vertical();
        Some(tau(z0, z1, &v, &v.preimage(m))?)
    };
    Ok(LeafExtremes {
        x,
        z0,
        z1,
        intersections: points.len(),
        tau_check,
    })
}
