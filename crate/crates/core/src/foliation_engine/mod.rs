//! Radial foliations `m(V)`, the angle class of a pair of lifted points, its
//! integer lifts on canonical pair domains, and the abstract angle `tau`.

pub(crate) mod continuation;
mod domain;
mod monotone;
mod region;
mod winding;

pub use domain::{natural_lift, PairDomain};
pub use monotone::{
    is_monotone, Direction, MonotonicityReport, PairEvaluation, PairKind, PairSampler, SampledPair,
};
pub use region::{
    membership_class, Membership, MembershipGrid, RegionKind, RegionSpec, Side,
    DEFAULT_EXHAUSTION_LEVELS,
};
pub use winding::tau_winding;

use crate::annulus_maps::{IsotopyHandle, LiftedPoint, MapError, MapSpec};
use crate::digital_line::{AngleClass, LiftedAngle, DEFAULT_RAY_TOL};
use thiserror::Error;

/// Default same-leaf tolerance on the transverse leaf coordinate.
pub const SAME_LEAF_TOL: f64 = DEFAULT_RAY_TOL;

/// Smallest parameter step used by path refinement before giving up.
pub const REFINEMENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("points coincide")]
    CoincidentPoints,
    #[error("difference vector vanishes along the foliation path at s = {s}")]
    VanishingDifference { s: f64 },
    #[error("path refinement reached the floor near s = {s}")]
    PathRefinementExhausted { s: f64 },
    #[error("pair is outside the domain: {0}")]
    PairOutsideDomain(String),
    #[error("no witness found at the given grid resolution")]
    GridExhausted,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// The radial foliation `m(V)`: the image of the vertical foliation under a
/// map, with leaves `eta -> m~(xi, eta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoliationRef {
    pushforward: MapSpec,
    isotopy: IsotopyHandle,
}

impl FoliationRef {
    pub fn new(pushforward: MapSpec) -> Self {
        FoliationRef {
            isotopy: IsotopyHandle::new(pushforward.clone()),
            pushforward,
        }
    }

    pub fn vertical() -> Self {
        Self::new(MapSpec::identity())
    }

    pub fn pushforward(&self) -> &MapSpec {
        &self.pushforward
    }

    pub fn isotopy(&self) -> &IsotopyHandle {
        &self.isotopy
    }

    /// `f(F)`.
    pub fn image(&self, f: &MapSpec) -> Self {
        Self::new(self.pushforward.then(f.clone()))
    }

    /// `f^{-1}(F)`.
    pub fn preimage(&self, f: &MapSpec) -> Self {
        Self::new(self.pushforward.then(MapSpec::inverse(f.clone())))
    }

    /// `(xi, eta) = m~^{-1}(z)`.
    pub fn leaf_coordinates(&self, z: LiftedPoint) -> Result<(f64, f64), MapError> {
        let w = self.pushforward.apply_inverse(z)?;
        Ok((w.x, w.y))
    }

    /// The point `m~(xi, eta)` on leaf `xi`.
    pub fn point_on_leaf(&self, xi: f64, eta: f64) -> Result<LiftedPoint, MapError> {
        self.pushforward.apply_lift(LiftedPoint::new(xi, eta))
    }
}

pub fn leaf_coordinates(f: &FoliationRef, z: LiftedPoint) -> Result<(f64, f64), FoliationError> {
    Ok(f.leaf_coordinates(z)?)
}

/// Class of a coordinate difference `(d_xi, d_eta)`.
pub(crate) fn class_of_difference(
    d_xi: f64,
    d_eta: f64,
    tol: f64,
) -> Result<AngleClass, FoliationError> {
    if d_xi > tol {
        Ok(AngleClass::MinusOne)
    } else if d_xi < -tol {
        Ok(AngleClass::One)
    } else if d_eta > 0.0 {
        Ok(AngleClass::Zero)
    } else if d_eta < 0.0 {
        Ok(AngleClass::Two)
    } else {
        Err(FoliationError::CoincidentPoints)
    }
}

/// The angle class of `(z, z')` relative to `F`: `-1` when the leaf of `z'`
/// is to the right, `1` to the left, `0` / `2` when on the same leaf above /
/// below `z`.
pub fn angle_class(
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    tol: f64,
) -> Result<AngleClass, FoliationError> {
    if z.dist(z_prime) <= tol {
        return Err(FoliationError::CoincidentPoints);
    }
    let (a, b) = (f.leaf_coordinates(z)?, f.leaf_coordinates(z_prime)?);
    class_of_difference(b.0 - a.0, b.1 - a.1, tol)
}

/// `tau(z, z', F, F')`, the change of any continuous lift of the angle class
/// between `F` and `F'`.
///
/// Computed as a difference of natural lifts on the leaf-complement domain of
/// `F` (or its lower half-order domain when `z'` is above `z` on a leaf of
/// `F`); if that continuation cannot be resolved, falls back to the winding
/// computation.
pub fn tau(
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    f_prime: &FoliationRef,
) -> Result<i64, FoliationError> {
    if f.pushforward == f_prime.pushforward {
        if z.dist(z_prime) <= SAME_LEAF_TOL {
            return Err(FoliationError::CoincidentPoints);
        }
        return Ok(0);
    }
    match tau_natural(z, z_prime, f, f_prime) {
        Err(FoliationError::PathRefinementExhausted { .. }) => tau_winding(z, z_prime, f, f_prime),
        other => other,
    }
}

/// `tau` as a difference of natural lifts, without the winding fallback.
pub fn tau_natural(
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    f_prime: &FoliationRef,
) -> Result<i64, FoliationError> {
    let domain = PairDomain::canonical_for(z, z_prime, f)?;
    let at_f: LiftedAngle = natural_lift(&domain, z, z_prime, f)?;
    let at_f_prime = natural_lift(&domain, z, z_prime, f_prime)?;
    Ok(at_f_prime.0 - at_f.0)
}
