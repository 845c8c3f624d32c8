use super::continuation::{continue_lift, polyline, Pair};
use super::region::{RegionSpec, Side};
use super::{angle_class, FoliationError, FoliationRef, SAME_LEAF_TOL};
use crate::annulus_maps::LiftedPoint;
use crate::digital_line::{AngleClass, LiftedAngle};

/// A simply connected set of pairs on which the angle class has a
/// distinguished integer lift.
#[derive(Clone, Debug, PartialEq)]
pub enum PairDomain {
    /// Pairs not of class `0` for `F`; lift `{1, 2, 3}`-valued at `F`.
    LeafComplement(FoliationRef),
    /// Pairs of class `-1` or `0` for `F`; lift `{-1, 0}`-valued at `F`.
    LowerHalfOrder(FoliationRef),
    /// `C0 x C1`; lift `{-1, 0, 1}`-valued for every foliation.
    BoundaryProduct,
    LowerAnnulus(RegionSpec),
    UpperAnnulus(RegionSpec),
    LowerDisk(RegionSpec),
    UpperDisk(RegionSpec),
}

impl PairDomain {
    /// The leaf-complement or lower half-order domain of `F` containing the
    /// pair.
    pub fn canonical_for(
        z: LiftedPoint,
        z_prime: LiftedPoint,
        f: &FoliationRef,
    ) -> Result<Self, FoliationError> {
        Ok(match angle_class(z, z_prime, f, SAME_LEAF_TOL)? {
            AngleClass::Zero => PairDomain::LowerHalfOrder(f.clone()),
            _ => PairDomain::LeafComplement(f.clone()),
        })
    }

    /// The region domain matching the shape of `region`.
    pub fn for_region(region: RegionSpec) -> Result<Self, FoliationError> {
        let disk = region.is_disk()?;
        Ok(match (region.side()?, disk) {
            (Side::Lower, false) => PairDomain::LowerAnnulus(region),
            (Side::Lower, true) => PairDomain::LowerDisk(region),
            (Side::Upper, false) => PairDomain::UpperAnnulus(region),
            (Side::Upper, true) => PairDomain::UpperDisk(region),
        })
    }
}

/// The natural lift of the angle class of `(z, z')` relative to `F`, found
/// by continuation at `F` along a path inside the domain from an anchor pair
/// whose lift is fixed by the domain's normalization.
pub fn natural_lift(
    domain: &PairDomain,
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
) -> Result<LiftedAngle, FoliationError> {
    match domain {
        PairDomain::LeafComplement(f0) => {
            let class = angle_class(z, z_prime, f0, SAME_LEAF_TOL)?;
            let (shift, anchor) = match class {
                AngleClass::Zero => {
                    return Err(FoliationError::PairOutsideDomain(
                        "class 0 pair in leaf complement domain".into(),
                    ))
                }
                AngleClass::One => (-1, 1),
                _ => (1, 3),
            };
            leaf_path_lift(f0, z, z_prime, shift, LiftedAngle(anchor), f)
        }
        PairDomain::LowerHalfOrder(f0) => {
            let class = angle_class(z, z_prime, f0, SAME_LEAF_TOL)?;
            if !matches!(class, AngleClass::MinusOne | AngleClass::Zero) {
                return Err(FoliationError::PairOutsideDomain(format!(
                    "class {class} pair in lower half-order domain"
                )));
            }
            leaf_path_lift(f0, z, z_prime, 1, LiftedAngle(-1), f)
        }
        PairDomain::BoundaryProduct => {
            if z.y != 0.0 || z_prime.y != 1.0 {
                return Err(FoliationError::PairOutsideDomain(
                    "boundary product needs z on C0 and z' on C1".into(),
                ));
            }
            boundary_lift(z, z_prime, f, Side::Lower)
        }
        PairDomain::LowerAnnulus(u)
        | PairDomain::UpperAnnulus(u)
        | PairDomain::LowerDisk(u)
        | PairDomain::UpperDisk(u) => {
            if PairDomain::for_region(u.clone())? != *domain {
                return Err(FoliationError::PairOutsideDomain(
                    "region shape does not match the domain kind".into(),
                ));
            }
            region_lift(u, z, z_prime, f, |_, _, _| {})
        }
    }
}

/// Continuation from `(z, T^shift z)` moving `z'` vertically then across
/// leaves of `f0`, in `f0` leaf coordinates.
fn leaf_path_lift(
    f0: &FoliationRef,
    z: LiftedPoint,
    z_prime: LiftedPoint,
    shift: i64,
    anchor: LiftedAngle,
    f: &FoliationRef,
) -> Result<LiftedAngle, FoliationError> {
    let (xi, eta) = f0.leaf_coordinates(z)?;
    let (xi1, eta1) = f0.leaf_coordinates(z_prime)?;
    let start = xi + shift as f64;
    let route = polyline(vec![(start, eta), (start, eta1), (xi1, eta1)]);
    let path = |s: f64| -> Result<Pair, FoliationError> {
        let w = if s <= 0.0 {
            z.translate(shift)
        } else if s >= 1.0 {
            z_prime
        } else {
            let (a, b) = route(s);
            f0.point_on_leaf(a, b)?
        };
        Ok((z, w))
    };
    continue_lift(path, f, anchor, SAME_LEAF_TOL, |_, _, _| {})
}

/// Lift on a pair of boundary points: `(C0, C1)` pairs take values in
/// `{-1, 0, 1}`, `(C1, C0)` pairs in `{1, 2, 3}`.
fn boundary_lift(
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    side: Side,
) -> Result<LiftedAngle, FoliationError> {
    let class = angle_class(z, z_prime, f, SAME_LEAF_TOL)?;
    let value = match (side, class) {
        (Side::Lower, AngleClass::Two) | (Side::Upper, AngleClass::Zero) => {
            return Err(FoliationError::PairOutsideDomain(format!(
                "boundary pair with class {class}"
            )))
        }
        (Side::Lower, c) => c.representative(),
        (Side::Upper, AngleClass::MinusOne) => 3,
        (Side::Upper, c) => c.representative(),
    };
    Ok(LiftedAngle(value))
}

/// Natural lift on `U~ x U~^c`: continuation from the boundary pair below /
/// above the two points, moving `z` first and then `z'` along verticals.
/// `observe` receives every accepted sample with its lift value; `s > 0.5`
/// is the leg moving `z'` with `z` in place.
pub(crate) fn region_lift<O>(
    region: &RegionSpec,
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    observe: O,
) -> Result<LiftedAngle, FoliationError>
where
    O: FnMut(f64, Pair, i64),
{
    let u = region.level_containing(z)?;
    if u.contains(z_prime) {
        return Err(FoliationError::PairOutsideDomain(
            "z' lies in the region".into(),
        ));
    }
    let side = u.side()?;
    let (near, far) = match side {
        Side::Lower => (0.0, 1.0),
        Side::Upper => (1.0, 0.0),
    };
    let z0 = LiftedPoint::new(z.x, near);
    let z1 = LiftedPoint::new(z_prime.x, far);
    let anchor = boundary_lift(z0, z1, f, side)?;
    let path = |s: f64| -> Result<Pair, FoliationError> {
        Ok(if s <= 0.5 {
            let y = near + 2.0 * s * (z.y - near);
            (
                if s == 0.5 {
                    z
                } else {
                    LiftedPoint::new(z.x, y)
                },
                z1,
            )
        } else {
            let y = far + (2.0 * s - 1.0) * (z_prime.y - far);
            (
                z,
                if s >= 1.0 {
                    z_prime
                } else {
                    LiftedPoint::new(z_prime.x, y)
                },
            )
        })
    };
    continue_lift(path, f, anchor, SAME_LEAF_TOL, observe)
}
