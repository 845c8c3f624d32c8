use super::{Circle, TheoremError};
use crate::annulus_maps::{LiftedPoint, MapSpec};
use crate::digital_line::{project, LiftedAngle};
use crate::foliation_engine::continuation::{continue_lift, polyline};
use crate::foliation_engine::{class_of_difference, FoliationError, FoliationRef, SAME_LEAF_TOL};
use serde::{Deserialize, Serialize};

const DOGLEGS: [f64; 6] = [0.05, -0.05, 0.15, -0.15, 0.3, -0.3];

/// Path used to reach a probe: along `circle` to `x + dogleg`, across to the
/// probe height, then horizontally to the probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRoute {
    pub circle: Circle,
    pub dogleg: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaProbe {
    pub z: LiftedPoint,
    pub value: LiftedAngle,
    pub route: DeltaRoute,
}

fn anchor(circle: Circle) -> LiftedAngle {
    match circle {
        Circle::C0 => LiftedAngle(-1),
        Circle::C1 => LiftedAngle(1),
    }
}

fn lift_along(
    m: &MapSpec,
    fol: &FoliationRef,
    base_x: f64,
    z: LiftedPoint,
    route: DeltaRoute,
) -> Result<LiftedAngle, FoliationError> {
    let h = route.circle.y();
    let turn = z.x + route.dogleg;
    let mut corners = vec![(base_x, h), (turn, h), (turn, z.y)];
    if route.dogleg != 0.0 {
        corners.push((z.x, z.y));
    }
    let path = polyline(corners);
    let pairs = |s: f64| {
        let (x, y) = path(s);
        let w = LiftedPoint::new(x, y);
        Ok((w, m.apply_lift(w)?))
    };
    continue_lift(
        pairs,
        fol,
        anchor(route.circle),
        SAME_LEAF_TOL,
        |_, _, _| {},
    )
}

/// Integer lift of the displacement class `z -> (z, f~(z))` relative to `F`,
/// normalised to `-1` on `C0` and `1` on `C1`, continued from the base point
/// along each circle and then into the annulus.
///
/// Routes are tried from the base circle first, with doglegs around fixed
/// points, then from the opposite circle. The map must show the increasing
/// boundary pattern, `-1` on `C0` and `1` on `C1`.
pub fn delta_lift(
    m: &MapSpec,
    fol: &FoliationRef,
    base: LiftedPoint,
    probes: &[LiftedPoint],
) -> Result<Vec<DeltaProbe>, TheoremError> {
    m.validate()?;
    let first = if base.y <= 0.5 {
        Circle::C0
    } else {
        Circle::C1
    };
    for circle in [Circle::C0, Circle::C1] {
        let z = LiftedPoint::new(base.x, circle.y());
        let w = m.apply_lift(z)?;
        if z.dist(w) <= SAME_LEAF_TOL {
            return Err(TheoremError::BoundaryFixed { circle });
        }
        let (a, b) = (fol.leaf_coordinates(z)?, fol.leaf_coordinates(w)?);
        let class = class_of_difference(b.0 - a.0, b.1 - a.1, SAME_LEAF_TOL)?;
        if class != project(anchor(circle)) {
            return Err(TheoremError::TwistConditionFailed { circle, class });
        }
    }
    let second = match first {
        Circle::C0 => Circle::C1,
        Circle::C1 => Circle::C0,
    };
    let routes: Vec<DeltaRoute> = [first, second]
        .into_iter()
        .flat_map(|circle| {
            std::iter::once(0.0)
                .chain(DOGLEGS)
                .map(move |dogleg| DeltaRoute { circle, dogleg })
        })
        .collect();
    probes
        .iter()
        .map(|&z| {
            for &route in &routes {
                match lift_along(m, fol, base.x, z, route) {
                    Ok(value) => return Ok(DeltaProbe { z, value, route }),
                    Err(FoliationError::CoincidentPoints)
                    | Err(FoliationError::PathRefinementExhausted { .. }) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            Err(TheoremError::FixedPointOnPath { x: z.x, y: z.y })
        })
        .collect()
}
