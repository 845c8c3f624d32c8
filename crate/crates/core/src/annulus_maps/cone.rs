use super::{LiftedPoint, MapError, MapSpec};

const FD_STEP: f64 = 1e-6;

/// Measured deviation of the vertical direction under `f` and `f^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistCone {
    /// Smallest angle between an image of the vertical vector and the
    /// vertical, over all probes and both `f` and `f^{-1}`.
    pub beta: f64,
    /// Smallest finite-difference value of `d(p1 o f~)/dy`.
    pub min_dx_dy: f64,
    /// Largest finite-difference value of `d(p1 o f~^{-1})/dy`.
    pub max_inverse_dx_dy: f64,
}

impl TwistCone {
    /// Positive twist: images of verticals lean right under `f` and left
    /// under `f^{-1}`, with a uniform cone.
    pub fn is_positive_twist(&self) -> bool {
        self.beta > 0.0 && self.min_dx_dy > 0.0 && self.max_inverse_dx_dy < 0.0
    }
}

fn vertical_image(
    apply: &dyn Fn(LiftedPoint) -> Result<LiftedPoint, MapError>,
    z: LiftedPoint,
) -> Result<(f64, f64), MapError> {
    let lo = LiftedPoint::new(z.x, (z.y - FD_STEP).max(0.0));
    let hi = LiftedPoint::new(z.x, (z.y + FD_STEP).min(1.0));
    let (a, b) = (apply(lo)?, apply(hi)?);
    let h = hi.y - lo.y;
    Ok(((b.x - a.x) / h, (b.y - a.y) / h))
}

/// Estimates the twist cone angle on a `nx x ny` grid over one fundamental
/// domain with `y` in `[y_margin, 1 - y_margin]`.
pub fn twist_cone_angle(
    map: &MapSpec,
    nx: usize,
    ny: usize,
    y_margin: f64,
) -> Result<TwistCone, MapError> {
    let mut cone = TwistCone {
        beta: std::f64::consts::FRAC_PI_2,
        min_dx_dy: f64::INFINITY,
        max_inverse_dx_dy: f64::NEG_INFINITY,
    };
    let fwd = |z| map.apply_lift(z);
    let bwd = |z| map.apply_inverse(z);
    for i in 0..nx {
        for j in 0..ny {
            let x = (i as f64 + 0.5) / nx as f64;
            let y = y_margin + (1.0 - 2.0 * y_margin) * (j as f64 + 0.5) / ny as f64;
            let z = LiftedPoint::new(x, y);
            for (k, apply) in [&fwd as &dyn Fn(_) -> _, &bwd].into_iter().enumerate() {
                let (dx, dy) = vertical_image(apply, z)?;
                let alpha = dx.atan2(dy).abs();
                cone.beta = cone.beta.min(alpha.min(std::f64::consts::PI - alpha));
                if k == 0 {
                    cone.min_dx_dy = cone.min_dx_dy.min(dx);
                } else {
                    cone.max_inverse_dx_dy = cone.max_inverse_dx_dy.max(dx);
                }
            }
        }
    }
    Ok(cone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus_maps::ConvexCurve;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn unit_twist_is_quarter_turn() {
        let c = twist_cone_angle(&MapSpec::twist(0.0, 1.0), 8, 8, 0.01).unwrap();
        assert!((c.beta - FRAC_PI_4).abs() < 1e-6);
        assert!(c.is_positive_twist());
    }

    #[test]
    fn circle_billiard_matches_unit_twist() {
        let c = twist_cone_angle(&MapSpec::billiard(ConvexCurve::circle()), 8, 8, 0.01).unwrap();
        assert!((c.beta - FRAC_PI_4).abs() < 1e-5, "{c:?}");
    }

    #[test]
    fn ellipse_billiard_is_positive_twist() {
        let m = MapSpec::billiard(ConvexCurve::ellipse(1.0, 0.5).unwrap());
        assert!(twist_cone_angle(&m, 16, 16, 0.01)
            .unwrap()
            .is_positive_twist());
    }

    #[test]
    fn negative_twist_is_not_positive() {
        let c = twist_cone_angle(&MapSpec::twist(0.0, -1.0), 4, 4, 0.01).unwrap();
        assert!(!c.is_positive_twist());
    }
}
