use super::billiard::{billiard_lift, billiard_lift_inverse};
use super::curve::{ConvexCurve, DEFORMATION_KNOTS};
use super::{LiftedPoint, MapError};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 60;

/// A homeomorphism of the annulus isotopic to the identity, as a composition
/// tree of primitives, together with its designated lift to the strip.
///
/// `Compose` applies its items in order: the first item acts first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum MapSpec {
    /// `(x, y) -> (x + a + b y, y)`.
    IntegrableTwist {
        a: f64,
        b: f64,
    },
    BilliardMap {
        curve: ConvexCurve,
    },
    /// `(x, y) -> (x, y + eps y (1 - y) h(x))` with `h(x) = sum_k c_k cos(2 pi k x)`.
    PinnedKick {
        eps: f64,
        harmonics: Vec<f64>,
    },
    Compose {
        items: Vec<MapSpec>,
    },
    Inverse {
        map: Box<MapSpec>,
    },
    Power {
        map: Box<MapSpec>,
        n: i64,
    },
    /// `T^n`.
    Deck {
        n: i64,
    },
}

/// Invariant measure class used to decide the non-wandering certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MeasureClass {
    Any,
    Lebesgue,
    Billiard,
    None,
}

fn merge(a: MeasureClass, b: MeasureClass) -> MeasureClass {
    use MeasureClass::*;
    match (a, b) {
        (Any, x) | (x, Any) => x,
        (x, y) if x == y => x,
        _ => None,
    }
}

impl MapSpec {
    pub fn identity() -> Self {
        MapSpec::Compose { items: Vec::new() }
    }

    pub fn twist(a: f64, b: f64) -> Self {
        MapSpec::IntegrableTwist { a, b }
    }

    pub fn billiard(curve: ConvexCurve) -> Self {
        MapSpec::BilliardMap { curve }
    }

    pub fn kick(eps: f64, harmonics: Vec<f64>) -> Self {
        MapSpec::PinnedKick { eps, harmonics }
    }

    pub fn compose(items: Vec<MapSpec>) -> Self {
        MapSpec::Compose { items }
    }

    pub fn inverse(map: MapSpec) -> Self {
        MapSpec::Inverse { map: Box::new(map) }
    }

    pub fn power(map: MapSpec, n: i64) -> Self {
        MapSpec::Power {
            map: Box::new(map),
            n,
        }
    }

    pub fn deck(n: i64) -> Self {
        MapSpec::Deck { n }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: MapSpec) -> MapSpec {
        let mut items = match self {
            MapSpec::Compose { items } => items.clone(),
            other => vec![other.clone()],
        };
        match next {
            MapSpec::Compose { items: more } => items.extend(more),
            other => items.push(other),
        }
        MapSpec::Compose { items }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            MapSpec::Compose { items } => items.iter().all(MapSpec::is_identity),
            MapSpec::Deck { n } => *n == 0,
            MapSpec::Power { map, n } => *n == 0 || map.is_identity(),
            MapSpec::Inverse { map } => map.is_identity(),
            MapSpec::IntegrableTwist { a, b } => *a == 0.0 && *b == 0.0,
            MapSpec::PinnedKick { eps, .. } => *eps == 0.0,
            MapSpec::BilliardMap { .. } => false,
        }
    }

    /// Checks the structural invariants (kick amplitude bound, finiteness).
    pub fn validate(&self) -> Result<(), MapError> {
        match self {
            MapSpec::IntegrableTwist { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(MapError::InvalidSpec(
                        "twist parameters must be finite".into(),
                    ));
                }
            }
            MapSpec::BilliardMap { .. } | MapSpec::Deck { .. } => {}
            MapSpec::PinnedKick { eps, harmonics } => {
                if !eps.is_finite() || harmonics.iter().any(|c| !c.is_finite()) {
                    return Err(MapError::InvalidSpec(
                        "kick parameters must be finite".into(),
                    ));
                }
                let bound = eps.abs() * harmonics.iter().map(|c| c.abs()).sum::<f64>();
                if bound >= 1.0 {
                    return Err(MapError::InvalidSpec(format!(
                        "kick amplitude eps * sum|c_k| = {bound} must be < 1"
                    )));
                }
            }
            MapSpec::Compose { items } => items.iter().try_for_each(MapSpec::validate)?,
            MapSpec::Inverse { map } | MapSpec::Power { map, .. } => map.validate()?,
        }
        Ok(())
    }

    fn measure_class(&self) -> MeasureClass {
        match self {
            MapSpec::IntegrableTwist { .. } => MeasureClass::Lebesgue,
            MapSpec::BilliardMap { .. } => MeasureClass::Billiard,
            MapSpec::Deck { .. } => MeasureClass::Any,
            MapSpec::PinnedKick { eps, .. } if *eps == 0.0 => MeasureClass::Any,
            MapSpec::PinnedKick { .. } => MeasureClass::None,
            MapSpec::Compose { items } => items
                .iter()
                .map(MapSpec::measure_class)
                .fold(MeasureClass::Any, merge),
            MapSpec::Inverse { map } | MapSpec::Power { map, .. } => map.measure_class(),
        }
    }

    /// True when the map preserves a known finite measure with full support,
    /// hence is non-wandering: integrable twists (area) and billiards
    /// (`sin theta ds dtheta`), plus inverses, powers, deck shifts and
    /// compositions within one of those families.
    pub fn non_wandering_certified(&self) -> bool {
        !matches!(self.measure_class(), MeasureClass::None)
    }

    /// The designated lift `f~(z)`.
    pub fn apply_lift(&self, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        self.eval_at(1.0, z)
    }

    /// `f~^{-1}(z)`.
    pub fn apply_inverse(&self, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        self.eval_inverse_at(1.0, z)
    }

    /// Time-`t` map of the canonical isotopy from the identity.
    pub(crate) fn eval_at(&self, t: f64, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        if t == 0.0 {
            return Ok(z);
        }
        match self {
            MapSpec::IntegrableTwist { a, b } => Ok(LiftedPoint::new(z.x + t * (a + b * z.y), z.y)),
            MapSpec::Deck { n } => Ok(LiftedPoint::new(z.x + t * *n as f64, z.y)),
            MapSpec::PinnedKick { eps, harmonics } => {
                let k = t * eps * modulation(harmonics, z.x);
                Ok(LiftedPoint::new(z.x, z.y + k * z.y * (1.0 - z.y)))
            }
            MapSpec::BilliardMap { curve } => Ok(billiard_at(curve, t, z)),
            MapSpec::Compose { items } => items.iter().try_fold(z, |acc, m| m.eval_at(t, acc)),
            MapSpec::Inverse { map } => map.eval_inverse_at(t, z),
            MapSpec::Power { map, n } => {
                let mut w = z;
                for _ in 0..n.unsigned_abs() {
                    w = if *n > 0 {
                        map.eval_at(t, w)?
                    } else {
                        map.eval_inverse_at(t, w)?
                    };
                }
                Ok(w)
            }
        }
    }

    /// Inverse of [`eval_at`](Self::eval_at) at the same `t`.
    pub(crate) fn eval_inverse_at(&self, t: f64, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        if t == 0.0 {
            return Ok(z);
        }
        match self {
            MapSpec::IntegrableTwist { a, b } => Ok(LiftedPoint::new(z.x - t * (a + b * z.y), z.y)),
            MapSpec::Deck { n } => Ok(LiftedPoint::new(z.x - t * *n as f64, z.y)),
            MapSpec::PinnedKick { eps, harmonics } => {
                let k = t * eps * modulation(harmonics, z.x);
                // y + k y (1 - y) = z.y, root in [0, 1] in a cancellation-free form
                let disc = ((1.0 + k) * (1.0 + k) - 4.0 * k * z.y).max(0.0);
                let y = 2.0 * z.y / ((1.0 + k) + disc.sqrt());
                Ok(LiftedPoint::new(z.x, y))
            }
            MapSpec::BilliardMap { curve } => {
                if t == 1.0 {
                    Ok(billiard_lift_inverse(curve, z))
                } else if t <= 0.5 || curve.deformation().is_none() {
                    let guess = LiftedPoint::new(z.x - 2.0 * t * z.y, z.y);
                    if curve.deformation().is_some() {
                        Ok(guess)
                    } else {
                        newton_invert(|p| self.eval_at(t, p), z, guess)
                    }
                } else {
                    let (k, _) = knot(t);
                    let guess = billiard_lift_inverse(&curve.deformation().unwrap()[k], z);
                    newton_invert(|p| self.eval_at(t, p), z, guess)
                }
            }
            MapSpec::Compose { items } => items
                .iter()
                .rev()
                .try_fold(z, |acc, m| m.eval_inverse_at(t, acc)),
            MapSpec::Inverse { map } => map.eval_at(t, z),
            MapSpec::Power { map, n } => {
                let mut w = z;
                for _ in 0..n.unsigned_abs() {
                    w = if *n > 0 {
                        map.eval_inverse_at(t, w)?
                    } else {
                        map.eval_at(t, w)?
                    };
                }
                Ok(w)
            }
        }
    }
}

/// Knot interval and weight for `t` in `(1/2, 1]`.
fn knot(t: f64) -> (usize, f64) {
    let u = (2.0 * t - 1.0) * DEFORMATION_KNOTS as f64;
    let k = (u.floor() as usize).min(DEFORMATION_KNOTS - 1);
    (k, u - k as f64)
}

/// Billiard isotopy: the circle billiard shear `(x + 2ty, y)` up to
/// `t = 1/2`, then billiards of the tables deforming the circle into
/// `curve`, interpolated linearly between consecutive knots. Falls back to
/// lift-linear interpolation when the deformation is unavailable.
fn billiard_at(curve: &ConvexCurve, t: f64, z: LiftedPoint) -> LiftedPoint {
    if t == 1.0 {
        return billiard_lift(curve, z);
    }
    let Some(knots) = curve.deformation() else {
        let w = billiard_lift(curve, z);
        return LiftedPoint::new(z.x + t * (w.x - z.x), z.y + t * (w.y - z.y));
    };
    if t <= 0.5 {
        return LiftedPoint::new(z.x + 2.0 * t * z.y, z.y);
    }
    let (k, w) = knot(t);
    let at = |i: usize| {
        if i == 0 {
            LiftedPoint::new(z.x + z.y, z.y)
        } else {
            billiard_lift(&knots[i], z)
        }
    };
    let (a, b) = (at(k), at(k + 1));
    LiftedPoint::new(a.x + w * (b.x - a.x), a.y + w * (b.y - a.y))
}

pub(crate) fn modulation(harmonics: &[f64], x: f64) -> f64 {
    harmonics
        .iter()
        .enumerate()
        .map(|(k, c)| c * (TAU * k as f64 * x).cos())
        .sum()
}

/// Solves `f(w) = target` by damped Newton with a finite-difference Jacobian.
pub(crate) fn newton_invert<F>(
    f: F,
    target: LiftedPoint,
    guess: LiftedPoint,
) -> Result<LiftedPoint, MapError>
where
    F: Fn(LiftedPoint) -> Result<LiftedPoint, MapError>,
{
    let residual = |w: LiftedPoint| -> Result<[f64; 2], MapError> {
        let v = f(w)?;
        Ok([v.x - target.x, v.y - target.y])
    };
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut w = guess;
    let mut r = residual(w)?;
    for _ in 0..NEWTON_MAX_ITER {
        if norm(r) < NEWTON_TOL {
            return Ok(w);
        }
        let h = 1e-7;
        let hx = h;
        let (y_lo, y_hi) = ((w.y - h).max(0.0), (w.y + h).min(1.0));
        let fxp = residual(LiftedPoint::new(w.x + hx, w.y))?;
        let fxm = residual(LiftedPoint::new(w.x - hx, w.y))?;
        let fyp = residual(LiftedPoint::new(w.x, y_hi))?;
        let fym = residual(LiftedPoint::new(w.x, y_lo))?;
        let dy = y_hi - y_lo;
        let j = [
            [(fxp[0] - fxm[0]) / (2.0 * hx), (fyp[0] - fym[0]) / dy],
            [(fxp[1] - fxm[1]) / (2.0 * hx), (fyp[1] - fym[1]) / dy],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.is_nan() || det.abs() <= 1e-14 {
            return Err(MapError::InversionFailure {
                x: target.x,
                y: target.y,
            });
        }
        let step = [
            (j[1][1] * r[0] - j[0][1] * r[1]) / det,
            (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = LiftedPoint::new(w.x - lambda * step[0], w.y - lambda * step[1]);
            let rc = residual(cand)?;
            if norm(rc) < norm(r) {
                w = cand;
                r = rc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(r) < 1e-10 {
        Ok(w)
    } else {
        Err(MapError::InversionFailure {
            x: target.x,
            y: target.y,
        })
    }
}
