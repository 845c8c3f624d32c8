use super::{class_of_difference, FoliationError, FoliationRef, REFINEMENT_FLOOR};
use crate::annulus_maps::LiftedPoint;
use crate::digital_line::{is_adjacent, project, step_increment, AngleClass, LiftedAngle};

/// Initial number of uniform steps along a continuation path.
pub(crate) const CONTINUATION_STEPS: usize = 64;

pub(crate) type Pair = (LiftedPoint, LiftedPoint);

/// Continues an integer lift of the angle class relative to `fol` along
/// `path(s)`, `s` in `[0, 1]`, starting from `start` at `s = 0`.
///
/// Steps are halved until consecutive classes are adjacent and the midpoint
/// class agrees with one endpoint. `observe` sees every accepted sample in
/// order, with the lift value there.
pub(crate) fn continue_lift<P, O>(
    path: P,
    fol: &FoliationRef,
    start: LiftedAngle,
    tol: f64,
    mut observe: O,
) -> Result<LiftedAngle, FoliationError>
where
    P: Fn(f64) -> Result<Pair, FoliationError>,
    O: FnMut(f64, Pair, i64),
{
    let class_at = |s: f64| -> Result<(AngleClass, Pair), FoliationError> {
        let pair = path(s)?;
        let a = fol.leaf_coordinates(pair.0)?;
        let b = fol.leaf_coordinates(pair.1)?;
        Ok((class_of_difference(b.0 - a.0, b.1 - a.1, tol)?, pair))
    };
    let (c0, pair0) = class_at(0.0)?;
    if project(start) != c0 {
        return Err(FoliationError::PairOutsideDomain(format!(
            "anchor class {c0} does not match lift {start}"
        )));
    }
    let mut walker = Walker {
        class_at: &class_at,
        value: start.0,
        observe: &mut observe,
    };
    (walker.observe)(0.0, pair0, start.0);
    let mut s_prev = 0.0;
    let mut c_prev = c0;
    for i in 1..=CONTINUATION_STEPS {
        let s = i as f64 / CONTINUATION_STEPS as f64;
        let (c, pair) = class_at(s)?;
        walker.advance(s_prev, c_prev, s, c, pair)?;
        s_prev = s;
        c_prev = c;
    }
    Ok(LiftedAngle(walker.value))
}

struct Walker<'a, C, O> {
    class_at: &'a C,
    value: i64,
    observe: &'a mut O,
}

impl<C, O> Walker<'_, C, O>
where
    C: Fn(f64) -> Result<(AngleClass, Pair), FoliationError>,
    O: FnMut(f64, Pair, i64),
{
    fn advance(
        &mut self,
        sa: f64,
        ca: AngleClass,
        sb: f64,
        cb: AngleClass,
        pair_b: Pair,
    ) -> Result<(), FoliationError> {
        let mid = 0.5 * (sa + sb);
        let adjacent = is_adjacent(ca, cb);
        if sb - sa < REFINEMENT_FLOOR {
            if !adjacent {
                return Err(FoliationError::PathRefinementExhausted { s: mid });
            }
            self.accept(ca, cb, sb, pair_b);
            return Ok(());
        }
        let (cm, pair_m) = (self.class_at)(mid)?;
        if adjacent && (cm == ca || cm == cb) {
            self.accept(ca, cb, sb, pair_b);
            return Ok(());
        }
        self.advance(sa, ca, mid, cm, pair_m)?;
        self.advance(mid, cm, sb, cb, pair_b)
    }

    fn accept(&mut self, ca: AngleClass, cb: AngleClass, sb: f64, pair_b: Pair) {
        self.value += step_increment(ca, cb).expect("adjacent classes");
        (self.observe)(sb, pair_b, self.value);
    }
}

/// Concatenates straight segments between `points` into a path on `[0, 1]`
/// with equal parameter time per segment.
pub(crate) fn polyline(points: Vec<(f64, f64)>) -> impl Fn(f64) -> (f64, f64) {
    move |s: f64| {
        let n = points.len() - 1;
        if n == 0 || s >= 1.0 {
            return points[n];
        }
        let u = (s.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
        let i = (u.floor() as usize).min(n - 1);
        let t = u - i as f64;
        let (a, b) = (points[i], points[i + 1]);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }
}
