use super::{angle_class, FoliationError, FoliationRef, REFINEMENT_FLOOR, SAME_LEAF_TOL};
use crate::annulus_maps::{LiftedPoint, MapSpec};
use crate::digital_line::AngleClass;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

const INITIAL_STEPS: usize = 16;
const MIN_DIFFERENCE: f64 = 1e-12;

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `tau` from the continuous winding of the leaf-coordinate difference
/// vector along the path `F -> V -> F'` given by the two isotopies.
///
/// Independent of the natural-lift machinery; used as a cross-check and as
/// the fallback when continuation cannot be resolved.
pub fn tau_winding(
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: &FoliationRef,
    f_prime: &FoliationRef,
) -> Result<i64, FoliationError> {
    let start = angle_class(z, z_prime, f, SAME_LEAF_TOL)?;
    let end = angle_class(z, z_prime, f_prime, SAME_LEAF_TOL)?;
    if f.pushforward() == f_prime.pushforward() {
        return Ok(0);
    }
    let a = f.pushforward();
    let b = f_prime.pushforward();
    let diff = |m: &MapSpec, t: f64| -> Result<(f64, f64), FoliationError> {
        let p = m.eval_inverse_at(t, z)?;
        let q = m.eval_inverse_at(t, z_prime)?;
        Ok((q.x - p.x, q.y - p.y))
    };
    let psi0 = angle_of(diff(a, 1.0)?, 0.0)?;
    let mut psi = psi0;
    if !a.is_identity() {
        psi += track(|s| diff(a, 1.0 - s), 0.0)?;
    }
    if !b.is_identity() {
        psi += track(|s| diff(b, s), 1.0)?;
    }
    Ok(lift_near(end, psi) - lift_near(start, psi0))
}

fn angle_of(v: (f64, f64), s: f64) -> Result<f64, FoliationError> {
    if v.0.hypot(v.1) < MIN_DIFFERENCE {
        return Err(FoliationError::VanishingDifference { s });
    }
    Ok(v.1.atan2(v.0))
}

/// The integer congruent to `class` mod 4 nearest to the continuous digital
/// coordinate of `psi` (up = 0, left = 1, down = 2, right = -1).
fn lift_near(class: AngleClass, psi: f64) -> i64 {
    let u = (psi - FRAC_PI_2) / FRAC_PI_2;
    let r = class.representative() as f64;
    let k = ((u - r) / 4.0).round();
    (r + 4.0 * k) as i64
}

/// Total continuous change of the angle of `v(s)` over `s` in `[0, 1]`.
/// `leg` offsets the reported `s` in errors.
fn track<V>(v: V, leg: f64) -> Result<f64, FoliationError>
where
    V: Fn(f64) -> Result<(f64, f64), FoliationError>,
{
    let angle = |s: f64| -> Result<f64, FoliationError> { angle_of(v(s)?, leg + s) };
    let mut total = 0.0;
    let mut sa = 0.0;
    let mut pa = angle(0.0)?;
    for i in 1..=INITIAL_STEPS {
        let sb = i as f64 / INITIAL_STEPS as f64;
        let pb = angle(sb)?;
        total += refine(&angle, sa, pa, sb, pb, leg)?;
        sa = sb;
        pa = pb;
    }
    Ok(total)
}

fn refine<A>(angle: &A, sa: f64, pa: f64, sb: f64, pb: f64, leg: f64) -> Result<f64, FoliationError>
where
    A: Fn(f64) -> Result<f64, FoliationError>,
{
    let mid = 0.5 * (sa + sb);
    let d = wrap(pb - pa);
    if sb - sa < REFINEMENT_FLOOR {
        return if d.abs() <= FRAC_PI_4 {
            Ok(d)
        } else {
            Err(FoliationError::PathRefinementExhausted { s: leg + mid })
        };
    }
    let pm = angle(mid)?;
    let (d1, d2) = (wrap(pm - pa), wrap(pb - pm));
    if d.abs() <= FRAC_PI_4
        && d1.abs() <= FRAC_PI_4
        && d2.abs() <= FRAC_PI_4
        && (d1 + d2 - d).abs() < 1e-9
    {
        return Ok(d);
    }
    Ok(refine(angle, sa, pa, mid, pm, leg)? + refine(angle, mid, pm, sb, pb, leg)?)
}
