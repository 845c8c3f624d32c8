use super::{Circle, TheoremError};
use crate::annulus_maps::{LiftedPoint, MapSpec};
use crate::digital_line::AngleClass;
use crate::foliation_engine::{angle_class, FoliationRef, SAME_LEAF_TOL};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const BOUNDARY_PROBES: usize = 64;
const BISECTION_STEPS: usize = 60;
const NEWTON_MAX_ITER: usize = 60;

/// Resolution of the leaf scan: `leaves` verticals at `x = (i + 1/2) / leaves`
/// with `samples` intervals along each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeafGrid {
    pub leaves: usize,
    pub samples: usize,
}

impl Default for LeafGrid {
    fn default() -> Self {
        LeafGrid {
            leaves: 64,
            samples: 128,
        }
    }
}

/// Displacement class pattern on the boundary for `g~ = f~^q T^-p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistOrientation {
    /// `-1` on `C0`, `1` on `C1`.
    Increasing,
    /// `1` on `C0`, `-1` on `C1`; the pattern of `g~^{-1}` is the increasing one.
    Decreasing,
}

/// Whether `g~(z)` lies above (`Y0`) or below (`Y2`) `z` on its leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchLabel {
    Y0,
    Y2,
    Fixed,
}

/// A point of a vertical where `g~` maps the vertical back onto itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub leaf: usize,
    /// Position among the candidates of its leaf, from the bottom.
    pub rank: usize,
    pub x: f64,
    pub y: f64,
    pub dy: f64,
    pub label: BranchLabel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    /// One period, `f~^k(z0)` for `k < q`, with `x` reduced mod 1.
    pub points: Vec<LiftedPoint>,
    pub type_pq: (i64, i64),
    /// Largest `|g~(z) - z|` over the lifted orbit.
    pub residual: f64,
    pub well_ordered: bool,
}

impl OrbitRecord {
    /// Lifted orbit `f~^k(z0)`, `k < q`, starting from the first point.
    pub fn lifted(&self, m: &MapSpec) -> Result<Vec<LiftedPoint>, TheoremError> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut z = self.points[0];
        for _ in 0..self.type_pq.1 {
            out.push(z);
            z = m.apply_lift(z)?;
        }
        Ok(out)
    }
}

fn return_map(m: &MapSpec, p: i64, q: i64) -> Result<MapSpec, TheoremError> {
    if q < 1 {
        return Err(TheoremError::InvalidInput(format!(
            "q must be at least 1, got {q}"
        )));
    }
    m.validate()?;
    Ok(MapSpec::compose(vec![
        MapSpec::power(m.clone(), q),
        MapSpec::deck(-p),
    ]))
}

fn boundary_class(g: &MapSpec, circle: Circle) -> Result<AngleClass, TheoremError> {
    let v = FoliationRef::vertical();
    let mut seen: Option<AngleClass> = None;
    for i in 0..BOUNDARY_PROBES {
        let z = LiftedPoint::new(i as f64 / BOUNDARY_PROBES as f64, circle.y());
        let w = g.apply_lift(z)?;
        if z.dist(w) <= SAME_LEAF_TOL {
            return Err(TheoremError::BoundaryFixed { circle });
        }
        let c = angle_class(z, w, &v, SAME_LEAF_TOL)?;
        match seen {
            None => seen = Some(c),
            Some(s) if s != c => {
                return Err(TheoremError::TwistConditionFailed { circle, class: c })
            }
            _ => {}
        }
    }
    Ok(seen.expect("probes are non-empty"))
}

/// Checks the boundary twist condition for `g~ = f~^q T^-p`.
pub fn twist_orientation(m: &MapSpec, p: i64, q: i64) -> Result<TwistOrientation, TheoremError> {
    let g = return_map(m, p, q)?;
    let c0 = boundary_class(&g, Circle::C0)?;
    let c1 = boundary_class(&g, Circle::C1)?;
    match (c0, c1) {
        (AngleClass::MinusOne, AngleClass::One) => Ok(TwistOrientation::Increasing),
        (AngleClass::One, AngleClass::MinusOne) => Ok(TwistOrientation::Decreasing),
        (AngleClass::MinusOne, c) | (AngleClass::One, c) => {
            Err(TheoremError::TwistConditionFailed {
                circle: Circle::C1,
                class: c,
            })
        }
        (c, _) => Err(TheoremError::TwistConditionFailed {
            circle: Circle::C0,
            class: c,
        }),
    }
}

fn displacement(g: &MapSpec, z: LiftedPoint) -> Result<(f64, f64), TheoremError> {
    let w = g.apply_lift(z)?;
    Ok((w.x - z.x, w.y - z.y))
}

/// All zeros of `y -> p1(g~(x, y)) - x` on the vertical at `x`, from the
/// bottom, found by sign changes on `samples` intervals and bisection.
pub(super) fn leaf_zeros(
    g: &MapSpec,
    x: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>, TheoremError> {
    let dx =
        |y: f64| -> Result<f64, TheoremError> { Ok(displacement(g, LiftedPoint::new(x, y))?.0) };
    let mut out = Vec::new();
    let mut ya = 0.0;
    let mut fa = dx(ya)?;
    for j in 1..=samples {
        let yb = j as f64 / samples as f64;
        let fb = dx(yb)?;
        if fa == 0.0 {
            out.push(ya);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (ya, yb, fa);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                let fm = dx(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm * flo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        ya = yb;
        fa = fb;
    }
    if fa == 0.0 {
        out.push(1.0);
    }
    out.into_iter()
        .map(|y| Ok((y, displacement(g, LiftedPoint::new(x, y))?.1)))
        .collect()
}

fn label(dy: f64, tol: f64) -> BranchLabel {
    if dy.abs() <= tol {
        BranchLabel::Fixed
    } else if dy > 0.0 {
        BranchLabel::Y0
    } else {
        BranchLabel::Y2
    }
}

/// Points where the displacement of `g~ = f~^q T^-p` is vertical, on a grid
/// of leaves, labelled by the direction of the displacement.
pub fn pb_candidates(
    m: &MapSpec,
    p: i64,
    q: i64,
    grid: LeafGrid,
) -> Result<Vec<Candidate>, TheoremError> {
    twist_orientation(m, p, q)?;
    let g = return_map(m, p, q)?;
    candidates_with(&g, grid, SAME_LEAF_TOL)
}

fn candidates_with(g: &MapSpec, grid: LeafGrid, tol: f64) -> Result<Vec<Candidate>, TheoremError> {
    if grid.leaves == 0 || grid.samples == 0 {
        return Err(TheoremError::InvalidInput(
            "leaf grid must be non-empty".into(),
        ));
    }
    let per_leaf = (0..grid.leaves)
        .into_par_iter()
        .map(|leaf| {
            let x = (leaf as f64 + 0.5) / grid.leaves as f64;
            let zeros = leaf_zeros(g, x, grid.samples)?;
            Ok(zeros
                .into_iter()
                .enumerate()
                .map(|(rank, (y, dy))| Candidate {
                    leaf,
                    rank,
                    x,
                    y,
                    dy,
                    label: label(dy, tol),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, TheoremError>>()?;
    Ok(per_leaf.into_iter().flatten().collect())
}

fn residual(g: &MapSpec, z: LiftedPoint) -> Result<f64, TheoremError> {
    Ok(g.apply_lift(z)?.dist(z))
}

/// Levenberg-Marquardt on `g~(z) - z` with a finite-difference Jacobian.
fn polish(g: &MapSpec, seed: LiftedPoint, tol: f64) -> Result<LiftedPoint, TheoremError> {
    let lost = || TheoremError::BracketLost {
        x: seed.x,
        y: seed.y,
    };
    let eval = |z: LiftedPoint| -> Result<[f64; 2], TheoremError> {
        let (a, b) = displacement(g, z)?;
        Ok([a, b])
    };
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut z = seed;
    let mut r = eval(z)?;
    let mut lambda = 1e-9;
    let target = (tol * 1e-3).max(1e-14);
    for _ in 0..NEWTON_MAX_ITER {
        if norm(r) <= target {
            break;
        }
        let h = 1e-7;
        let (ylo, yhi) = ((z.y - h).max(0.0), (z.y + h).min(1.0));
        let rxp = eval(LiftedPoint::new(z.x + h, z.y))?;
        let rxm = eval(LiftedPoint::new(z.x - h, z.y))?;
        let ryp = eval(LiftedPoint::new(z.x, yhi))?;
        let rym = eval(LiftedPoint::new(z.x, ylo))?;
        let j = [
            [
                (rxp[0] - rxm[0]) / (2.0 * h),
                (ryp[0] - rym[0]) / (yhi - ylo),
            ],
            [
                (rxp[1] - rxm[1]) / (2.0 * h),
                (ryp[1] - rym[1]) / (yhi - ylo),
            ],
        ];
        // (J^T J + lambda I) d = -J^T r
        let a11 = j[0][0] * j[0][0] + j[1][0] * j[1][0];
        let a12 = j[0][0] * j[0][1] + j[1][0] * j[1][1];
        let a22 = j[0][1] * j[0][1] + j[1][1] * j[1][1];
        let b1 = -(j[0][0] * r[0] + j[1][0] * r[1]);
        let b2 = -(j[0][1] * r[0] + j[1][1] * r[1]);
        let mut improved = false;
        for _ in 0..20 {
            let scale = lambda * (a11 + a22).max(1e-300);
            let (m11, m22) = (a11 + scale, a22 + scale);
            let det = m11 * m22 - a12 * a12;
            if det.abs() < 1e-300 {
                lambda *= 10.0;
                continue;
            }
            let d = [(m22 * b1 - a12 * b2) / det, (m11 * b2 - a12 * b1) / det];
            let cand = LiftedPoint::new(z.x + d[0], z.y + d[1]);
            let rc = eval(cand)?;
            if norm(rc) < norm(r) {
                z = cand;
                r = rc;
                lambda = (lambda * 0.1).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if norm(r) <= tol {
        Ok(z)
    } else {
        Err(lost())
    }
}

fn record(
    m: &MapSpec,
    g: &MapSpec,
    z0: LiftedPoint,
    p: i64,
    q: i64,
) -> Result<OrbitRecord, TheoremError> {
    let start = LiftedPoint::new(z0.x.rem_euclid(1.0), z0.y);
    let mut points = Vec::with_capacity(q as usize);
    let mut worst: f64 = 0.0;
    let mut z = start;
    for _ in 0..q {
        worst = worst.max(residual(g, z)?);
        points.push(LiftedPoint::new(z.x.rem_euclid(1.0), z.y));
        z = m.apply_lift(z)?;
    }
    let mut orbit = OrbitRecord {
        points,
        type_pq: (p, q),
        residual: worst,
        well_ordered: false,
    };
    orbit.well_ordered = well_ordered_check(&orbit, m)?;
    Ok(orbit)
}

/// Polishes a candidate into a periodic orbit of type `(p, q)` with
/// residual at most `tol`.
pub fn refine_orbit(
    m: &MapSpec,
    p: i64,
    q: i64,
    seed: &Candidate,
    tol: f64,
) -> Result<OrbitRecord, TheoremError> {
    let g = return_map(m, p, q)?;
    let z = polish(&g, LiftedPoint::new(seed.x, seed.y), tol)?;
    record(m, &g, z, p, q)
}

/// Displacement of `g~` on the nodes `((i + 1/2) / leaves, j / samples)`.
fn node_displacements(g: &MapSpec, grid: LeafGrid) -> Result<Vec<Vec<(f64, f64)>>, TheoremError> {
    (0..grid.leaves)
        .into_par_iter()
        .map(|i| {
            let x = (i as f64 + 0.5) / grid.leaves as f64;
            (0..=grid.samples)
                .map(|j| displacement(g, LiftedPoint::new(x, j as f64 / grid.samples as f64)))
                .collect()
        })
        .collect()
}

/// Centres of grid cells on whose corners both displacement components
/// change sign (or vanish).
fn bracketing_cells(g: &MapSpec, grid: LeafGrid) -> Result<Vec<LiftedPoint>, TheoremError> {
    let d = node_displacements(g, grid)?;
    let straddles = |v: [f64; 4]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut out = Vec::new();
    for i in 0..grid.leaves {
        let k = (i + 1) % grid.leaves;
        for j in 0..grid.samples {
            let corners = [d[i][j], d[k][j], d[i][j + 1], d[k][j + 1]];
            if straddles(corners.map(|c| c.0)) && straddles(corners.map(|c| c.1)) {
                out.push(LiftedPoint::new(
                    (i as f64 + 1.0) / grid.leaves as f64,
                    (j as f64 + 0.5) / grid.samples as f64,
                ));
            }
        }
    }
    Ok(out)
}

fn circle_dist(a: LiftedPoint, b: LiftedPoint) -> f64 {
    let dx = (a.x - b.x).rem_euclid(1.0);
    dx.min(1.0 - dx).hypot(a.y - b.y)
}

fn hausdorff(a: &[LiftedPoint], b: &[LiftedPoint]) -> f64 {
    let one_sided = |u: &[LiftedPoint], v: &[LiftedPoint]| {
        u.iter()
            .map(|&p| {
                v.iter()
                    .map(|&q| circle_dist(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Periodic orbits of type `(p, q)`: grid cells where the vertical
/// displacement changes sign along leaves and the branch label changes sign
/// as well are polished to fixed points of `g~ = f~^q T^-p`.
/// Orbits closer than `10 tol` in Hausdorff distance are merged. Fewer than
/// two distinct orbits is an error carrying what was found.
pub fn find_pq_orbits(
    m: &MapSpec,
    p: i64,
    q: i64,
    tol: f64,
) -> Result<Vec<OrbitRecord>, TheoremError> {
    find_pq_orbits_on(m, p, q, tol, LeafGrid::default())
}

pub fn find_pq_orbits_on(
    m: &MapSpec,
    p: i64,
    q: i64,
    tol: f64,
    grid: LeafGrid,
) -> Result<Vec<OrbitRecord>, TheoremError> {
    twist_orientation(m, p, q)?;
    let g = return_map(m, p, q)?;
    let seeds = bracketing_cells(&g, grid)?;
    let mut orbits: Vec<OrbitRecord> = Vec::new();
    for z in seeds {
        let Ok(polished) = polish(&g, z, tol) else {
            continue;
        };
        let orbit = record(m, &g, polished, p, q)?;
        if orbit.residual > tol {
            continue;
        }
        if orbits
            .iter()
            .all(|o| hausdorff(&o.points, &orbit.points) > 10.0 * tol)
        {
            orbits.push(orbit);
        }
    }
    if orbits.len() < 2 {
        return Err(TheoremError::OnlyOneFound { orbits });
    }
    Ok(orbits)
}

/// True when the orbit projects injectively to the circle and `f~`
/// preserves the order of its lifts over three fundamental domains.
pub fn well_ordered_check(orbit: &OrbitRecord, m: &MapSpec) -> Result<bool, TheoremError> {
    const SEPARATION: f64 = 1e-9;
    let mut xs: Vec<f64> = orbit.points.iter().map(|z| z.x.rem_euclid(1.0)).collect();
    xs.sort_by(f64::total_cmp);
    for w in xs.windows(2) {
        if w[1] - w[0] <= SEPARATION {
            return Ok(false);
        }
    }
    if xs.len() > 1 && xs[0] + 1.0 - xs[xs.len() - 1] <= SEPARATION {
        return Ok(false);
    }
    let mut lifts: Vec<LiftedPoint> = orbit
        .points
        .iter()
        .flat_map(|&z| {
            (-1..=1).map(move |k| LiftedPoint::new(z.x.rem_euclid(1.0), z.y).translate(k))
        })
        .collect();
    lifts.sort_by(|a, b| a.x.total_cmp(&b.x));
    let images = lifts
        .iter()
        .map(|&z| m.apply_lift(z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(images.windows(2).all(|w| w[0].x < w[1].x))
}
