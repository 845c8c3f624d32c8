mod common;

use annulus_core::annulus_maps::{ConvexCurve, LiftedPoint, MapSpec};
use annulus_core::digital_line::AngleClass;
use annulus_core::foliation_engine::{
    angle_class, natural_lift, FoliationRef, PairDomain, RegionSpec, SAME_LEAF_TOL,
};
use annulus_core::theorems::*;
use common::*;
use rand::Rng;

fn ellipse_billiard() -> MapSpec {
    MapSpec::billiard(ellipse())
}

fn circle_billiard() -> MapSpec {
    MapSpec::billiard(ConvexCurve::circle())
}

#[test]
fn rotation_examples() {
    let n = 1000;
    let m = MapSpec::twist(0.25, -0.5);
    let r0 = rotation_number(&m, Circle::C0, n).unwrap();
    let r1 = rotation_number(&m, Circle::C1, n).unwrap();
    assert!((r0.value - 0.25).abs() <= r0.half_width);
    assert!((r1.value + 0.25).abs() <= r1.half_width);
    assert_eq!(r0.half_width, 1e-3);

    let e = ellipse_billiard();
    assert!(rotation_number(&e, Circle::C0, n).unwrap().value.abs() <= 1e-3);
    assert!((rotation_number(&e, Circle::C1, n).unwrap().value - 1.0).abs() <= 1e-3);

    // chord subtending a third of the circle
    let c = circle_billiard();
    let r = rotation_number_at(&c, p(0.1, 1.0 / 3.0), n).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() <= r.half_width);
}

#[test]
fn twist_interval_examples() {
    let t = twist_interval(&MapSpec::twist(0.0, 1.0), 1000).unwrap();
    assert!(t.rho0.abs() <= 1e-3 && (t.rho1 - 1.0).abs() <= 1e-3 && !t.reversed);
    let t = twist_interval(&circle_billiard(), 1000).unwrap();
    assert!(t.rho0.abs() <= 1e-3 && (t.rho1 - 1.0).abs() <= 1e-3 && !t.reversed);
    let t = twist_interval(&MapSpec::twist(0.25, -0.5), 1000).unwrap();
    assert!((t.rho0 - 0.25).abs() <= 1e-3 && (t.rho1 + 0.25).abs() <= 1e-3 && t.reversed);
}

#[test]
fn candidate_examples() {
    let grid = LeafGrid {
        leaves: 32,
        samples: 64,
    };
    let c = pb_candidates(&MapSpec::twist(0.25, -0.5), 0, 1, grid).unwrap();
    assert_eq!(c.len(), 32);
    assert!(c
        .iter()
        .all(|k| (k.y - 0.5).abs() < 1e-12 && k.label == BranchLabel::Fixed));

    // both labels occur next to each axis direction, close to the normal chord
    let c = pb_candidates(&ellipse_billiard(), 1, 2, grid).unwrap();
    for axis in [0.0, 0.25, 0.5, 0.75] {
        let near: Vec<&Candidate> = c
            .iter()
            .filter(|k| circle_gap(k.x, axis) < 1.0 / 32.0 && (k.y - 0.5).abs() < 0.1)
            .collect();
        assert!(near.iter().any(|k| k.label == BranchLabel::Y0), "{axis}");
        assert!(near.iter().any(|k| k.label == BranchLabel::Y2), "{axis}");
    }

    assert!(matches!(
        pb_candidates(&MapSpec::twist(0.0, 1.0), 3, 2, grid),
        Err(TheoremError::TwistConditionFailed { .. })
    ));
}

/// Cosine of the angle between the chord and the tangent at each end.
fn chord_tangent_cosines(curve: &ConvexCurve, s0: f64, s1: f64) -> (f64, f64) {
    let (phi0, phi1) = (curve.phi_at(s0), curve.phi_at(s1));
    let (a, b) = (curve.point(phi0), curve.point(phi1));
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    let (t0, t1) = (curve.unit_tangent(phi0), curve.unit_tangent(phi1));
    (
        (d[0] * t0[0] + d[1] * t0[1]) / len,
        (d[0] * t1[0] + d[1] * t1[1]) / len,
    )
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[test]
fn ellipse_period_two_orbits_are_the_axes() {
    let m = ellipse_billiard();
    let tol = 1e-10;
    let orbits = find_pq_orbits(&m, 1, 2, tol).unwrap();
    assert_eq!(orbits.len(), 2);
    let curve = ellipse();
    let mut axes = Vec::new();
    for o in &orbits {
        assert!(o.residual <= tol && o.well_ordered && o.type_pq == (1, 2));
        let (c0, c1) = chord_tangent_cosines(&curve, o.points[0].x, o.points[1].x);
        assert!(c0.abs() < 1e-6 && c1.abs() < 1e-6, "{c0} {c1}");
        assert!(o.points.iter().all(|z| (z.y - 0.5).abs() < 1e-6));
        let s = o.points[0].x;
        let axis = if circle_gap(s, 0.0).min(circle_gap(s, 0.5)) < 1e-6 {
            "major"
        } else {
            assert!(circle_gap(s, 0.25).min(circle_gap(s, 0.75)) < 1e-6, "{s}");
            "minor"
        };
        axes.push(axis);
    }
    axes.sort();
    assert_eq!(axes, ["major", "minor"]);
    let d = orbits[0]
        .points
        .iter()
        .flat_map(|a| {
            orbits[1]
                .points
                .iter()
                .map(move |b| circle_gap(a.x, b.x).hypot(a.y - b.y))
        })
        .fold(f64::INFINITY, f64::min);
    assert!(d > 0.1);
}

#[test]
fn circle_period_three_orbits_are_equilateral() {
    let orbits = find_pq_orbits(&circle_billiard(), 1, 3, 1e-8).unwrap();
    assert!(orbits.len() >= 2);
    for o in &orbits {
        assert!(o.residual <= 1e-8);
        let mut xs: Vec<f64> = o.points.iter().map(|z| z.x).collect();
        xs.sort_by(f64::total_cmp);
        for i in 0..3 {
            let gap = (xs[(i + 1) % 3] - xs[i]).rem_euclid(1.0);
            assert!((gap - 1.0 / 3.0).abs() < 1e-8, "{xs:?}");
        }
        assert!(o.points.iter().all(|z| (z.y - 1.0 / 3.0).abs() < 1e-8));
    }
}

#[test]
fn circle_period_two_continuum() {
    let orbits = find_pq_orbits(&circle_billiard(), 1, 2, 1e-10).unwrap();
    assert!(orbits.len() >= 2);
    for o in &orbits {
        assert!(circle_gap(o.points[0].x, o.points[1].x + 0.5) < 1e-9);
    }
}

#[test]
fn integrable_fixed_points_and_refinement() {
    let m = MapSpec::twist(0.25, -0.5);
    let orbits = find_pq_orbits(&m, 0, 1, 1e-10).unwrap();
    assert!(orbits.len() >= 2);
    assert!(orbits
        .iter()
        .all(|o| (o.points[0].y - 0.5).abs() < 1e-10 && o.well_ordered));

    let seed = pb_candidates(
        &m,
        0,
        1,
        LeafGrid {
            leaves: 10,
            samples: 8,
        },
    )
    .unwrap()
    .into_iter()
    .find(|c| (c.x - 0.25).abs() < 1e-12)
    .unwrap();
    let nudged = Candidate {
        x: 0.3,
        y: 0.5 + 1e-3,
        ..seed
    };
    let o = refine_orbit(&m, 0, 1, &nudged, 1e-10).unwrap();
    assert!(o.residual < 1e-10);
    assert!((o.points[0].y - 0.5).abs() < 1e-10 && (o.points[0].x - 0.3).abs() < 1e-3);
}

#[test]
fn found_orbits_are_disjoint_periodic_sets() {
    let cases = [
        (ellipse_billiard(), 1, 3),
        (ellipse_billiard(), 2, 5),
        (MapSpec::power(MapSpec::twist(0.05, 0.5), 2), 1, 2),
    ];
    for (m, p, q) in cases {
        let tol = 1e-9;
        let orbits = find_pq_orbits(&m, p, q, tol).unwrap();
        let g = MapSpec::compose(vec![MapSpec::power(m.clone(), q), MapSpec::deck(-p)]);
        for o in &orbits {
            assert_eq!(o.points.len(), q as usize);
            for z in o.lifted(&m).unwrap() {
                assert!(g.apply_lift(z).unwrap().dist(z) <= tol);
            }
        }
        for (i, a) in orbits.iter().enumerate() {
            for b in &orbits[i + 1..] {
                for za in &a.points {
                    assert!(b
                        .points
                        .iter()
                        .all(|zb| circle_gap(za.x, zb.x).hypot(za.y - zb.y) > 0.0));
                }
            }
        }
    }
}

#[test]
fn only_one_found_is_reported() {
    // a single fixed point on a coarse grid: the leaf through it is never sampled
    let m = MapSpec::twist(0.25, -0.5);
    let r = find_pq_orbits_on(
        &m,
        0,
        1,
        1e-10,
        LeafGrid {
            leaves: 1,
            samples: 4,
        },
    );
    match r {
        Err(TheoremError::OnlyOneFound { orbits }) => assert_eq!(orbits.len(), 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn well_ordered_examples() {
    let m = ellipse_billiard();
    let axis = find_pq_orbits(&m, 1, 2, 1e-10).unwrap().remove(0);
    assert!(well_ordered_check(&axis, &m).unwrap());
    let shared = OrbitRecord {
        points: vec![p(0.4, 0.2), p(0.4, 0.7)],
        type_pq: (1, 2),
        residual: 0.0,
        well_ordered: true,
    };
    assert!(!well_ordered_check(&shared, &m).unwrap());
    let fixed = OrbitRecord {
        points: vec![p(0.1, 0.5)],
        type_pq: (0, 1),
        residual: 0.0,
        well_ordered: false,
    };
    assert!(well_ordered_check(&fixed, &MapSpec::twist(0.25, -0.5)).unwrap());
}

fn interior_probes(seed: u64, n: usize) -> Vec<LiftedPoint> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| p(r.gen_range(-1.0..2.0), r.gen_range(0.0..1.0)))
        .collect()
}

#[test]
fn delta_boundary_normalisation() {
    let m = MapSpec::twist(0.25, -0.5);
    let v = FoliationRef::vertical();
    let base = p(0.0, 0.0);
    let on = |y: f64| (0..20).map(|i| p(i as f64 / 20.0, y)).collect::<Vec<_>>();
    assert!(delta_lift(&m, &v, base, &on(0.0))
        .unwrap()
        .iter()
        .all(|d| d.value.0 == -1));
    assert!(delta_lift(&m, &v, base, &on(1.0))
        .unwrap()
        .iter()
        .all(|d| d.value.0 == 1));
}

#[test]
fn delta_conjugation_identity() {
    let m = climbing();
    let v = FoliationRef::vertical();
    let pulled = v.preimage(&m);
    let base = p(0.0, 0.0);
    let probes = interior_probes(21, 200);
    let images: Vec<LiftedPoint> = probes.iter().map(|&z| m.apply_lift(z).unwrap()).collect();
    let lhs = delta_lift(&m, &v, base, &images).unwrap();
    let rhs = delta_lift(&m, &pulled, base, &probes).unwrap();
    for (a, b) in lhs.iter().zip(&rhs) {
        assert_eq!(a.value, b.value, "{:?} {:?}", a.z, b.z);
    }
}

#[test]
fn delta_is_a_lyapunov_function() {
    let v = FoliationRef::vertical();
    for (m, on_zero_set) in [(climbing(), 10), (MapSpec::twist(0.3, -0.7), 0)] {
        let mut probes = interior_probes(22, 200);
        for k in 0..on_zero_set {
            let x = k as f64 / on_zero_set as f64;
            probes.push(leaf_intersection_extremes(&m, x, 1e-9).unwrap().z0);
        }
        let images: Vec<LiftedPoint> = probes.iter().map(|&z| m.apply_lift(z).unwrap()).collect();
        let before = delta_lift(&m, &v, p(0.0, 0.0), &probes).unwrap();
        let after = delta_lift(&m, &v, p(0.0, 0.0), &images).unwrap();
        let mut even = 0;
        for (a, b) in before.iter().zip(&after) {
            assert!(b.value.0 >= a.value.0);
            if a.value.0 % 2 == 0 {
                assert!(b.value.0 > a.value.0);
                even += 1;
            }
        }
        assert!(even >= on_zero_set);
    }
}

#[test]
fn extremes_examples() {
    let e = leaf_intersection_extremes(&MapSpec::twist(0.0, 1.0), 0.4, 1e-9).unwrap();
    assert_eq!(e.z0, e.z1);
    assert_eq!(e.tau_check, None);

    let m = folding();
    let mut separated = 0;
    for k in 0..16 {
        let e = leaf_intersection_extremes(&m, k as f64 / 16.0, 1e-9).unwrap();
        if let Some(t) = e.tau_check {
            assert_eq!(t, 0, "{e:?}");
            assert!(e.intersections >= 2);
            separated += 1;

            let coarse = leaf_intersection_extremes(&m, e.x, 2.0).unwrap();
            assert_eq!(coarse.z0, coarse.z1);
            assert_eq!(coarse.tau_check, None);
        }
    }
    assert!(separated > 0);
}

#[test]
fn graph_scan_examples() {
    let opts = GraphScanOptions::default();
    for m in [MapSpec::twist(0.0, 1.0), circle_billiard()] {
        let scan = invariant_graph_scan(&m, &opts).unwrap();
        assert_eq!(scan.graphs.len(), opts.y_grid, "{:?}", scan.rejected);
        for g in &scan.graphs {
            assert!(g.lipschitz_estimate < 1e-9);
            assert!(g.samples.iter().all(|&y| (y - g.seed).abs() < 1e-9));
            assert_eq!(g.transverse_to.len(), 3);
        }
    }
    let scan = invariant_graph_scan(&kicked_twist(0.9), &opts).unwrap();
    assert!(scan.graphs.len() < opts.y_grid);
    assert!(scan.exploratory);
}

#[test]
fn connect_examples() {
    let r = mather_connect_search(&MapSpec::twist(0.0, 1.0), 0.1, 100_000).unwrap();
    match &r.status {
        ConnectStatus::Blocked { graph } => {
            assert!(graph.samples.iter().all(|&y| (y - 0.5).abs() < 1e-12))
        }
        s => panic!("{s:?}"),
    }
    let m = kicked_twist(0.9);
    let r = mather_connect_search(&m, 0.05, 1_000_000).unwrap();
    assert!(!r.conflict);
    assert!(!matches!(r.status, ConnectStatus::Blocked { .. }));
    if let ConnectStatus::Connected { segment } = &r.status {
        assert!(segment[0].y < 0.05 && segment[segment.len() - 1].y > 0.95);
        for w in segment.windows(2) {
            assert_eq!(m.apply_lift(w[0]).unwrap(), w[1]);
        }
    }
    let r = mather_connect_search(&m, 0.05, 0).unwrap();
    assert_eq!(r.status, ConnectStatus::Inconclusive);
}

fn twist_foliations(f: &MapSpec) -> Vec<FoliationRef> {
    let v = FoliationRef::vertical();
    let inv = MapSpec::inverse(f.clone());
    vec![
        v.clone(),
        v.image(f),
        v.image(&MapSpec::power(f.clone(), 2)),
        v.preimage(f),
        v.image(&MapSpec::power(inv, 3)),
    ]
}

#[test]
fn invariant_lower_annulus_bounds() {
    let f = MapSpec::twist(0.2, -1.0);
    let mut r = rng(31);
    for fol in twist_foliations(&f) {
        for c in [0.2, 0.5, 0.8] {
            let u = RegionSpec::sub_annulus(0.0, c);
            let d = PairDomain::for_region(u).unwrap();
            for _ in 0..20 {
                let z = p(r.gen_range(-1.0..2.0), r.gen_range(0.0..c));
                let w = p(r.gen_range(-1.0..2.0), r.gen_range(c..=1.0));
                let t = natural_lift(&d, z, w, &fol).unwrap().0;
                assert!(-2 < t && t < 2, "{t} at {z:?} {w:?}");
            }
        }
    }
}

#[test]
fn separated_invariant_annuli() {
    let f = MapSpec::twist(0.2, -1.0);
    let mut r = rng(32);
    for fol in twist_foliations(&f) {
        let (a, b) = (0.3, 0.6);
        let lower = PairDomain::for_region(RegionSpec::sub_annulus(0.0, b)).unwrap();
        let upper = PairDomain::for_region(RegionSpec::sub_annulus(a, 1.0)).unwrap();
        for _ in 0..20 {
            let z0 = p(r.gen_range(-1.0..2.0), r.gen_range(0.0..=a));
            let z1 = p(r.gen_range(-1.0..2.0), r.gen_range(b..=1.0));
            let t0 = natural_lift(&lower, z0, z1, &fol).unwrap().0;
            let t1 = natural_lift(&upper, z1, z0, &fol).unwrap().0;
            assert_eq!(t0, t1 - 2);
            assert!(-2 < t0 && t0 < 2);
            assert_ne!(
                angle_class(z0, z1, &fol, SAME_LEAF_TOL).unwrap(),
                AngleClass::Two
            );
        }
    }
}
