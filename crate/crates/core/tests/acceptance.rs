//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use annulus_core::annulus_maps::{ConvexCurve, LiftedPoint, MapSpec};
use annulus_core::digital_line::{
    interval_hull, lift_class_path, project, AngleClass, LiftedAngle,
};
use annulus_core::foliation_engine::*;
use annulus_core::theorems::*;
use common::*;
use rand::Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

/// A pair evaluated in one of the suites, kept for the oracle cross-check.
#[derive(Clone)]
struct Recorded {
    z: LiftedPoint,
    z_prime: LiftedPoint,
    f: FoliationRef,
    f_prime: FoliationRef,
    tau: i64,
}

#[derive(Default)]
struct Recorder(Vec<Recorded>);

impl Recorder {
    fn tau(
        &mut self,
        z: LiftedPoint,
        z_prime: LiftedPoint,
        f: &FoliationRef,
        f_prime: &FoliationRef,
    ) -> Result<i64, String> {
        let t =
            tau(z, z_prime, f, f_prime).map_err(|e| format!("tau at {z:?} {z_prime:?}: {e}"))?;
        self.0.push(Recorded {
            z,
            z_prime,
            f: f.clone(),
            f_prime: f_prime.clone(),
            tau: t,
        });
        Ok(t)
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("runtime {:.1} s exceeds {limit_s} s", elapsed.as_secs_f64())
    })
}

fn foliations() -> Vec<FoliationRef> {
    let v = FoliationRef::vertical();
    std::iter::once(v.clone())
        .chain(zoo().iter().map(|(_, m)| v.image(m)))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cases = 0usize;
    for len in 1..=8usize {
        for first in -1..=2i64 {
            let steps = len - 1;
            for code in 0..3usize.pow(steps as u32) {
                let mut seq = vec![first];
                let mut c = code;
                for _ in 0..steps {
                    seq.push(seq[seq.len() - 1] + (c % 3) as i64 - 1);
                    c /= 3;
                }
                let lifted: Vec<LiftedAngle> = seq.iter().map(|&k| LiftedAngle(k)).collect();
                let classes: Vec<AngleClass> = lifted.iter().map(|&k| project(k)).collect();
                let again = lift_class_path(&classes, lifted[0]).map_err(|e| e.to_string())?;
                check(again == lifted, || {
                    format!("lift does not invert projection on {seq:?}")
                })?;
                for shift in [-8, -4, 4, 8] {
                    let other = lift_class_path(&classes, LiftedAngle(first + shift))
                        .map_err(|e| e.to_string())?;
                    check(
                        other.iter().zip(&lifted).all(|(a, b)| a.0 - b.0 == shift),
                        || format!("lifts of {seq:?} differ by a non-constant"),
                    )?;
                }
                check(
                    lift_class_path(&classes, LiftedAngle(first + 1)).is_err(),
                    || format!("base mismatch accepted on {seq:?}"),
                )?;
                let (lo, hi) = interval_hull(&lifted);
                check((lo..=hi).all(|k| seq.contains(&k)), || {
                    format!("image of {seq:?} is not an interval")
                })?;
                cases += 1;
            }
        }
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("{cases} sequences"))
}

fn criterion_2(rec: &mut Recorder) -> Outcome {
    let start = Instant::now();
    let fs = foliations();
    let maps = zoo();
    let mut r = rng(2002);
    let n = 1000;
    for i in 0..n {
        let (a, b) = random_pair(&mut r);
        let (f, g, h) = (
            &fs[r.gen_range(0..fs.len())],
            &fs[r.gen_range(0..fs.len())],
            &fs[r.gen_range(0..fs.len())],
        );
        if i % 2 == 0 {
            let fg = rec.tau(a, b, f, g)?;
            check(fg == rec.tau(b, a, f, g)?, || {
                format!("symmetry fails at {a:?} {b:?}")
            })?;
            check(fg == -rec.tau(a, b, g, f)?, || {
                format!("antisymmetry fails at {a:?} {b:?}")
            })?;
            check(fg + rec.tau(a, b, g, h)? == rec.tau(a, b, f, h)?, || {
                format!("additivity fails at {a:?} {b:?}")
            })?;
        } else {
            let m = &maps[r.gen_range(0..maps.len())].1;
            let (ma, mb) = (m.apply_lift(a).unwrap(), m.apply_lift(b).unwrap());
            check(
                rec.tau(ma, mb, &f.image(m), &g.image(m))? == rec.tau(a, b, f, g)?,
                || format!("equivariance fails at {a:?} {b:?}"),
            )?;
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("{n} instances"))
}

fn record_report(rec: &mut Recorder, report: &MonotonicityReport, f: &FoliationRef, m: &MapSpec) {
    let pulled = f.preimage(m);
    for e in &report.evaluations {
        if let Some(t) = e.tau {
            rec.0.push(Recorded {
                z: e.pair.z,
                z_prime: e.pair.z_prime,
                f: f.clone(),
                f_prime: pulled.clone(),
                tau: t,
            });
        }
    }
}

fn criterion_3(rec: &mut Recorder) -> Outcome {
    let start = Instant::now();
    let v = FoliationRef::vertical();
    let sampler = PairSampler::new(3003, 150, 300, 50);
    for m in [MapSpec::twist(0.1, 1.0), MapSpec::billiard(ellipse())] {
        let report =
            is_monotone(&m, &v, Direction::Decreasing, &sampler).map_err(|e| e.to_string())?;
        record_report(rec, &report, &v, &m);
        check(report.samples >= 500, || {
            format!("only {} samples", report.samples)
        })?;
        check(report.direction == Direction::Decreasing, || {
            format!("{m:?}: {:?}", report.counterexamples.first())
        })?;
        let same: Vec<&PairEvaluation> = report
            .evaluations
            .iter()
            .filter(|e| e.pair.kind == PairKind::SameLeaf)
            .collect();
        check(same.len() >= 100, || {
            format!("only {} same-leaf pairs", same.len())
        })?;
        check(same.iter().all(|e| e.tau == Some(-1)), || {
            "same-leaf tau differs from -1".into()
        })?;
    }
    for d in [Direction::Increasing, Direction::Decreasing] {
        let report =
            is_monotone(&MapSpec::identity(), &v, d, &sampler).map_err(|e| e.to_string())?;
        check(report.direction == Direction::Neither, || {
            "identity reported monotone".into()
        })?;
    }
    within(start.elapsed(), 120.0)?;
    Ok("twist and ellipse billiard decreasing, identity neither".into())
}

fn criterion_4(rec: &mut Recorder) -> Outcome {
    let v = FoliationRef::vertical();
    let sampler = PairSampler::new(4004, 20, 20, 10);
    let maps: Vec<(MapSpec, Direction)> = vec![
        (MapSpec::twist(0.1, 1.0), Direction::Decreasing),
        (MapSpec::twist(0.3, -0.7), Direction::Increasing),
        (MapSpec::billiard(ellipse()), Direction::Decreasing),
        (
            MapSpec::billiard(ConvexCurve::circle()),
            Direction::Decreasing,
        ),
        (
            MapSpec::inverse(MapSpec::billiard(ellipse())),
            Direction::Increasing,
        ),
    ];
    let opposite = |d: Direction| match d {
        Direction::Increasing => Direction::Decreasing,
        _ => Direction::Increasing,
    };
    let h = MapSpec::kick(0.4, vec![0.2, 0.5]);
    let mut checks = 0;
    let mut expect =
        |rec: &mut Recorder, m: &MapSpec, f: &FoliationRef, d: Direction, what: &str| {
            let report = is_monotone(m, f, d, &sampler).map_err(|e| e.to_string())?;
            record_report(rec, &report, f, m);
            checks += 1;
            check(report.direction == d, || {
                format!(
                    "{what}: {:?}",
                    report
                        .counterexamples
                        .first()
                        .and_then(|e| e.violation.clone())
                )
            })
        };
    for (i, (m, d)) in maps.iter().enumerate() {
        let d = *d;
        expect(rec, m, &v, d, "base")?;
        expect(
            rec,
            &MapSpec::inverse(m.clone()),
            &v,
            opposite(d),
            "inverse",
        )?;
        let partner = maps
            .iter()
            .skip(i + 1)
            .chain(&maps[..i])
            .find(|(_, e)| *e == d)
            .unwrap();
        expect(
            rec,
            &MapSpec::compose(vec![m.clone(), partner.0.clone()]),
            &v,
            d,
            "composition",
        )?;
        let conj = MapSpec::compose(vec![MapSpec::inverse(h.clone()), m.clone(), h.clone()]);
        expect(rec, &conj, &v.image(&h), d, "conjugation")?;
        for k in [-1, 2] {
            expect(rec, m, &v.image(&MapSpec::power(m.clone(), k)), d, "power")?;
        }
    }
    Ok(format!("{checks} closure checks on 5 maps"))
}

fn axis_distance(s: f64) -> f64 {
    [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|a| (s.rem_euclid(1.0) - a).abs())
        .fold(f64::INFINITY, f64::min)
}

fn criterion_5(rec: &mut Recorder) -> Outcome {
    let v = FoliationRef::vertical();
    let start = Instant::now();
    let m = MapSpec::billiard(ellipse());
    let orbits = find_pq_orbits(&m, 1, 2, 1e-10).map_err(|e| e.to_string())?;
    within(start.elapsed(), 60.0)?;
    check(orbits.len() == 2, || {
        format!("{} period-2 orbits", orbits.len())
    })?;
    let curve = ellipse();
    let mut major = 0;
    for o in &orbits {
        let (s0, s1) = (o.points[0].x, o.points[1].x);
        let (a, b) = (curve.point(curve.phi_at(s0)), curve.point(curve.phi_at(s1)));
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = d[0].hypot(d[1]);
        for s in [s0, s1] {
            let t = curve.unit_tangent(curve.phi_at(s));
            let cos = (d[0] * t[0] + d[1] * t[1]) / len;
            check(cos.abs() < 1e-6, || {
                format!("chord not normal at s = {s}: cos {cos:.2e}")
            })?;
            check(axis_distance(s) < 1e-6, || {
                format!("orbit point s = {s} off the axes")
            })?;
        }
        if (len - 2.0).abs() < 1e-6 {
            major += 1;
        } else {
            check((len - 1.0).abs() < 1e-6, || format!("chord length {len}"))?;
        }
        for (z, w) in [(o.points[0], o.points[1]), (o.points[1], o.points[0])] {
            rec.tau(z, w, &v, &v.preimage(&m))?;
        }
    }
    check(major == 1, || {
        "expected one major and one minor axis".into()
    })?;

    let start = Instant::now();
    let c = MapSpec::billiard(ConvexCurve::circle());
    let triangles = find_pq_orbits(&c, 1, 3, 1e-8).map_err(|e| e.to_string())?;
    within(start.elapsed(), 60.0)?;
    for o in &triangles {
        check(o.residual <= 1e-8, || {
            format!("residual {:.2e}", o.residual)
        })?;
        let mut xs: Vec<f64> = o.points.iter().map(|z| z.x).collect();
        xs.sort_by(f64::total_cmp);
        let gaps = [xs[1] - xs[0], xs[2] - xs[1], xs[0] + 1.0 - xs[2]];
        check(gaps.iter().all(|g| (g - 1.0 / 3.0).abs() < 1e-8), || {
            format!("not equilateral: {xs:?}")
        })?;
    }
    let t = &triangles[0];
    rec.tau(t.points[0], t.points[1], &v, &v.preimage(&c))?;
    Ok(format!(
        "ellipse axes found; {} equilateral triangles",
        triangles.len()
    ))
}

fn criterion_6() -> Outcome {
    let n = 1000;
    let tol = 1.0 / n as f64;
    for (a, b) in [(0.0, 1.0), (0.25, -0.5), (0.1, 0.3), (-0.7, 2.0)] {
        let m = MapSpec::twist(a, b);
        for y in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let r =
                rotation_number_at(&m, LiftedPoint::new(0.3, y), n).map_err(|e| e.to_string())?;
            check(
                (r.value - (a + b * y)).abs() <= tol && r.half_width == tol,
                || format!("twist({a}, {b}) at y = {y}: {}", r.value),
            )?;
        }
    }
    for m in [
        MapSpec::billiard(ellipse()),
        MapSpec::billiard(ConvexCurve::circle()),
    ] {
        let t = twist_interval(&m, n).map_err(|e| e.to_string())?;
        check(t.rho0.abs() <= tol && (t.rho1 - 1.0).abs() <= tol, || {
            format!("{t:?}")
        })?;
    }
    let r = rotation_number_at(
        &MapSpec::billiard(ConvexCurve::circle()),
        LiftedPoint::new(0.0, 1.0 / 3.0),
        n,
    )
    .map_err(|e| e.to_string())?;
    check((r.value - 1.0 / 3.0).abs() <= tol, || {
        format!("circle at pi/3: {}", r.value)
    })?;
    Ok("integrable, billiard boundary and circle pi/3 within 1/n".into())
}

/// Transversality re-check through leaf coordinates: `xi` must increase
/// along the graph for the image and preimage foliations.
fn transverse(g: &GraphRecord, m: &MapSpec) -> Result<bool, String> {
    let v = FoliationRef::vertical();
    let n = 4 * g.samples.len();
    for fol in [v.image(m), v.preimage(m)] {
        let xi = (0..=n)
            .map(|k| {
                let x = k as f64 / n as f64;
                fol.leaf_coordinates(LiftedPoint::new(x, g.eval(x)))
                    .map(|c| c.0)
            })
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        if !xi.windows(2).all(|w| w[1] > w[0]) || (xi[n] - xi[0] - 1.0).abs() > 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn criterion_7() -> Outcome {
    let opts = GraphScanOptions::default();
    let mut certified = 0;
    for (name, m, must) in [
        ("twist", MapSpec::twist(0.0, 1.0), true),
        (
            "circle billiard",
            MapSpec::billiard(ConvexCurve::circle()),
            true,
        ),
        ("ellipse billiard", MapSpec::billiard(ellipse()), false),
    ] {
        let scan = invariant_graph_scan(&m, &opts).map_err(|e| e.to_string())?;
        if must {
            check(scan.graphs.len() == opts.y_grid, || {
                format!("{name}: {:?}", scan.rejected)
            })?;
        }
        let bound = 1.0 / scan.beta.tan() + 0.05;
        for g in &scan.graphs {
            check(g.lipschitz_estimate <= bound, || {
                format!("{name}: Lipschitz {} above {bound}", g.lipschitz_estimate)
            })?;
            check(transverse(g, &m)?, || {
                format!("{name}: graph at {} not transverse", g.seed)
            })?;
            certified += 1;
        }
    }
    Ok(format!("{certified} certified graphs re-checked"))
}

fn criterion_8() -> Outcome {
    let f = MapSpec::twist(0.2, -1.0);
    let v = FoliationRef::vertical();
    let inv = MapSpec::inverse(f.clone());
    let fols = [
        v.clone(),
        v.image(&f),
        v.image(&MapSpec::power(f.clone(), 2)),
        v.preimage(&f),
        v.image(&MapSpec::power(inv, 3)),
    ];
    let mut r = rng(8008);
    let err = |e: FoliationError| e.to_string();
    for i in 0..500 {
        let fol = &fols[i % fols.len()];
        let c = r.gen_range(0.05..0.95);
        let d = PairDomain::for_region(RegionSpec::sub_annulus(0.0, c)).map_err(err)?;
        let z = LiftedPoint::new(r.gen_range(-1.0..2.0), r.gen_range(0.0..c));
        let w = LiftedPoint::new(r.gen_range(-1.0..2.0), r.gen_range(c..=1.0));
        let t = natural_lift(&d, z, w, fol).map_err(err)?.0;
        check(-2 < t && t < 2, || {
            format!("lower annulus bound: {t} at {z:?} {w:?}")
        })?;
    }
    for i in 0..500 {
        let fol = &fols[i % fols.len()];
        let a = r.gen_range(0.05..0.6);
        let b = r.gen_range(a + 0.05..0.95);
        let lower = PairDomain::for_region(RegionSpec::sub_annulus(0.0, b)).map_err(err)?;
        let upper = PairDomain::for_region(RegionSpec::sub_annulus(a, 1.0)).map_err(err)?;
        let z0 = LiftedPoint::new(r.gen_range(-1.0..2.0), r.gen_range(0.0..=a));
        let z1 = LiftedPoint::new(r.gen_range(-1.0..2.0), r.gen_range(b..=1.0));
        let t0 = natural_lift(&lower, z0, z1, fol).map_err(err)?.0;
        let t1 = natural_lift(&upper, z1, z0, fol).map_err(err)?.0;
        check(t0 == t1 - 2 && -2 < t0 && t0 < 2, || {
            format!("gap bound: {t0}, {t1} at {z0:?} {z1:?}")
        })?;
        let class = angle_class(z0, z1, fol, SAME_LEAF_TOL).map_err(err)?;
        check(class != AngleClass::Two, || {
            format!("class 2 across the gap at {z0:?} {z1:?}")
        })?;
    }
    Ok("500 + 500 pairs".into())
}

fn criterion_9() -> Outcome {
    let m = climbing();
    let v = FoliationRef::vertical();
    let mut r = rng(9009);
    let mut probes: Vec<LiftedPoint> = (0..200)
        .map(|_| LiftedPoint::new(r.gen_range(-1.0..2.0), r.gen_range(0.0..1.0)))
        .collect();
    for k in 0..20 {
        let e = leaf_intersection_extremes(&m, k as f64 / 20.0, 1e-9).map_err(|e| e.to_string())?;
        probes.push(e.z0);
    }
    let images: Vec<LiftedPoint> = probes.iter().map(|&z| m.apply_lift(z).unwrap()).collect();
    let base = LiftedPoint::new(0.0, 0.0);
    let before = delta_lift(&m, &v, base, &probes).map_err(|e| e.to_string())?;
    let after = delta_lift(&m, &v, base, &images).map_err(|e| e.to_string())?;
    let mut strict = 0;
    for (a, b) in before.iter().zip(&after) {
        check(b.value.0 >= a.value.0, || {
            format!("delta decreases at {:?}", a.z)
        })?;
        if a.value.0 % 2 == 0 {
            check(b.value.0 > a.value.0, || {
                format!("no strict increase at {:?}", a.z)
            })?;
            strict += 1;
        }
    }
    check(strict >= 20, || {
        format!("only {strict} probes at even values")
    })?;
    Ok(format!("{} probes, {strict} at even values", probes.len()))
}

fn criterion_10(rec: &Recorder) -> Outcome {
    let mismatches: Vec<String> = rec
        .0
        .par_iter()
        .filter_map(|p| {
            let natural = tau_natural(p.z, p.z_prime, &p.f, &p.f_prime);
            let winding = tau_winding(p.z, p.z_prime, &p.f, &p.f_prime);
            match (natural, winding) {
                (Ok(a), Ok(b)) if a == b && a == p.tau => None,
                (a, b) => Some(format!(
                    "{:?} {:?} in {:?} / {:?}: natural {a:?}, winding {b:?}, suite {}",
                    p.z,
                    p.z_prime,
                    p.f.pushforward(),
                    p.f_prime.pushforward(),
                    p.tau
                )),
            }
        })
        .collect();
    check(mismatches.is_empty(), || {
        format!(
            "{} disagreements:\n{}",
            mismatches.len(),
            mismatches.join("\n")
        )
    })?;
    Ok(format!("{} pairs", rec.0.len()))
}

fn criterion_11() -> Outcome {
    let r = mather_connect_search(&MapSpec::twist(0.0, 1.0), 0.1, 100_000)
        .map_err(|e| e.to_string())?;
    check(matches!(r.status, ConnectStatus::Blocked { .. }), || {
        format!("integrable: {:?}", r.status)
    })?;
    let m = kicked_twist(0.9);
    let r = mather_connect_search(&m, 0.05, 1_000_000).map_err(|e| e.to_string())?;
    check(!r.conflict, || "blocked and connected at once".into())?;
    let outcome = match &r.status {
        ConnectStatus::Connected { segment } => {
            for w in segment.windows(2) {
                check(m.apply_lift(w[0]).unwrap() == w[1], || {
                    "segment does not replay".into()
                })?;
            }
            format!("connected in {} steps", segment.len() - 1)
        }
        ConnectStatus::Blocked { .. } => return Err("kicked map blocked".into()),
        ConnectStatus::Inconclusive => "inconclusive".into(),
    };
    Ok(format!("integrable blocked; kicked map {outcome}"))
}

fn main() {
    let mut rec = Recorder::default();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} ({secs:.1} s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why} ({secs:.1} s)");
            }
        }
    };
    report(1, "digital line", &mut criterion_1);
    report(2, "tau axioms", &mut || criterion_2(&mut rec));
    report(3, "monotonicity", &mut || criterion_3(&mut rec));
    report(4, "formal identities", &mut || criterion_4(&mut rec));
    report(5, "periodic orbits", &mut || criterion_5(&mut rec));
    report(6, "rotation numbers", &mut criterion_6);
    report(7, "invariant graphs", &mut criterion_7);
    report(8, "invariant annuli bounds", &mut criterion_8);
    report(9, "Lyapunov property", &mut criterion_9);
    report(10, "oracle cross-validation", &mut || criterion_10(&rec));
    report(11, "connecting orbits", &mut criterion_11);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
