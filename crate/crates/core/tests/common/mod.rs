#![allow(dead_code)]

use annulus_core::annulus_maps::{ConvexCurve, LiftedPoint, MapSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(x: f64, y: f64) -> LiftedPoint {
    LiftedPoint::new(x, y)
}

pub fn ellipse() -> ConvexCurve {
    ConvexCurve::ellipse(1.0, 0.5).unwrap()
}

/// Maps used across the property suites.
pub fn zoo() -> Vec<(&'static str, MapSpec)> {
    vec![
        ("twist", MapSpec::twist(0.1, 1.0)),
        ("twist_negative", MapSpec::twist(0.3, -0.7)),
        ("billiard_ellipse", MapSpec::billiard(ellipse())),
        ("billiard_circle", MapSpec::billiard(ConvexCurve::circle())),
        ("kick", MapSpec::kick(0.4, vec![0.2, 0.5])),
        (
            "twist_then_kick",
            MapSpec::compose(vec![
                MapSpec::twist(0.0, 1.0),
                MapSpec::kick(0.3, vec![0.0, 0.8]),
            ]),
        ),
        ("deck", MapSpec::deck(1)),
        (
            "twist_squared",
            MapSpec::power(MapSpec::twist(0.05, 0.5), 2),
        ),
        (
            "billiard_inverse",
            MapSpec::inverse(MapSpec::billiard(ellipse())),
        ),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point with `x` in `[-1, 2)` and `y` in `[0, 1]`, sometimes on a
/// boundary circle.
pub fn random_point(r: &mut ChaCha8Rng) -> LiftedPoint {
    let x = r.gen_range(-1.0..2.0);
    let y = match r.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => r.gen(),
    };
    p(x, y)
}

pub fn random_pair(r: &mut ChaCha8Rng) -> (LiftedPoint, LiftedPoint) {
    loop {
        let (a, b) = (random_point(r), random_point(r));
        if a.dist(b) > 1e-3 {
            return (a, b);
        }
    }
}

/// Pushes every interior point up and twists; increasing, with no interior
/// fixed points.
pub fn climbing() -> MapSpec {
    MapSpec::compose(vec![
        MapSpec::kick(0.5, vec![1.0]),
        MapSpec::twist(0.25, -0.5),
    ])
}

/// Twist, kick and untwist; images of verticals fold back and forth.
pub fn folding() -> MapSpec {
    MapSpec::compose(vec![
        MapSpec::twist(0.05, 1.0),
        MapSpec::kick(0.8, vec![0.0, 1.0]),
        MapSpec::twist(0.0, -1.0),
    ])
}

pub fn kicked_twist(eps: f64) -> MapSpec {
    MapSpec::compose(vec![
        MapSpec::twist(0.0, 1.0),
        MapSpec::kick(eps, vec![0.0, 1.0]),
    ])
}
