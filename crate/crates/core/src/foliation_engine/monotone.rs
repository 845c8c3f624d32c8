use super::{angle_class, tau, FoliationError, FoliationRef, SAME_LEAF_TOL};
use crate::annulus_maps::{LiftedPoint, MapSpec};
use crate::digital_line::AngleClass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    SameLeaf,
    CrossLeaf,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledPair {
    pub z: LiftedPoint,
    pub z_prime: LiftedPoint,
    pub kind: PairKind,
}

/// Seeded pair sampler. Same-leaf pairs lie on a common leaf of the
/// foliation under test, cross-leaf pairs on leaves up to 1.5 apart, and
/// boundary pairs have `z` on a boundary circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSampler {
    pub seed: u64,
    pub same_leaf: usize,
    pub cross_leaf: usize,
    pub boundary: usize,
}

impl PairSampler {
    pub fn new(seed: u64, same_leaf: usize, cross_leaf: usize, boundary: usize) -> Self {
        PairSampler {
            seed,
            same_leaf,
            cross_leaf,
            boundary,
        }
    }

    pub fn total(&self) -> usize {
        self.same_leaf + self.cross_leaf + self.boundary
    }

    pub fn sample(&self, f: &FoliationRef) -> Result<Vec<SampledPair>, FoliationError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.total());
        for _ in 0..self.same_leaf {
            let xi = rng.gen::<f64>();
            let a: f64 = rng.gen_range(0.02..0.98);
            let mut b = rng.gen_range(0.02..0.98);
            while (a - b).abs() < 0.02 {
                b = rng.gen_range(0.02..0.98);
            }
            out.push(SampledPair {
                z: f.point_on_leaf(xi, a)?,
                z_prime: f.point_on_leaf(xi, b)?,
                kind: PairKind::SameLeaf,
            });
        }
        for _ in 0..self.cross_leaf {
            let xi = rng.gen::<f64>();
            let gap = rng.gen_range(0.01..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            out.push(SampledPair {
                z: f.point_on_leaf(xi, rng.gen())?,
                z_prime: f.point_on_leaf(xi + gap, rng.gen())?,
                kind: PairKind::CrossLeaf,
            });
        }
        for _ in 0..self.boundary {
            let z = LiftedPoint::new(rng.gen(), if rng.gen_bool(0.5) { 0.0 } else { 1.0 });
            let y_prime = match rng.gen_range(0..3) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen(),
            };
            let mut z_prime = LiftedPoint::new(z.x + rng.gen_range(-1.5..1.5), y_prime);
            if z_prime.dist(z) < 1e-3 {
                z_prime = z_prime.translate(1);
            }
            out.push(SampledPair {
                z,
                z_prime,
                kind: PairKind::Boundary,
            });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEvaluation {
    pub pair: SampledPair,
    /// `tau(z, z', F, m^{-1}(F))`, absent when it could not be computed.
    pub tau: Option<i64>,
    pub class_f: Option<AngleClass>,
    pub class_pullback: Option<AngleClass>,
    /// Why the pair violates the requested direction, if it does.
    pub violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub requested: Direction,
    /// `requested` when no sampled pair violates it, `neither` otherwise.
    pub direction: Direction,
    pub samples: usize,
    pub counterexamples: Vec<PairEvaluation>,
    pub evaluations: Vec<PairEvaluation>,
}

/// Checks on sampled pairs whether `m` is `F`-increasing or `F`-decreasing:
/// `tau(z, z', F, m^{-1}(F))` has the requested sign, and vanishes only when
/// both classes are equal and in `{-1, 1}`. Pairs whose `tau` cannot be
/// computed count as counterexamples.
pub fn is_monotone(
    m: &MapSpec,
    f: &FoliationRef,
    direction: Direction,
    sampler: &PairSampler,
) -> Result<MonotonicityReport, FoliationError> {
    let sign = match direction {
        Direction::Increasing => 1,
        Direction::Decreasing => -1,
        Direction::Neither => {
            return Err(FoliationError::InvalidRequest(
                "requested direction must be increasing or decreasing".into(),
            ))
        }
    };
    m.validate()?;
    let pulled = f.preimage(m);
    let pairs = sampler.sample(f)?;
    let evaluations: Vec<PairEvaluation> = pairs
        .par_iter()
        .map(|&pair| evaluate(pair, f, &pulled, sign))
        .collect();
    let counterexamples: Vec<PairEvaluation> = evaluations
        .iter()
        .filter(|e| e.violation.is_some())
        .cloned()
        .collect();
    Ok(MonotonicityReport {
        requested: direction,
        direction: if counterexamples.is_empty() {
            direction
        } else {
            Direction::Neither
        },
        samples: evaluations.len(),
        counterexamples,
        evaluations,
    })
}

fn evaluate(
    pair: SampledPair,
    f: &FoliationRef,
    pulled: &FoliationRef,
    sign: i64,
) -> PairEvaluation {
    let (z, zp) = (pair.z, pair.z_prime);
    let class_f = angle_class(z, zp, f, SAME_LEAF_TOL);
    let class_pullback = angle_class(z, zp, pulled, SAME_LEAF_TOL);
    let t = tau(z, zp, f, pulled);
    let violation = match (&t, &class_f, &class_pullback) {
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Some(format!("evaluation failed: {e}")),
        (Ok(t), Ok(a), Ok(b)) => {
            if t * sign < 0 {
                Some(format!("tau = {t} has the wrong sign"))
            } else if *t == 0 && !(a == b && !a.is_even()) {
                Some(format!("tau = 0 with classes {a} and {b}"))
            } else {
                None
            }
        }
    };
    PairEvaluation {
        pair,
        tau: t.ok(),
        class_f: class_f.ok(),
        class_pullback: class_pullback.ok(),
        violation,
    }
}
