//! The digital (Khalimsky) line and its four-point quotient.
//!
//! Integers carry the Khalimsky topology: odd points are open, even points
//! are closed, and `k` is adjacent to `k - 1` and `k + 1`. The quotient
//! `Z/4Z` inherits a non-Hausdorff topology whose two odd classes are open
//! singletons. The projection `Z -> Z/4Z` is a covering map, so class paths
//! lift uniquely once a base value is fixed.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use thiserror::Error;

/// Default half-width, in radians, of the rays that map to even values.
pub const DEFAULT_RAY_TOL: f64 = 1e-9;

/// An element of `Z/4Z`, stored by its representative in `{-1, 0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum AngleClass {
    MinusOne,
    Zero,
    One,
    Two,
}

impl AngleClass {
    pub const ALL: [AngleClass; 4] = [
        AngleClass::MinusOne,
        AngleClass::Zero,
        AngleClass::One,
        AngleClass::Two,
    ];

    /// Canonical representative in `{-1, 0, 1, 2}`.
    pub fn representative(self) -> i64 {
        match self {
            AngleClass::MinusOne => -1,
            AngleClass::Zero => 0,
            AngleClass::One => 1,
            AngleClass::Two => 2,
        }
    }

    /// Closed points of the quotient (the two even classes).
    pub fn is_even(self) -> bool {
        matches!(self, AngleClass::Zero | AngleClass::Two)
    }

    /// Class of the swapped pair: adding `2` modulo 4.
    pub fn opposite(self) -> AngleClass {
        project(LiftedAngle(self.representative() + 2))
    }
}

impl TryFrom<i64> for AngleClass {
    type Error = String;
    fn try_from(v: i64) -> Result<Self, String> {
        match v {
            -1 | 3 => Ok(AngleClass::MinusOne),
            0 => Ok(AngleClass::Zero),
            1 => Ok(AngleClass::One),
            2 => Ok(AngleClass::Two),
            _ => Err(format!("{v} is not a representative of Z/4Z")),
        }
    }
}

impl From<AngleClass> for i64 {
    fn from(c: AngleClass) -> i64 {
        c.representative()
    }
}

impl fmt::Display for AngleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AngleClass::MinusOne => "-1\u{307}",
            AngleClass::Zero => "0\u{307}",
            AngleClass::One => "1\u{307}",
            AngleClass::Two => "2\u{307}",
        };
        f.write_str(s)
    }
}

/// A point of the digital line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LiftedAngle(pub i64);

impl LiftedAngle {
    pub fn value(self) -> i64 {
        self.0
    }

    /// Even points are closed, odd points are open.
    pub fn is_closed_point(self) -> bool {
        self.0.rem_euclid(2) == 0
    }
}

impl fmt::Display for LiftedAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigitalLineError {
    #[error("classes {from} and {to} at step {index} are neither equal nor adjacent")]
    NonAdjacentStep {
        index: usize,
        from: AngleClass,
        to: AngleClass,
    },
    #[error("base {base} does not project to the first class {first}")]
    BaseMismatch {
        base: LiftedAngle,
        first: AngleClass,
    },
}

/// The covering projection `k -> k + 4Z`.
pub fn project(k: LiftedAngle) -> AngleClass {
    match k.0.rem_euclid(4) {
        0 => AngleClass::Zero,
        1 => AngleClass::One,
        2 => AngleClass::Two,
        _ => AngleClass::MinusOne,
    }
}

/// True iff one class lies in every neighbourhood of the other, or they coincide.
pub fn is_adjacent(a: AngleClass, b: AngleClass) -> bool {
    a == b || a.is_even() != b.is_even()
}

/// Signed lift increment for an adjacent (or equal) step, `None` otherwise.
pub fn step_increment(from: AngleClass, to: AngleClass) -> Option<i64> {
    if !is_adjacent(from, to) {
        return None;
    }
    let d = (to.representative() - from.representative()).rem_euclid(4);
    Some(match d {
        0 => 0,
        1 => 1,
        3 => -1,
        _ => unreachable!("adjacent classes differ by at most one"),
    })
}

/// Lifts a sampled class path starting from `base`.
pub fn lift_class_path(
    path: &[AngleClass],
    base: LiftedAngle,
) -> Result<Vec<LiftedAngle>, DigitalLineError> {
    let Some(&first) = path.first() else {
        return Ok(Vec::new());
    };
    if project(base) != first {
        return Err(DigitalLineError::BaseMismatch { base, first });
    }
    let mut out = Vec::with_capacity(path.len());
    out.push(base);
    let mut current = base.0;
    for (i, w) in path.windows(2).enumerate() {
        let inc = step_increment(w[0], w[1]).ok_or(DigitalLineError::NonAdjacentStep {
            index: i + 1,
            from: w[0],
            to: w[1],
        })?;
        current += inc;
        out.push(LiftedAngle(current));
    }
    Ok(out)
}

/// Smallest integer interval containing the values.
///
/// # Panics
/// Panics if `values` is empty.
pub fn interval_hull(values: &[LiftedAngle]) -> (i64, i64) {
    assert!(!values.is_empty(), "interval_hull of an empty sequence");
    let min = values.iter().map(|v| v.0).min().unwrap();
    let max = values.iter().map(|v| v.0).max().unwrap();
    (min, max)
}

/// Digital value of a continuous angle.
///
/// The upward ray (angle `pi/2`) is `0`; each half-turn counter-clockwise adds
/// two. Angles within `tol` of a ray `pi/2 + k*pi` give the closed point `2k`,
/// open half-planes between rays give the odd value in between.
pub fn discretize_winding(psi: f64, tol: f64) -> LiftedAngle {
    debug_assert!(tol > 0.0);
    let u = (psi - FRAC_PI_2) / PI;
    let k = u.round();
    if (psi - (FRAC_PI_2 + k * PI)).abs() <= tol {
        LiftedAngle(2 * k as i64)
    } else {
        LiftedAngle(2 * u.floor() as i64 + 1)
    }
}
