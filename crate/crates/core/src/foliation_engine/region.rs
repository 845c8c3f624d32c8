use super::continuation::Pair;
use super::domain::region_lift;
use super::{FoliationError, FoliationRef};
use crate::annulus_maps::LiftedPoint;
use serde::{Deserialize, Serialize};

/// Number of nested regions in a default exhaustion.
pub const DEFAULT_EXHAUSTION_LEVELS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Contains `C0`.
    Lower,
    /// Contains `C1`.
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RegionKind {
    /// `T x [0, y_high)` when `y_low = 0`, `T x (y_low, 1]` when `y_high = 1`.
    SubAnnulus { y_low: f64, y_high: f64 },
    /// `{y < psi(x)}` (lower) or `{y > psi(x)}` (upper), with `psi` the
    /// periodic piecewise-linear interpolation of `samples` at `x = i / n`.
    GraphRegion { side: Side, samples: Vec<f64> },
}

/// An open region adjacent to one boundary circle, with an optional nested
/// sequence of regular regions exhausting it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    #[serde(default)]
    pub regular_exhaustion: Vec<RegionSpec>,
}

impl RegionSpec {
    pub fn sub_annulus(y_low: f64, y_high: f64) -> Self {
        RegionSpec {
            kind: RegionKind::SubAnnulus { y_low, y_high },
            regular_exhaustion: Vec::new(),
        }
    }

    pub fn graph(side: Side, samples: Vec<f64>) -> Self {
        RegionSpec {
            kind: RegionKind::GraphRegion { side, samples },
            regular_exhaustion: Vec::new(),
        }
    }

    pub fn side(&self) -> Result<Side, FoliationError> {
        match &self.kind {
            RegionKind::SubAnnulus { y_low, y_high } => {
                let ok = |v: f64| (0.0..=1.0).contains(&v);
                if !ok(*y_low) || !ok(*y_high) || y_low >= y_high {
                    Err(invalid(
                        "sub-annulus bounds must satisfy 0 <= y_low < y_high <= 1",
                    ))
                } else if *y_low == 0.0 && *y_high < 1.0 {
                    Ok(Side::Lower)
                } else if *y_high == 1.0 && *y_low > 0.0 {
                    Ok(Side::Upper)
                } else {
                    Err(invalid(
                        "sub-annulus must touch exactly one boundary circle",
                    ))
                }
            }
            RegionKind::GraphRegion { side, samples } => {
                if samples.is_empty() || samples.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    Err(invalid("graph samples must be non-empty and in [0, 1]"))
                } else {
                    Ok(*side)
                }
            }
        }
    }

    /// Height of the frontier above `x`.
    pub fn frontier(&self, x: f64) -> f64 {
        match &self.kind {
            RegionKind::SubAnnulus { y_low, y_high } => {
                if *y_low == 0.0 {
                    *y_high
                } else {
                    *y_low
                }
            }
            RegionKind::GraphRegion { samples, .. } => {
                let n = samples.len();
                let u = x.rem_euclid(1.0) * n as f64;
                let i = (u.floor() as usize).min(n - 1);
                let t = u - i as f64;
                samples[i] + t * (samples[(i + 1) % n] - samples[i])
            }
        }
    }

    pub fn contains(&self, z: LiftedPoint) -> bool {
        let g = self.frontier(z.x);
        match self.side() {
            Ok(Side::Lower) => z.y < g,
            Ok(Side::Upper) => z.y > g,
            Err(_) => false,
        }
    }

    /// True when the region meets its boundary circle in an interval only.
    pub fn is_disk(&self) -> Result<bool, FoliationError> {
        let side = self.side()?;
        Ok(match &self.kind {
            RegionKind::SubAnnulus { .. } => false,
            RegionKind::GraphRegion { samples, .. } => match side {
                Side::Lower => {
                    if samples.iter().all(|&v| v == 0.0) {
                        return Err(invalid("empty region"));
                    }
                    samples.contains(&0.0)
                }
                Side::Upper => {
                    if samples.iter().all(|&v| v == 1.0) {
                        return Err(invalid("empty region"));
                    }
                    samples.contains(&1.0)
                }
            },
        })
    }

    /// Adds `levels` nested regions whose frontiers move toward this one,
    /// `psi_n = psi (1 - 2^-(n+1))` for lower regions and symmetrically for
    /// upper ones.
    pub fn with_exhaustion(mut self, levels: usize) -> Result<Self, FoliationError> {
        let side = self.side()?;
        let n = match &self.kind {
            RegionKind::SubAnnulus { .. } => 1,
            RegionKind::GraphRegion { samples, .. } => samples.len(),
        };
        let base: Vec<f64> = (0..n).map(|i| self.frontier(i as f64 / n as f64)).collect();
        self.regular_exhaustion = (0..levels)
            .map(|k| {
                let shrink = 1.0 - 0.5f64.powi(k as i32 + 1);
                let samples = base
                    .iter()
                    .map(|&g| match side {
                        Side::Lower => g * shrink,
                        Side::Upper => 1.0 - (1.0 - g) * shrink,
                    })
                    .collect();
                RegionSpec::graph(side, samples)
            })
            .collect();
        Ok(self)
    }

    /// The first exhaustion level containing `z`, or the region itself when
    /// no exhaustion is attached.
    pub(crate) fn level_containing(&self, z: LiftedPoint) -> Result<&RegionSpec, FoliationError> {
        if !self.contains(z) {
            return Err(FoliationError::PairOutsideDomain(
                "z lies outside the region".into(),
            ));
        }
        if self.regular_exhaustion.is_empty() {
            return Ok(self);
        }
        self.regular_exhaustion
            .iter()
            .find(|u| u.contains(z))
            .ok_or_else(|| {
                FoliationError::PairOutsideDomain("z lies outside every exhaustion level".into())
            })
    }
}

fn invalid(msg: &str) -> FoliationError {
    FoliationError::PairOutsideDomain(msg.to_string())
}

/// Search resolution for [`membership_class`]: `columns` verticals per unit
/// of `x`, over `span` fundamental domains on each side of `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipGrid {
    pub columns: usize,
    pub span: usize,
}

impl Default for MembershipGrid {
    fn default() -> Self {
        MembershipGrid {
            columns: 32,
            span: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    /// No pair with lift at least 2 at this resolution.
    None,
    Exactly2 {
        z: LiftedPoint,
        z_prime: LiftedPoint,
    },
    /// A pair with lift above 2, together with a pair with lift exactly 2.
    Above2 {
        z: LiftedPoint,
        z_prime: LiftedPoint,
        value: i64,
        exactly2: LiftedPoint,
    },
}

/// Looks for `z'` outside the region with natural lift `>= 2` for `(z, z')`,
/// scanning verticals of the complement from the far boundary circle down to
/// the frontier. Values change by at most one per accepted step, so a value
/// above 2 on a vertical is always preceded by a value of exactly 2 there.
pub fn membership_class(
    z: LiftedPoint,
    region: &RegionSpec,
    f: &FoliationRef,
    grid: MembershipGrid,
) -> Result<Membership, FoliationError> {
    if region.side()? != Side::Lower {
        return Err(invalid("membership search expects a lower region"));
    }
    if grid.columns == 0 {
        return Err(invalid("grid needs at least one column"));
    }
    let n = grid.columns * (2 * grid.span + 1);
    let x0 = z.x - grid.span as f64;
    let mut exactly2: Option<LiftedPoint> = None;
    for i in 0..n {
        let x = x0 + (i as f64 + 0.5) / grid.columns as f64;
        let foot = LiftedPoint::new(x, region.frontier(x));
        let mut first2: Option<LiftedPoint> = None;
        let mut above: Option<(LiftedPoint, i64)> = None;
        let observe = |s: f64, pair: Pair, v: i64| {
            if s <= 0.5 {
                return;
            }
            if v == 2 && first2.is_none() {
                first2 = Some(pair.1);
            }
            if v > 2 && above.is_none() {
                above = Some((pair.1, v));
            }
        };
        region_lift(region, z, foot, f, observe)?;
        if let Some((zp, value)) = above {
            let w = first2.ok_or(FoliationError::GridExhausted)?;
            return Ok(Membership::Above2 {
                z,
                z_prime: zp,
                value,
                exactly2: w,
            });
        }
        if exactly2.is_none() {
            exactly2 = first2;
        }
    }
    Ok(match exactly2 {
        Some(w) => Membership::Exactly2 { z, z_prime: w },
        None => Membership::None,
    })
}
