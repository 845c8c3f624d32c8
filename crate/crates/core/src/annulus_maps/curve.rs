//! Strictly convex billiard tables with a precomputed arclength table.

use super::MapError;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

const TABLE_INTERVALS: usize = 1024;
const CONVEXITY_SAMPLES: usize = 4096;
/// Number of steps in the deformation from the circle to a table.
pub(crate) const DEFORMATION_KNOTS: usize = 32;

// 5-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Shape of a table boundary, parameterised counter-clockwise by `phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum CurveKind {
    /// `(a cos phi, b sin phi)`.
    Ellipse { a: f64, b: f64 },
    /// Polar curve `r(phi) = c0 + sum_k c_k cos(k phi)`.
    FourierBoundary { harmonics: Vec<f64> },
}

/// A strictly convex closed curve with its normalised arclength parameter.
///
/// Arclength is normalised so that the total length is 1; `s = 0` sits at
/// `phi = 0`. The table is shared, so clones are cheap.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "CurveKind", into = "CurveKind")]
pub struct ConvexCurve {
    kind: CurveKind,
    table: Arc<ArcTable>,
    deformation: Arc<OnceLock<Option<Vec<ConvexCurve>>>>,
}

#[derive(Debug)]
struct ArcTable {
    /// Cumulative length at `phi_i = TAU * i / TABLE_INTERVALS`, `i = 0..=N`.
    cumulative: Vec<f64>,
    length: f64,
}

impl std::fmt::Debug for ConvexCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.kind.fmt(f)
    }
}

impl PartialEq for ConvexCurve {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl TryFrom<CurveKind> for ConvexCurve {
    type Error = MapError;
    fn try_from(kind: CurveKind) -> Result<Self, MapError> {
        ConvexCurve::new(kind)
    }
}

impl From<ConvexCurve> for CurveKind {
    fn from(c: ConvexCurve) -> CurveKind {
        c.kind
    }
}

impl ConvexCurve {
    pub fn new(kind: CurveKind) -> Result<Self, MapError> {
        match &kind {
            CurveKind::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(MapError::InvalidSpec(format!(
                        "ellipse semi-axes must be positive, got ({a}, {b})"
                    )));
                }
            }
            CurveKind::FourierBoundary { harmonics } => {
                if harmonics.is_empty() || harmonics.iter().any(|c| !c.is_finite()) {
                    return Err(MapError::InvalidSpec(
                        "Fourier boundary needs finite harmonics".into(),
                    ));
                }
            }
        }
        let mut curve = ConvexCurve {
            kind,
            table: Arc::new(ArcTable {
                cumulative: Vec::new(),
                length: 0.0,
            }),
            deformation: Arc::new(OnceLock::new()),
        };
        curve.check_convex()?;
        curve.build_table();
        Ok(curve)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, MapError> {
        ConvexCurve::new(CurveKind::Ellipse { a, b })
    }

    pub fn circle() -> Self {
        ConvexCurve::new(CurveKind::Ellipse { a: 1.0, b: 1.0 }).expect("unit circle is convex")
    }

    /// Tables `C_k`, `k = 0..=DEFORMATION_KNOTS`, from the unit circle to
    /// this curve through convex curves with the same `phi = 0` point, or
    /// `None` when an intermediate curve fails the convexity check.
    pub(crate) fn deformation(&self) -> Option<&[ConvexCurve]> {
        self.deformation
            .get_or_init(|| {
                (0..=DEFORMATION_KNOTS)
                    .map(|k| {
                        let u = k as f64 / DEFORMATION_KNOTS as f64;
                        let kind = match &self.kind {
                            CurveKind::Ellipse { a, b } => CurveKind::Ellipse {
                                a: 1.0,
                                b: (b / a).powf(u),
                            },
                            CurveKind::FourierBoundary { harmonics } => {
                                CurveKind::FourierBoundary {
                                    harmonics: harmonics
                                        .iter()
                                        .enumerate()
                                        .map(|(i, c)| if i == 0 { *c } else { u * c })
                                        .collect(),
                                }
                            }
                        };
                        ConvexCurve::new(kind).ok()
                    })
                    .collect()
            })
            .as_deref()
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Total (unnormalised) length.
    pub fn length(&self) -> f64 {
        self.table.length
    }

    pub fn point(&self, phi: f64) -> [f64; 2] {
        match &self.kind {
            CurveKind::Ellipse { a, b } => [a * phi.cos(), b * phi.sin()],
            CurveKind::FourierBoundary { .. } => {
                let (r, _, _) = self.radius(phi);
                [r * phi.cos(), r * phi.sin()]
            }
        }
    }

    /// Derivative of [`point`](Self::point) with respect to `phi`.
    pub fn derivative(&self, phi: f64) -> [f64; 2] {
        match &self.kind {
            CurveKind::Ellipse { a, b } => [-a * phi.sin(), b * phi.cos()],
            CurveKind::FourierBoundary { .. } => {
                let (r, dr, _) = self.radius(phi);
                let (s, c) = phi.sin_cos();
                [dr * c - r * s, dr * s + r * c]
            }
        }
    }

    fn second_derivative(&self, phi: f64) -> [f64; 2] {
        match &self.kind {
            CurveKind::Ellipse { a, b } => [-a * phi.cos(), -b * phi.sin()],
            CurveKind::FourierBoundary { .. } => {
                let (r, dr, ddr) = self.radius(phi);
                let (s, c) = phi.sin_cos();
                [
                    ddr * c - 2.0 * dr * s - r * c,
                    ddr * s + 2.0 * dr * c - r * s,
                ]
            }
        }
    }

    fn radius(&self, phi: f64) -> (f64, f64, f64) {
        let CurveKind::FourierBoundary { harmonics } = &self.kind else {
            unreachable!("radius is only defined for polar boundaries")
        };
        let mut r = 0.0;
        let mut dr = 0.0;
        let mut ddr = 0.0;
        for (k, c) in harmonics.iter().enumerate() {
            let kf = k as f64;
            let (s, co) = (kf * phi).sin_cos();
            r += c * co;
            dr -= c * kf * s;
            ddr -= c * kf * kf * co;
        }
        (r, dr, ddr)
    }

    pub fn speed(&self, phi: f64) -> f64 {
        let d = self.derivative(phi);
        d[0].hypot(d[1])
    }

    /// Unit tangent in the counter-clockwise direction.
    pub fn unit_tangent(&self, phi: f64) -> [f64; 2] {
        let d = self.derivative(phi);
        let n = d[0].hypot(d[1]);
        [d[0] / n, d[1] / n]
    }

    pub fn curvature(&self, phi: f64) -> f64 {
        let d = self.derivative(phi);
        let dd = self.second_derivative(phi);
        (d[0] * dd[1] - d[1] * dd[0]) / (d[0].hypot(d[1])).powi(3)
    }

    fn check_convex(&self) -> Result<(), MapError> {
        if let CurveKind::FourierBoundary { .. } = self.kind {
            for i in 0..CONVEXITY_SAMPLES {
                let phi = TAU * i as f64 / CONVEXITY_SAMPLES as f64;
                if self.radius(phi).0 <= 0.0 {
                    return Err(MapError::NotConvex { phi });
                }
            }
        }
        for i in 0..CONVEXITY_SAMPLES {
            let phi = TAU * i as f64 / CONVEXITY_SAMPLES as f64;
            let k = self.curvature(phi);
            if k.is_nan() || k <= 0.0 {
                return Err(MapError::NotConvex { phi });
            }
        }
        Ok(())
    }

    fn gauss_length(&self, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        GL_NODES
            .iter()
            .zip(GL_WEIGHTS.iter())
            .map(|(x, w)| w * self.speed(mid + half * x))
            .sum::<f64>()
            * half
    }

    fn build_table(&mut self) {
        let h = TAU / TABLE_INTERVALS as f64;
        let mut cumulative = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..TABLE_INTERVALS {
            let lo = i as f64 * h;
            acc += self.gauss_length(lo, lo + h);
            cumulative.push(acc);
        }
        self.table = Arc::new(ArcTable {
            cumulative,
            length: acc,
        });
    }

    /// Arclength from `phi = 0` to `phi`, unwrapped (grows by the length per turn).
    pub fn arclength_at(&self, phi: f64) -> f64 {
        let turns = (phi / TAU).floor();
        let local = phi - turns * TAU;
        let h = TAU / TABLE_INTERVALS as f64;
        let i = ((local / h) as usize).min(TABLE_INTERVALS - 1);
        let lo = i as f64 * h;
        turns * self.table.length + self.table.cumulative[i] + self.gauss_length(lo, local)
    }

    /// Normalised arclength parameter, unwrapped.
    pub fn s_at(&self, phi: f64) -> f64 {
        self.arclength_at(phi) / self.table.length
    }

    /// Curve parameter `phi` for a normalised arclength `s`, unwrapped.
    pub fn phi_at(&self, s: f64) -> f64 {
        let turns = s.floor();
        let frac = s - turns;
        let target = frac * self.table.length;
        let cum = &self.table.cumulative;
        let i = match cum.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
            Ok(i) => i.min(TABLE_INTERVALS - 1),
            Err(i) => i.saturating_sub(1).min(TABLE_INTERVALS - 1),
        };
        let h = TAU / TABLE_INTERVALS as f64;
        let lo = i as f64 * h;
        let seg = cum[i + 1] - cum[i];
        let mut phi = lo + h * (target - cum[i]) / seg;
        for _ in 0..8 {
            let err = cum[i] + self.gauss_length(lo, phi) - target;
            let step = err / self.speed(phi);
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        turns * TAU + phi
    }
}
