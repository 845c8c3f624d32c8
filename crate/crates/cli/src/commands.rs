use crate::config::{
    AngleParams, ExperimentConfig, FieldGrid, FindOrbitsParams, MonotoneParams, Parameters,
    RotationParams, SweepParams, TauMethod, TauParams,
};
use annulus_core::annulus_maps::{LiftedPoint, MapError, MapSpec};
use annulus_core::digital_line::AngleClass;
use annulus_core::foliation_engine::{
    angle_class, is_monotone, tau, tau_natural, tau_winding, FoliationError, FoliationRef,
    MonotonicityReport, PairSampler,
};
use annulus_core::theorems::{
    find_pq_orbits_on, invariant_graph_scan, leaf_intersection_extremes, mather_connect_search,
    rotation_number, rotation_number_at, twist_interval, twist_orientation, ConnectReport,
    GraphScan, LeafExtremes, OrbitRecord, RotationEstimate, TheoremError, TwistInterval,
    TwistOrientation,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_REFINEMENT: i32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub report: ErrorReport,
}

impl Failure {
    fn new(code: i32, kind: &str, message: String) -> Self {
        Failure {
            code,
            report: ErrorReport {
                kind: kind.into(),
                message,
                detail: None,
            },
        }
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        let (code, kind) = match e {
            MapError::InversionFailure { .. } => (EXIT_REFINEMENT, "InversionFailure"),
            MapError::NonInjectiveSample { .. } => (EXIT_REFINEMENT, "NonInjectiveSample"),
            MapError::InvalidSpec(_) => (EXIT_PRECONDITION, "InvalidSpec"),
            MapError::NotConvex { .. } => (EXIT_PRECONDITION, "NotConvex"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<FoliationError> for Failure {
    fn from(e: FoliationError) -> Self {
        let (code, kind) = match e {
            FoliationError::Map(m) => return m.into(),
            FoliationError::CoincidentPoints => (EXIT_PRECONDITION, "CoincidentPoints"),
            FoliationError::PairOutsideDomain(_) => (EXIT_PRECONDITION, "PairOutsideDomain"),
            FoliationError::InvalidRequest(_) => (EXIT_PRECONDITION, "InvalidRequest"),
            FoliationError::VanishingDifference { .. } => (EXIT_REFINEMENT, "VanishingDifference"),
            FoliationError::PathRefinementExhausted { .. } => {
                (EXIT_REFINEMENT, "PathRefinementExhausted")
            }
            FoliationError::GridExhausted => (EXIT_REFINEMENT, "GridExhausted"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<TheoremError> for Failure {
    fn from(e: TheoremError) -> Self {
        let message = e.to_string();
        let (code, kind) = match e {
            TheoremError::Map(m) => return m.into(),
            TheoremError::Foliation(f) => return f.into(),
            TheoremError::TwistConditionFailed { .. } => {
                (EXIT_PRECONDITION, "TwistConditionFailed")
            }
            TheoremError::BoundaryFixed { .. } => (EXIT_PRECONDITION, "BoundaryFixed"),
            TheoremError::FixedPointOnPath { .. } => (EXIT_PRECONDITION, "FixedPointOnPath"),
            TheoremError::NoIntersectionFound { .. } => (EXIT_PRECONDITION, "NoIntersectionFound"),
            TheoremError::InvalidInput(_) => (EXIT_PRECONDITION, "InvalidInput"),
            TheoremError::BracketLost { .. } => (EXIT_REFINEMENT, "BracketLost"),
            TheoremError::OnlyOneFound { orbits } => {
                let mut f = Failure::new(EXIT_REFINEMENT, "OnlyOneFound", message);
                f.report.detail = Some(serde_json::json!({ "orbits": orbits }));
                return f;
            }
        };
        Failure::new(code, kind, message)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleOutput {
    pub class: AngleClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauValue {
    pub z: LiftedPoint,
    pub z_prime: LiftedPoint,
    pub tau: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldEntry {
    pub i: usize,
    pub j: usize,
    pub z: LiftedPoint,
    pub z_prime: LiftedPoint,
    pub same_leaf: bool,
    pub tau: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauOutput {
    pub f: MapSpec,
    pub f_prime: MapSpec,
    pub values: Vec<TauValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<FieldEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RotationOutput {
    Estimate(RotationEstimate),
    Interval(TwistInterval),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitsOutput {
    pub orientation: TwistOrientation,
    pub orbits: Vec<OrbitRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremesOutput {
    pub leaves: Vec<LeafExtremes>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub values: BTreeMap<String, Value>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub cells: Vec<SweepCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Output {
    Angle(AngleOutput),
    Tau(TauOutput),
    Monotone(MonotonicityReport),
    Rotation(RotationOutput),
    FindOrbits(OrbitsOutput),
    GraphScan(GraphScan),
    Connect(ConnectReport),
    Extremes(ExtremesOutput),
    Sweep(SweepOutput),
}

pub fn run(config: &ExperimentConfig) -> Result<Output, Failure> {
    let m = &config.map;
    Ok(match &config.parameters {
        Parameters::Angle(p) => Output::Angle(angle(m, p)?),
        Parameters::Tau(p) => Output::Tau(tau_command(m, p)?),
        Parameters::Monotone(p) => Output::Monotone(monotone(m, p, config.seed)?),
        Parameters::Rotation(p) => Output::Rotation(rotation(m, p)?),
        Parameters::FindOrbits(p) => Output::FindOrbits(find_orbits(m, p)?),
        Parameters::GraphScan(opts) => Output::GraphScan(invariant_graph_scan(m, opts)?),
        Parameters::Connect(p) => Output::Connect(mather_connect_search(m, p.eps, p.budget)?),
        Parameters::Extremes(p) => {
            let xs: Vec<f64> = match p.x {
                Some(x) => vec![x],
                None => (0..p.leaves).map(|i| i as f64 / p.leaves as f64).collect(),
            };
            let leaves = xs
                .par_iter()
                .map(|&x| leaf_intersection_extremes(m, x, p.tol))
                .collect::<Result<_, _>>()?;
            Output::Extremes(ExtremesOutput { leaves })
        }
        Parameters::Sweep(p) => Output::Sweep(sweep(p)),
    })
}

fn angle(m: &MapSpec, p: &AngleParams) -> Result<AngleOutput, Failure> {
    let f = FoliationRef::new(m.clone());
    Ok(AngleOutput {
        class: angle_class(p.z, p.z_prime, &f, p.tol)?,
    })
}

fn tau_with(
    method: TauMethod,
    z: LiftedPoint,
    zp: LiftedPoint,
    f: &FoliationRef,
    g: &FoliationRef,
) -> Result<i64, FoliationError> {
    match method {
        TauMethod::Auto => tau(z, zp, f, g),
        TauMethod::Natural => tau_natural(z, zp, f, g),
        TauMethod::Winding => tau_winding(z, zp, f, g),
    }
}

fn tau_command(m: &MapSpec, p: &TauParams) -> Result<TauOutput, Failure> {
    let f = FoliationRef::new(p.f.clone().unwrap_or_else(MapSpec::identity));
    let g = match &p.f_prime {
        Some(s) => FoliationRef::new(s.clone()),
        None => f.preimage(m),
    };
    let values = p
        .pairs
        .iter()
        .map(|q| {
            Ok(TauValue {
                z: q.z,
                z_prime: q.z_prime,
                tau: tau_with(p.method, q.z, q.z_prime, &f, &g)?,
            })
        })
        .collect::<Result<_, Failure>>()?;
    let field = match p.field {
        Some(grid) => Some(tau_field(p.method, grid, &f, &g)?),
        None => None,
    };
    Ok(TauOutput {
        f: f.pushforward().clone(),
        f_prime: g.pushforward().clone(),
        values,
        field,
    })
}

fn tau_field(
    method: TauMethod,
    grid: FieldGrid,
    f: &FoliationRef,
    g: &FoliationRef,
) -> Result<Vec<FieldEntry>, Failure> {
    let points = (0..grid.leaves * grid.heights)
        .map(|k| {
            let xi = (k / grid.heights) as f64 / grid.leaves as f64;
            let eta = ((k % grid.heights) as f64 + 0.5) / grid.heights as f64;
            f.point_on_leaf(xi, eta)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = points.len();
    Ok((0..n * n)
        .into_par_iter()
        .filter(|k| k / n != k % n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let value = tau_with(method, points[i], points[j], f, g);
            FieldEntry {
                i,
                j,
                z: points[i],
                z_prime: points[j],
                same_leaf: i / grid.heights == j / grid.heights,
                tau: value.as_ref().ok().copied(),
                error: value.err().map(|e| e.to_string()),
            }
        })
        .collect())
}

fn monotone(m: &MapSpec, p: &MonotoneParams, seed: u64) -> Result<MonotonicityReport, Failure> {
    let f = FoliationRef::new(p.foliation.clone().unwrap_or_else(MapSpec::identity));
    let sampler = PairSampler::new(seed, p.same_leaf, p.cross_leaf, p.boundary);
    Ok(is_monotone(m, &f, p.direction, &sampler)?)
}

fn rotation(m: &MapSpec, p: &RotationParams) -> Result<RotationOutput, Failure> {
    Ok(match (p.circle, p.point) {
        (Some(c), _) => RotationOutput::Estimate(rotation_number(m, c, p.iterations)?),
        (None, Some(z)) => RotationOutput::Estimate(rotation_number_at(m, z, p.iterations)?),
        (None, None) => RotationOutput::Interval(twist_interval(m, p.iterations)?),
    })
}

fn find_orbits(m: &MapSpec, p: &FindOrbitsParams) -> Result<OrbitsOutput, Failure> {
    let orientation = twist_orientation(m, p.p, p.q)?;
    let orbits = find_pq_orbits_on(m, p.p, p.q, p.tol, p.grid)?;
    Ok(OrbitsOutput {
        orientation,
        orbits,
    })
}

fn sweep(p: &SweepParams) -> SweepOutput {
    let cells = p
        .cells
        .par_iter()
        .map(|cell| {
            let (exit_code, output, error) = match run(&cell.config) {
                Ok(o) => (0, Some(o), None),
                Err(f) => (f.code, None, Some(f.report)),
            };
            SweepCell {
                values: cell.values.clone(),
                exit_code,
                output,
                error,
            }
        })
        .collect();
    SweepOutput { cells }
}
