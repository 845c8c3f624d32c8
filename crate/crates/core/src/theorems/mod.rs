//! Computational versions of the twist-map theorems: rotation numbers,
//! periodic orbits of type `(p, q)`, the Lyapunov function of the first
//! fixed-point argument, invariant graphs and connecting orbits.

mod delta;
mod extremes;
mod graphs;
mod mather;
mod orbits;
mod rotation;

pub use delta::{delta_lift, DeltaProbe, DeltaRoute};
pub use extremes::{leaf_intersection_extremes, LeafExtremes};
pub use graphs::{
    invariant_graph_scan, GraphDiagnostic, GraphMethod, GraphRecord, GraphScan, GraphScanOptions,
    Transversality,
};
pub use mather::{mather_connect_search, ConnectReport, ConnectStatus};
pub use orbits::{
    find_pq_orbits, find_pq_orbits_on, pb_candidates, refine_orbit, twist_orientation,
    well_ordered_check, BranchLabel, Candidate, LeafGrid, OrbitRecord, TwistOrientation,
};
pub use rotation::{
    rotation_number, rotation_number_at, twist_interval, Circle, RotationEstimate, TwistInterval,
};

use crate::annulus_maps::MapError;
use crate::digital_line::AngleClass;
use crate::foliation_engine::FoliationError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoremError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error("boundary twist condition fails on {circle:?}: displacement class {class}")]
    TwistConditionFailed { circle: Circle, class: AngleClass },
    #[error("boundary twist condition fails on {circle:?}: point is fixed")]
    BoundaryFixed { circle: Circle },
    #[error("found {} distinct orbit(s), expected at least two", orbits.len())]
    OnlyOneFound { orbits: Vec<OrbitRecord> },
    #[error("bracket lost near ({x}, {y})")]
    BracketLost { x: f64, y: f64 },
    #[error("continuation passes within tolerance of a fixed point near ({x}, {y})")]
    FixedPointOnPath { x: f64, y: f64 },
    #[error("no intersection of the leaf at x = {x} with its preimage")]
    NoIntersectionFound { x: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
