use crate::commands::Output;
use crate::config::Parameters;
use crate::ResultDocument;
use annulus_core::theorems::ConnectStatus;
use clap::ValueEnum;
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Orbit clouds: one file per periodic orbit, or the connecting segment.
    PhasePortrait,
    /// One file per certified invariant graph.
    GraphOverlay,
    /// `tau` on the pair grid.
    TauField,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::PhasePortrait => "phase-portrait",
            PlotKind::GraphOverlay => "graph-overlay",
            PlotKind::TauField => "tau-field",
        }
    }

    /// Whether a run with these parameters produces data for this kind.
    pub fn supports(self, params: &Parameters) -> bool {
        matches!(
            (self, params),
            (PlotKind::PhasePortrait, Parameters::FindOrbits(_))
                | (PlotKind::PhasePortrait, Parameters::Connect(_))
                | (PlotKind::GraphOverlay, Parameters::GraphScan(_))
        ) || matches!((self, params), (PlotKind::TauField, Parameters::Tau(p)) if p.field.is_some())
    }
}

#[derive(Debug)]
pub enum PlotError {
    UnsupportedKind { kind: PlotKind, command: String },
    Io(String),
}

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlotError::UnsupportedKind { kind, command } => {
                write!(
                    f,
                    "plot kind {} is not available for {command}",
                    kind.name()
                )
            }
            PlotError::Io(e) => write!(f, "writing plot data: {e}"),
        }
    }
}

impl std::error::Error for PlotError {}

#[derive(Serialize)]
struct PointRow {
    index: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct GraphRow {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct TauRow {
    i: usize,
    j: usize,
    z_x: f64,
    z_y: f64,
    z_prime_x: f64,
    z_prime_y: f64,
    same_leaf: bool,
    tau: Option<i64>,
}

fn write_csv<R: Serialize>(
    path: PathBuf,
    rows: impl IntoIterator<Item = R>,
) -> Result<PathBuf, PlotError> {
    let io = |e: csv::Error| PlotError::Io(e.to_string());
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| PlotError::Io(e.to_string()))?;
    Ok(path)
}

/// Writes CSV files for `kind` into `dir` and returns their paths. A failed
/// run writes nothing.
pub fn emit_plot_data(
    doc: &ResultDocument,
    kind: PlotKind,
    dir: &Path,
) -> Result<Vec<PathBuf>, PlotError> {
    if !kind.supports(&doc.inputs.parameters) {
        return Err(PlotError::UnsupportedKind {
            kind,
            command: doc.inputs.command.name().into(),
        });
    }
    let mut written = Vec::new();
    match (&doc.output, kind) {
        (Some(Output::FindOrbits(o)), PlotKind::PhasePortrait) => {
            for (k, orbit) in o.orbits.iter().enumerate() {
                let rows = orbit.points.iter().enumerate().map(|(index, z)| PointRow {
                    index,
                    x: z.x,
                    y: z.y,
                });
                written.push(write_csv(dir.join(format!("orbit_{k}.csv")), rows)?);
            }
        }
        (Some(Output::Connect(r)), PlotKind::PhasePortrait) => {
            if let ConnectStatus::Connected { segment } = &r.status {
                let rows = segment.iter().enumerate().map(|(index, z)| PointRow {
                    index,
                    x: z.x,
                    y: z.y,
                });
                written.push(write_csv(dir.join("segment.csv"), rows)?);
            }
        }
        (Some(Output::GraphScan(scan)), PlotKind::GraphOverlay) => {
            for (k, g) in scan.graphs.iter().enumerate() {
                let n = g.samples.len();
                let rows = g.samples.iter().enumerate().map(|(i, &y)| GraphRow {
                    x: (i as f64 + 0.5) / n as f64,
                    y,
                });
                written.push(write_csv(dir.join(format!("graph_{k}.csv")), rows)?);
            }
        }
        (Some(Output::Tau(t)), PlotKind::TauField) => {
            let rows = t.field.iter().flatten().map(|e| TauRow {
                i: e.i,
                j: e.j,
                z_x: e.z.x,
                z_y: e.z.y,
                z_prime_x: e.z_prime.x,
                z_prime_y: e.z_prime.y,
                same_leaf: e.same_leaf,
                tau: e.tau,
            });
            written.push(write_csv(dir.join("tau_field.csv"), rows)?);
        }
        _ => {}
    }
    Ok(written)
}
