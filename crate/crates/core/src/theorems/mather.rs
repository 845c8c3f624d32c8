use super::{invariant_graph_scan, GraphRecord, GraphScanOptions, TheoremError};
use crate::annulus_maps::{LiftedPoint, MapSpec};
use serde::{Deserialize, Serialize};

const SEEDS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConnectStatus {
    /// A forward orbit segment from near `C0` to near `C1`; each point is the
    /// image of the previous one under the lift.
    Connected {
        segment: Vec<LiftedPoint>,
    },
    /// A certified invariant graph separating the boundaries.
    Blocked {
        graph: GraphRecord,
    },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectReport {
    pub status: ConnectStatus,
    pub eps: f64,
    pub budget: u64,
    /// Iterations actually spent by the orbit search.
    pub iterations_used: u64,
    /// Both a certified graph and a connecting segment were found. The
    /// segment is reported; the graph certificate is wrong at this resolution.
    pub conflict: bool,
    pub exploratory: bool,
}

fn search(
    m: &MapSpec,
    eps: f64,
    budget: u64,
) -> Result<(Option<Vec<LiftedPoint>>, u64), TheoremError> {
    let share = (budget / SEEDS as u64).max(1);
    let mut used = 0u64;
    for j in 0..SEEDS {
        if used >= budget {
            break;
        }
        let mut z = LiftedPoint::new(j as f64 / SEEDS as f64, 0.5 * eps);
        let mut segment = vec![z];
        let steps = share.min(budget - used);
        for _ in 0..steps {
            z = m.apply_lift(z)?;
            used += 1;
            segment.push(z);
            if z.y > 1.0 - eps {
                return Ok((Some(segment), used));
            }
        }
    }
    Ok((None, used))
}

/// Searches for a forward orbit from the `eps`-neighbourhood of `C0` into
/// that of `C1` within `budget` iterations, and for a certified invariant
/// graph that would block it. The reverse direction is the same search on the
/// inverse map.
pub fn mather_connect_search(
    m: &MapSpec,
    eps: f64,
    budget: u64,
) -> Result<ConnectReport, TheoremError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(TheoremError::InvalidInput(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    m.validate()?;
    let exploratory = !m.non_wandering_certified();
    if budget == 0 {
        return Ok(ConnectReport {
            status: ConnectStatus::Inconclusive,
            eps,
            budget,
            iterations_used: 0,
            conflict: false,
            exploratory,
        });
    }
    let scan = invariant_graph_scan(m, &GraphScanOptions::default())?;
    let graph = scan
        .graphs
        .into_iter()
        .filter(|g| g.samples.iter().all(|&y| y > eps && y < 1.0 - eps))
        .min_by(|a, b| (a.seed - 0.5).abs().total_cmp(&(b.seed - 0.5).abs()));
    let (segment, iterations_used) = search(m, eps, budget)?;
    let conflict = graph.is_some() && segment.is_some();
    let status = match (segment, graph) {
        (Some(segment), _) => ConnectStatus::Connected { segment },
        (None, Some(graph)) => ConnectStatus::Blocked { graph },
        (None, None) => ConnectStatus::Inconclusive,
    };
    Ok(ConnectReport {
        status,
        eps,
        budget,
        iterations_used,
        conflict,
        exploratory,
    })
}
