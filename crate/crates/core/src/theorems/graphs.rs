use super::TheoremError;
use crate::annulus_maps::{twist_cone_angle, LiftedPoint, MapSpec};
use crate::foliation_engine::FoliationRef;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CONE_GRID: usize = 16;
const CONE_MARGIN: f64 = 0.01;
const LIPSCHITZ_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphScanOptions {
    /// Number of seed heights `c_i = (i + 1) / (y_grid + 1)`.
    pub y_grid: usize,
    pub iterations: usize,
    /// Number of cells in `x` for the occupancy test.
    pub cells: usize,
    pub tol: f64,
}

impl Default for GraphScanOptions {
    fn default() -> Self {
        GraphScanOptions {
            y_grid: 15,
            iterations: 10_000,
            cells: 1024,
            tol: 1e-6,
        }
    }
}

/// How the closure of a seed was sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMethod {
    /// Forward orbit of the single point `(0, c)`.
    Orbit,
    /// Forward orbits of a row of points at height `c`, used when the single
    /// orbit leaves cells empty.
    SeedLine,
}

/// Transversality of the sampled graph to the vertical foliation and to its
/// image and preimage under the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversality {
    pub vertical: bool,
    pub image: bool,
    pub preimage: bool,
}

impl Transversality {
    pub fn all(&self) -> bool {
        self.vertical && self.image && self.preimage
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub seed: f64,
    pub method: GraphMethod,
    /// `psi` at the cell centres `x = (k + 1/2) / cells`, from a least-squares
    /// line through the points of each cell.
    pub samples: Vec<f64>,
    pub lipschitz_estimate: f64,
    /// `cot(beta) + 0.05` for the measured twist cone.
    pub lipschitz_bound: f64,
    /// Largest `max y - min y` over cells.
    pub spread: f64,
    /// Largest distance from the image of a sample to the graph.
    pub invariance_error: f64,
    pub transversality: Transversality,
    /// Pushforwards of the foliations the graph is transverse to.
    pub transverse_to: Vec<MapSpec>,
}

impl GraphRecord {
    /// `psi(x)` by linear interpolation between cell centres.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.samples.len();
        let u = x.rem_euclid(1.0) * n as f64 - 0.5;
        let k = u.floor();
        let t = u - k;
        let i = (k as i64).rem_euclid(n as i64) as usize;
        let j = (i + 1) % n;
        (1.0 - t) * self.samples[i] + t * self.samples[j]
    }
}

/// A seed whose closure was not certified, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDiagnostic {
    pub seed: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphScan {
    pub graphs: Vec<GraphRecord>,
    pub rejected: Vec<GraphDiagnostic>,
    pub beta: f64,
    /// The map has no non-wandering certificate; results are exploratory.
    pub exploratory: bool,
}

struct Cells {
    lo: Vec<f64>,
    hi: Vec<f64>,
    count: Vec<usize>,
    /// Sums of `u`, `y`, `u^2`, `u y` with `u` the offset from the cell centre.
    moments: Vec<[f64; 4]>,
}

impl Cells {
    fn new(n: usize) -> Self {
        Cells {
            lo: vec![f64::INFINITY; n],
            hi: vec![f64::NEG_INFINITY; n],
            count: vec![0; n],
            moments: vec![[0.0; 4]; n],
        }
    }

    fn add(&mut self, z: LiftedPoint) {
        let n = self.count.len();
        let k = ((z.x.rem_euclid(1.0) * n as f64) as usize).min(n - 1);
        self.lo[k] = self.lo[k].min(z.y);
        self.hi[k] = self.hi[k].max(z.y);
        self.count[k] += 1;
        let u = z.x.rem_euclid(1.0) - (k as f64 + 0.5) / n as f64;
        let s = &mut self.moments[k];
        s[0] += u;
        s[1] += z.y;
        s[2] += u * u;
        s[3] += u * z.y;
    }

    /// Least-squares line through the points of cell `k`, evaluated at its centre.
    fn centre_value(&self, k: usize) -> f64 {
        let n = self.count[k] as f64;
        let [su, sy, suu, suy] = self.moments[k];
        let var = suu - su * su / n;
        let width = 1.0 / self.count.len() as f64;
        if var <= 1e-6 * n * width * width {
            return sy / n;
        }
        let slope = (suy - su * sy / n) / var;
        (sy - slope * su) / n
    }

    fn full(&self) -> bool {
        self.count.iter().all(|&c| c > 0)
    }
}

fn occupancy(
    m: &MapSpec,
    c: f64,
    opts: &GraphScanOptions,
) -> Result<(GraphMethod, Cells), TheoremError> {
    let mut cells = Cells::new(opts.cells);
    let mut z = LiftedPoint::new(0.0, c);
    for _ in 0..opts.iterations {
        cells.add(z);
        z = m.apply_lift(z)?;
        z = LiftedPoint::new(z.x.rem_euclid(1.0), z.y);
    }
    if cells.full() {
        return Ok((GraphMethod::Orbit, cells));
    }
    let mut cells = Cells::new(opts.cells);
    let per_seed = (opts.iterations / opts.cells).max(1);
    for j in 0..opts.cells {
        let mut z = LiftedPoint::new((j as f64 + 0.5) / opts.cells as f64, c);
        for _ in 0..per_seed {
            cells.add(z);
            z = m.apply_lift(z)?;
            z = LiftedPoint::new(z.x.rem_euclid(1.0), z.y);
        }
    }
    Ok((GraphMethod::SeedLine, cells))
}

/// True when `xi` increases strictly around the circle, closing with a shift of 1.
fn strictly_increasing_loop(xi: &[f64]) -> bool {
    xi.windows(2).all(|w| w[1] > w[0]) && xi[xi.len() - 1] < xi[0] + 1.0
}

fn scan_seed(
    m: &MapSpec,
    c: f64,
    opts: &GraphScanOptions,
    bound: f64,
) -> Result<Result<GraphRecord, GraphDiagnostic>, TheoremError> {
    let reject = |reason: String| Ok(Err(GraphDiagnostic { seed: c, reason }));
    let (method, cells) = occupancy(m, c, opts)?;
    if !cells.full() {
        let empty = cells.count.iter().filter(|&&k| k == 0).count();
        return reject(format!("{empty} of {} cells empty", opts.cells));
    }
    let n = opts.cells;
    let spread = (0..n)
        .map(|k| cells.hi[k] - cells.lo[k])
        .fold(0.0, f64::max);
    let spread_bound = opts.tol + bound / n as f64;
    if spread > spread_bound {
        return reject(format!(
            "cell spread {spread:.3e} exceeds {spread_bound:.3e}"
        ));
    }
    let samples: Vec<f64> = (0..n).map(|k| cells.centre_value(k)).collect();
    let lipschitz_estimate = (0..n)
        .map(|k| (samples[(k + 1) % n] - samples[k]).abs() * n as f64)
        .fold(0.0, f64::max);
    let mut record = GraphRecord {
        seed: c,
        method,
        samples,
        lipschitz_estimate,
        lipschitz_bound: bound,
        spread,
        invariance_error: 0.0,
        transversality: Transversality {
            vertical: true,
            image: false,
            preimage: false,
        },
        transverse_to: Vec::new(),
    };
    let centres: Vec<LiftedPoint> = (0..n)
        .map(|k| LiftedPoint::new((k as f64 + 0.5) / n as f64, record.samples[k]))
        .collect();
    let mut xi_image = Vec::with_capacity(n);
    let mut xi_preimage = Vec::with_capacity(n);
    for &z in &centres {
        let w = m.apply_lift(z)?;
        record.invariance_error = record.invariance_error.max((w.y - record.eval(w.x)).abs());
        xi_preimage.push(w.x);
        xi_image.push(m.apply_inverse(z)?.x);
    }
    record.transversality.image = strictly_increasing_loop(&xi_image);
    record.transversality.preimage = strictly_increasing_loop(&xi_preimage);
    let invariance_bound = spread_bound;
    if record.invariance_error > invariance_bound {
        return reject(format!(
            "invariance error {:.3e} exceeds {invariance_bound:.3e}",
            record.invariance_error
        ));
    }
    if !record.transversality.all() {
        return reject(format!("not transverse: {:?}", record.transversality));
    }
    if record.lipschitz_estimate > bound {
        return reject(format!(
            "Lipschitz estimate {:.3e} exceeds {bound:.3e}",
            record.lipschitz_estimate
        ));
    }
    let v = FoliationRef::vertical();
    record.transverse_to = [v.clone(), v.image(m), v.preimage(m)]
        .iter()
        .map(|f| f.pushforward().clone())
        .collect();
    Ok(Ok(record))
}

/// Looks for invariant graphs through the seed heights by orbit closure and
/// certifies those that are single valued at cell resolution, invariant,
/// transverse to the vertical foliation and to its image and preimage, and
/// `cot(beta)`-Lipschitz for the measured twist cone.
pub fn invariant_graph_scan(
    m: &MapSpec,
    opts: &GraphScanOptions,
) -> Result<GraphScan, TheoremError> {
    m.validate()?;
    if opts.cells < 2 || opts.iterations == 0 {
        return Err(TheoremError::InvalidInput(
            "graph scan needs at least two cells and one iteration".into(),
        ));
    }
    let beta = twist_cone_angle(m, CONE_GRID, CONE_GRID, CONE_MARGIN)?.beta;
    let bound = 1.0 / beta.tan() + LIPSCHITZ_SLACK;
    let results = (0..opts.y_grid)
        .into_par_iter()
        .map(|i| scan_seed(m, (i + 1) as f64 / (opts.y_grid + 1) as f64, opts, bound))
        .collect::<Result<Vec<_>, TheoremError>>()?;
    let mut scan = GraphScan {
        graphs: Vec::new(),
        rejected: Vec::new(),
        beta,
        exploratory: !m.non_wandering_certified(),
    };
    for r in results {
        match r {
            Ok(g) => {
                let duplicate = scan.graphs.iter().any(|h| {
                    h.samples
                        .iter()
                        .zip(&g.samples)
                        .all(|(a, b)| (a - b).abs() <= opts.tol)
                });
                if duplicate {
                    scan.rejected.push(GraphDiagnostic {
                        seed: g.seed,
                        reason: "duplicate of an earlier graph".into(),
                    });
                } else {
                    scan.graphs.push(g);
                }
            }
            Err(d) => scan.rejected.push(d),
        }
    }
    Ok(scan)
}
