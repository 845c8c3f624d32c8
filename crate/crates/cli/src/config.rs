use annulus_core::annulus_maps::{LiftedPoint, MapSpec};
use annulus_core::foliation_engine::{Direction, SAME_LEAF_TOL};
use annulus_core::theorems::{Circle, GraphScanOptions, LeafGrid};
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Angle,
    Tau,
    Monotone,
    Rotation,
    FindOrbits,
    GraphScan,
    Connect,
    Extremes,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Angle => "angle",
            Command::Tau => "tau",
            Command::Monotone => "monotone",
            Command::Rotation => "rotation",
            Command::FindOrbits => "find-orbits",
            Command::GraphScan => "graph-scan",
            Command::Connect => "connect",
            Command::Extremes => "extremes",
            Command::Sweep => "sweep",
        }
    }
}

/// Angle class of a pair relative to the image of the vertical foliation
/// under the configured map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleParams {
    pub z: LiftedPoint,
    pub z_prime: LiftedPoint,
    #[serde(default = "same_leaf_tol")]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TauMethod {
    #[default]
    Auto,
    Natural,
    Winding,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    pub z: LiftedPoint,
    pub z_prime: LiftedPoint,
}

/// Points `F(i / leaves, (j + 1/2) / heights)`; every ordered pair of
/// distinct points is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldGrid {
    pub leaves: usize,
    pub heights: usize,
}

impl Default for FieldGrid {
    fn default() -> Self {
        FieldGrid {
            leaves: 8,
            heights: 8,
        }
    }
}

/// `tau(z, z', F, F')` with `F` and `F'` given by their pushforwards.
/// Defaults: `F` vertical, `F'` the preimage of `F` under the map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauParams {
    #[serde(default)]
    pub f: Option<MapSpec>,
    #[serde(default)]
    pub f_prime: Option<MapSpec>,
    #[serde(default)]
    pub pairs: Vec<PairInput>,
    #[serde(default)]
    pub field: Option<FieldGrid>,
    #[serde(default)]
    pub method: TauMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneParams {
    pub direction: Direction,
    /// Pushforward of the foliation under test; vertical when absent.
    #[serde(default)]
    pub foliation: Option<MapSpec>,
    #[serde(default = "same_leaf_pairs")]
    pub same_leaf: usize,
    #[serde(default = "cross_leaf_pairs")]
    pub cross_leaf: usize,
    #[serde(default = "boundary_pairs")]
    pub boundary: usize,
}

/// Rotation number at a boundary circle or a point; the pair of boundary
/// rotation numbers when neither is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationParams {
    #[serde(default)]
    pub circle: Option<Circle>,
    #[serde(default)]
    pub point: Option<LiftedPoint>,
    #[serde(default = "rotation_iterations")]
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindOrbitsParams {
    pub p: i64,
    pub q: i64,
    #[serde(default = "orbit_tol")]
    pub tol: f64,
    #[serde(default)]
    pub grid: LeafGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectParams {
    pub eps: f64,
    #[serde(default = "connect_budget")]
    pub budget: u64,
}

/// Extreme intersection points on the vertical at `x`, or on `leaves`
/// verticals at `x = i / leaves` when `x` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremesParams {
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default = "extremes_leaves")]
    pub leaves: usize,
    #[serde(default = "same_leaf_tol")]
    pub tol: f64,
}

/// Runs `command` on the cartesian product of `grid`, whose keys are JSON
/// pointers into the cell configuration (`/map/...`, `/parameters/...` or
/// `/seed`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub command: Command,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
    #[serde(skip)]
    pub cells: Vec<SweepCellConfig>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCellConfig {
    pub values: BTreeMap<String, Value>,
    pub config: ExperimentConfig,
}

fn same_leaf_tol() -> f64 {
    SAME_LEAF_TOL
}
fn same_leaf_pairs() -> usize {
    200
}
fn cross_leaf_pairs() -> usize {
    200
}
fn boundary_pairs() -> usize {
    100
}
fn rotation_iterations() -> usize {
    1000
}
fn orbit_tol() -> f64 {
    1e-8
}
fn connect_budget() -> u64 {
    100_000
}
fn extremes_leaves() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Angle(AngleParams),
    Tau(TauParams),
    Monotone(MonotoneParams),
    Rotation(RotationParams),
    FindOrbits(FindOrbitsParams),
    GraphScan(GraphScanOptions),
    Connect(ConnectParams),
    Extremes(ExtremesParams),
    Sweep(SweepParams),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub map: MapSpec,
    pub command: Command,
    pub parameters: Parameters,
    pub seed: u64,
}

fn strict<T: DeserializeOwned>(what: &str, v: Value) -> Result<T, ConfigError> {
    serde_json::from_value(v).map_err(|e| ConfigError(format!("{what}: {e}")))
}

impl ExperimentConfig {
    /// Parses a configuration object. Command parameters may sit in a
    /// `parameters` table or at the top level, but not both.
    pub fn from_value(value: Value) -> Result<Self, ConfigError> {
        let Value::Object(mut obj) = value else {
            return err("config must be a JSON object");
        };
        let Some(map) = obj.remove("map") else {
            return err("missing field `map`");
        };
        let map: MapSpec = strict("map", map)?;
        map.validate()
            .map_err(|e| ConfigError(format!("map: {e}")))?;
        let Some(command) = obj.remove("command") else {
            return err("missing field `command`");
        };
        let command: Command = strict("command", command)?;
        let seed = match obj.remove("seed") {
            Some(v) => strict("seed", v)?,
            None => 0,
        };
        let mut params = match obj.remove("parameters") {
            None => Map::new(),
            Some(Value::Object(m)) => m,
            Some(_) => return err("`parameters` must be an object"),
        };
        for (k, v) in obj {
            if params.contains_key(&k) {
                return err(format!("`{k}` given both at top level and in parameters"));
            }
            params.insert(k, v);
        }
        let parameters = parse_parameters(command, Value::Object(params), &map, seed)?;
        Ok(ExperimentConfig {
            map,
            command,
            parameters,
            seed,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    /// Replaces the seed, re-deriving sweep cells that inherit it.
    pub fn with_seed(self, seed: u64) -> Result<Self, ConfigError> {
        let mut value = serde_json::to_value(&self).expect("config serializes");
        value["seed"] = Value::from(seed);
        Self::from_value(value)
    }
}

fn parse_parameters(
    command: Command,
    v: Value,
    map: &MapSpec,
    seed: u64,
) -> Result<Parameters, ConfigError> {
    let what = format!("{} parameters", command.name());
    Ok(match command {
        Command::Angle => Parameters::Angle(strict(&what, v)?),
        Command::Tau => {
            let p: TauParams = strict(&what, v)?;
            if p.pairs.is_empty() && p.field.is_none() {
                return err("tau needs `pairs`, `field` or both");
            }
            if let Some(g) = p.field {
                if g.leaves == 0 || g.heights == 0 {
                    return err("tau field needs at least one leaf and one height");
                }
            }
            for m in p.f.iter().chain(&p.f_prime) {
                m.validate()
                    .map_err(|e| ConfigError(format!("{what}: {e}")))?;
            }
            Parameters::Tau(p)
        }
        Command::Monotone => {
            let p: MonotoneParams = strict(&what, v)?;
            if let Some(m) = &p.foliation {
                m.validate()
                    .map_err(|e| ConfigError(format!("{what}: {e}")))?;
            }
            Parameters::Monotone(p)
        }
        Command::Rotation => {
            let p: RotationParams = strict(&what, v)?;
            if p.circle.is_some() && p.point.is_some() {
                return err("rotation takes `circle` or `point`, not both");
            }
            Parameters::Rotation(p)
        }
        Command::FindOrbits => Parameters::FindOrbits(strict(&what, v)?),
        Command::GraphScan => Parameters::GraphScan(strict(&what, v)?),
        Command::Connect => Parameters::Connect(strict(&what, v)?),
        Command::Extremes => Parameters::Extremes(strict(&what, v)?),
        Command::Sweep => {
            let mut p: SweepParams = strict(&what, v)?;
            p.cells = expand_sweep(&p, map, seed)?;
            Parameters::Sweep(p)
        }
    })
}

fn expand_sweep(
    p: &SweepParams,
    map: &MapSpec,
    seed: u64,
) -> Result<Vec<SweepCellConfig>, ConfigError> {
    if p.command == Command::Sweep {
        return err("sweeps cannot be nested");
    }
    let base = serde_json::json!({
        "map": map,
        "command": p.command,
        "parameters": p.parameters,
        "seed": seed,
    });
    let mut assignments: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new()];
    for (pointer, values) in &p.grid {
        if values.is_empty() {
            return err(format!("sweep axis `{pointer}` has no values"));
        }
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                values.iter().map(move |v| {
                    let mut a = a.clone();
                    a.insert(pointer.clone(), v.clone());
                    a
                })
            })
            .collect();
    }
    assignments
        .into_iter()
        .map(|values| {
            let mut cell = base.clone();
            for (pointer, v) in &values {
                set_pointer(&mut cell, pointer, v.clone())?;
            }
            let config = ExperimentConfig::from_value(cell)
                .map_err(|e| ConfigError(format!("sweep cell {values:?}: {e}")))?;
            Ok(SweepCellConfig { values, config })
        })
        .collect()
}

fn set_pointer(root: &mut Value, pointer: &str, v: Value) -> Result<(), ConfigError> {
    let allowed = ["/map/", "/parameters/"];
    if pointer != "/seed" && !allowed.iter().any(|p| pointer.starts_with(p)) {
        return err(format!(
            "sweep axis `{pointer}` must be /seed or start with /map/ or /parameters/"
        ));
    }
    let (parent, key) = pointer.rsplit_once('/').expect("pointer starts with /");
    let key = key.replace("~1", "/").replace("~0", "~");
    match root.pointer_mut(parent) {
        Some(Value::Object(obj)) => {
            obj.insert(key, v);
            Ok(())
        }
        Some(Value::Array(items)) => {
            let slot = key
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| ConfigError(format!("sweep axis `{pointer}`: no such element")))?;
            *slot = v;
            Ok(())
        }
        _ => err(format!("sweep axis `{pointer}`: parent does not exist")),
    }
}
