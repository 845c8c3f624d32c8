use super::{LiftedPoint, MapError, MapSpec};

/// Minimum separation of distinct probe points along the isotopy.
const COLLISION_TOL: f64 = 1e-12;

/// A fixed path `t -> f_t` from the identity (`t = 0`) to a map (`t = 1`).
///
/// Twists, kicks and deck shifts scale their parameters by `t`; billiards
/// interpolate linearly between `z` and the lift `f~(z)`; composite nodes
/// apply the rule factorwise.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotopyHandle {
    source: MapSpec,
}

impl IsotopyHandle {
    pub fn new(source: MapSpec) -> Self {
        IsotopyHandle { source }
    }

    pub fn source(&self) -> &MapSpec {
        &self.source
    }

    pub fn eval(&self, t: f64, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        self.source.eval_at(t.clamp(0.0, 1.0), z)
    }

    pub fn eval_inverse(&self, t: f64, z: LiftedPoint) -> Result<LiftedPoint, MapError> {
        self.source.eval_inverse_at(t.clamp(0.0, 1.0), z)
    }

    /// Evaluates `f_t` on every probe and fails if two distinct probes land
    /// on the same point.
    pub fn probe_injective(&self, t: f64, probes: &[LiftedPoint]) -> Result<(), MapError> {
        let images = probes
            .iter()
            .map(|&z| self.eval(t, z))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..probes.len() {
            for j in i + 1..probes.len() {
                if probes[i].dist(probes[j]) > COLLISION_TOL
                    && images[i].dist(images[j]) <= COLLISION_TOL
                {
                    return Err(MapError::NonInjectiveSample { t });
                }
            }
        }
        Ok(())
    }
}
