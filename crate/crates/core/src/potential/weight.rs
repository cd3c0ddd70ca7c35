use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::green::GreenModel;

/// The composite weight `φ(z) + p·max(G(z) − t, 0)` of the family
/// interpolating between `A²(D)` (t = 0) and restriction to the
/// sublevel domain `D_t` (p → ∞).
#[derive(Clone)]
pub struct WeightEvaluator {
    phi: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    green: GreenModel,
    pub t: f64,
    pub p: f64,
}

impl WeightEvaluator {
    pub fn eval(&self, z: &Point) -> f64 {
        (self.phi)(z) + self.p * (self.green.eval(z) - self.t).max(0.0)
    }

    pub fn phi(&self, z: &Point) -> f64 {
        (self.phi)(z)
    }

    /// Indicator of the sublevel domain `D_t`, where the composite
    /// weight coincides with φ (used for the I + II split).
    pub fn in_sublevel(&self, z: &Point) -> bool {
        self.green.eval(z) < self.t
    }

    pub fn green(&self) -> &GreenModel {
        &self.green
    }
}

/// Builds the weight family member for parameters `t ≤ 0`, `p > 0`.
pub fn weight_family(
    phi: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    model: &GreenModel,
    t: f64,
    p: f64,
) -> Result<WeightEvaluator> {
    if t > 0.0 {
        return Err(Error::InvalidSpec(format!("weight family needs t <= 0, got {t}")));
    }
    if p <= 0.0 {
        return Err(Error::InvalidSpec(format!("weight family needs p > 0, got {p}")));
    }
    Ok(WeightEvaluator {
        phi,
        green: model.clone(),
        t,
        p,
    })
}
