use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::sigma;
use crate::geometry::{integrate, Point, Variety};

use super::basis::Basis;

/// Restriction functional on holomorphic functions: either evaluation at
/// a point of V, or pairing against a density on V,
/// `⟨ξ, f⟩ = σ_k ∫_V f ḡ e^{−φ + kB}`.
#[derive(Clone)]
pub enum Functional {
    PointMass {
        a: Point,
    },
    Density {
        g: Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>,
        variety: Variety,
        k: usize,
        phi: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
        b_field: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
        resolution: u32,
    },
}

impl Functional {
    pub fn point_mass(a: Point) -> Functional {
        Functional::PointMass { a }
    }

    /// Density functional with flat weight and zero defect field.
    pub fn flat_density(
        g: Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>,
        variety: Variety,
        k: usize,
        resolution: u32,
    ) -> Functional {
        Functional::Density {
            g,
            variety,
            k,
            phi: Arc::new(|_| 0.0),
            b_field: Arc::new(|_| 0.0),
            resolution,
        }
    }

    /// Applies the functional to an explicit function.
    pub fn pairing<F: Fn(&Point) -> Complex64>(&self, f: F) -> Result<Complex64> {
        match self {
            Functional::PointMass { a } => {
                let v = f(a);
                if !v.is_finite() {
                    return Err(Error::NonFiniteNode {
                        index: 0,
                        location: format!("{a:?}"),
                        value: v.norm(),
                    });
                }
                Ok(v)
            }
            Functional::Density {
                g,
                variety,
                k,
                phi,
                b_field,
                resolution,
            } => {
                let rule = variety.rule(*resolution);
                let s = sigma(*k)?;
                let val = integrate(&rule, |p| {
                    f(p) * g(p).conj() * (-phi(p) + *k as f64 * b_field(p)).exp()
                })?;
                Ok(val * s)
            }
        }
    }

    /// Pairings `w_i = ⟨ξ, b_i⟩` against every basis element.
    pub fn pairing_vector(&self, basis: &Basis) -> Result<Vec<Complex64>> {
        let n = basis.len();
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        match self {
            Functional::PointMass { a } => {
                basis.eval_into(a, &mut w);
            }
            Functional::Density { .. } => {
                for (i, slot) in w.iter_mut().enumerate() {
                    *slot = self.pairing(|p| {
                        let mut row = vec![Complex64::new(0.0, 0.0); n];
                        basis.eval_into(p, &mut row);
                        row[i]
                    })?;
                }
            }
        }
        Ok(w)
    }
}
