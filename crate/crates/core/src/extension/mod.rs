//! L²-minimal holomorphic extension from a variety V to the domain, with
//! sharp-constant certificates: the minimal weighted norm of an extension
//! is compared against `σ_k ∫_V |f|² e^{−φ+kB}` (and its adjoint-form and
//! generalized-weight variants) and reported as a ratio.

mod problem;
mod solve;

pub use problem::{Datum, ExtensionProblem, ExtensionResult, WeightSpec};
pub use solve::{
    adjoint_extension, domain_gram, generalized_bound_check, minimal_extension, restriction_norm,
};

use crate::error::{Error, Result};

/// Volume `σ_k = π^k / k!` of the unit ball in C^k.
pub fn sigma(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidSpec("sigma needs k >= 1".into()));
    }
    let mut v = 1.0f64;
    for j in 1..=k {
        v *= std::f64::consts::PI / j as f64;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sigma_values() {
        assert!((sigma(1).unwrap() - PI).abs() < 1e-15);
        assert!((sigma(2).unwrap() - PI * PI / 2.0).abs() < 1e-15);
        assert!((sigma(3).unwrap() - PI.powi(3) / 6.0).abs() < 1e-14);
        assert!(sigma(0).is_err());
    }
}
