//! Weighted Gram systems over finite holomorphic bases: Bergman kernels,
//! sublevel and weighted-family kernel profiles, and dual norms of
//! restriction functionals.

mod basis;
mod functional;
mod gram;
mod profile;
mod radial;

pub use basis::Basis;
pub use functional::Functional;
pub use gram::{gram, gram_diagonal, GramFactory, GramSystem};
pub use profile::{
    dual_profile, kernel_profile, system_at, t_grid, Profile, ProfileMode, ProfileOpts,
};
pub use radial::{
    annulus_moments, ball2_moments, bidisk_family_moments, disk_family_moments, disk_moments,
    gaussian_moments,
};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// Kernel value `K(a)` with the domain-membership check.
pub fn kernel_at(system: &GramSystem, domain: &Domain, a: &Point) -> Result<f64> {
    if !domain.contains(a) {
        return Err(Error::InvalidSpec(format!(
            "kernel point {a:?} lies outside the domain"
        )));
    }
    Ok(system.kernel_value(a))
}

/// Dual norm `‖ξ‖* = sqrt(conj(w)† M⁺ conj(w))` with `w_i = ⟨ξ, b_i⟩`.
pub fn dual_norm(system: &GramSystem, xi: &Functional) -> Result<f64> {
    let w = xi.pairing_vector(&system.basis)?;
    Ok(system.dual_norm_sq(&w)?.sqrt())
}
