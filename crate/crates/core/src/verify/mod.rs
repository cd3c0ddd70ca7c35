//! Statement-level numerical checks and their machine-readable reports.

mod checks;
mod report;

pub use checks::{
    check_domain_monotonicity, check_family_convergence, check_nu_lemma, check_profile,
    check_suita, check_tube_limit, sublevel_integral, NuSample, TubeLimitSpec,
};
pub use report::{CheckReport, ConvergenceRow};
