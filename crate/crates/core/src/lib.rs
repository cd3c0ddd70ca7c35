//! Numerical laboratory for Bergman kernels, Green's functions, Robin
//! constants and sharp L²-minimal holomorphic extension bounds on model
//! domains of C^n (n ≤ 2).
//!
//! The crate is organized around five subsystems:
//!
//! * [`geometry`] — domains of C^n, deterministic quadrature rules, and
//!   sublevel regions `{G < t}` of a scalar field;
//! * [`potential`] — Green's functions (analytic series and method of
//!   fundamental solutions), Robin constants, defect bounds and the
//!   weight families `φ + p·max(G − t, 0)`;
//! * [`bergman`] — weighted Gram systems over finite holomorphic bases,
//!   kernel values `K(a)`, sublevel/weighted kernel profiles and dual
//!   norms of restriction functionals;
//! * [`extension`] — L²-minimal extension from a point or slice variety,
//!   with sharp-bound certificates for the function, adjoint-form and
//!   generalized (`(k/δ+1)σ_k`) settings;
//! * [`verify`] — statement-level checks producing machine-readable
//!   reports, aggregated by the `suite` runner of the [`cli`].

pub mod bergman;
pub mod cli;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod numeric;
pub mod potential;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
