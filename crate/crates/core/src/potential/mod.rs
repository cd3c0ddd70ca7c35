//! Green's functions and general negative (pluri)subharmonic weights:
//! analytic series and MFS solvers, Robin constants, the defect bounds
//! sandwiching `G` against `log d_V²`, and the weight families
//! `φ + p·max(G − t, 0)`.

mod defect;
mod green;
mod robin;
mod weight;

pub use defect::{b_field, defect_bound, DefectBound};
pub use green::{solve_green, solve_green_annulus, solve_green_mfs, GreenKind, GreenMethod, GreenModel};
pub use robin::{generalized_robin, robin_constant, robin_extrapolated, RobinReport};
pub use weight::{weight_family, WeightEvaluator};
