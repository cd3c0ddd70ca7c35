//! Domains of C^n (n ≤ 2), deterministic quadrature rules over them and
//! over sublevel regions `{G < t}`, and weighted integration.

mod domain;
mod quadrature;
mod sublevel;
mod variety;

pub use domain::{build_domain, Domain, DomainFile, DomainSpec, Point};
pub use quadrature::{integrate, integrate_re, masked_rule_planar, polar_rule, quadrature, QuadratureRule};
pub use sublevel::{sublevel_rule, sublevel_rule_star};
pub use variety::{SliceAmbient, Variety, VarietySpec};
