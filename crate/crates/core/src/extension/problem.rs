use std::sync::Arc;

use num_complex::Complex64;

use crate::bergman::Basis;
use crate::geometry::{Domain, Point, Variety};

/// Weight e^{−w} on the ambient domain. Tagged variants let the solver
/// pick closed-form Gram paths where they exist.
#[derive(Clone)]
pub enum WeightSpec {
    Zero,
    /// `w = β|z|²` on planar domains.
    Gaussian { beta: f64 },
    Custom(Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl WeightSpec {
    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            WeightSpec::Zero => 0.0,
            WeightSpec::Gaussian { beta } => beta * p.norm_sqr(),
            WeightSpec::Custom(f) => f(p),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            WeightSpec::Zero => "zero",
            WeightSpec::Gaussian { .. } => "gaussian",
            WeightSpec::Custom(_) => "custom",
        }
    }
}

impl std::fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightSpec::Gaussian { beta } => write!(f, "Gaussian {{ beta: {beta} }}"),
            other => write!(f, "{}", other.tag()),
        }
    }
}

/// Datum on V: a single value at a point variety, or coefficients of the
/// z₂-expansion along a slice variety.
#[derive(Clone, Debug)]
pub enum Datum {
    Value(Complex64),
    Coeffs(Vec<Complex64>),
}

/// The minimal-extension instance. `b_field` is the defect bound B
/// entering the right-hand side `σ_k ∫_V |f|² e^{−φ+kB}`.
#[derive(Clone)]
pub struct ExtensionProblem {
    pub domain: Domain,
    pub variety: Variety,
    pub datum: Datum,
    pub weight: WeightSpec,
    pub k: usize,
    pub b_field: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    /// Basis override; defaults to `Basis::default_for(domain)`.
    pub basis: Option<Basis>,
    pub resolution: u32,
}

impl ExtensionProblem {
    /// Flat-weight, zero-defect problem — the common sharpness instance.
    pub fn flat(domain: Domain, variety: Variety, datum: Datum, k: usize) -> ExtensionProblem {
        ExtensionProblem {
            domain,
            variety,
            datum,
            weight: WeightSpec::Zero,
            k,
            b_field: Arc::new(|_| 0.0),
            basis: None,
            resolution: 0,
        }
    }
}

/// Certificate of one solved instance.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    /// Coefficients of the minimal extension in the domain basis.
    pub coefficients: Vec<Complex64>,
    /// Attained `∫_D |F|² e^{−weight}`.
    pub norm_sq: f64,
    /// Right-hand side of the applicable bound.
    pub bound: f64,
    /// `norm_sq / bound`; the sharp inequality requires ≤ 1 + tol.
    pub ratio: f64,
    /// Worst violation of the V-side interpolation constraints.
    pub constraint_residual: f64,
    /// Worst normalized inner product against the ideal of V inside the span.
    pub orthogonality_residual: f64,
    pub rank: usize,
    pub dropped: usize,
}
