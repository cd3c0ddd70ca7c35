use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::extension::{
    adjoint_extension, generalized_bound_check, minimal_extension, Datum, ExtensionProblem,
    ExtensionResult, WeightSpec,
};
use crate::geometry::{build_domain, Domain, DomainFile, Point, Variety, VarietySpec};
use crate::potential::solve_green;

/// Extension-problem spec document. `domain` follows the domain-file
/// shape; `mode` selects the function-level, adjoint-form or
/// generalized-weight solver.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub domain: DomainFile,
    pub variety: VarietySpec,
    pub datum: DatumSpec,
    #[serde(default)]
    pub weight: WeightFile,
    pub mode: ProblemMode,
    #[serde(default)]
    pub parameters: Params,
}

/// `{value: [re, im]}` or `{coeffs: [[re, im], ...]}` (z₂-expansion on a
/// slice variety).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DatumSpec {
    Value { value: [f64; 2] },
    Coeffs { coeffs: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFile {
    #[default]
    Zero,
    Gaussian {
        beta: f64,
    },
}

/// Which sharp bound the instance certifies: the function-level minimal
/// extension, the adjoint-form variant (datum `f ∧ dg`), or the
/// generalized `(k/δ+1)σ_k` weight bound.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemMode {
    Thm31,
    Thm36,
    Thm37,
}

impl ProblemMode {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemMode::Thm31 => "Theorem 3.1",
            ProblemMode::Thm36 => "Theorem 3.6",
            ProblemMode::Thm37 => "Theorem 3.7",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Codimension override; defaults to the variety's codimension.
    #[serde(default)]
    pub k: Option<usize>,
    /// Curvature gap δ of the generalized bound.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Adjoint datum factor g: "z" (planar identity) or "z1".
    #[serde(default)]
    pub g: Option<String>,
    /// ψ of the generalized bound; only "abs_sqr" (|z|²) is shipped.
    #[serde(default)]
    pub psi: Option<String>,
}

/// A parsed problem file realized against its domain, ready to solve.
pub struct LoadedProblem {
    pub problem: ExtensionProblem,
    pub mode: ProblemMode,
    pub params: Params,
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidSpec(format!("cannot read {}: {e}", path.display()))
    })
}

fn annotate<T>(path: &Path, r: serde_json::Result<T>) -> Result<T> {
    r.map_err(|e| {
        Error::InvalidSpec(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Loads a `{kind, parameters, resolution, refinement}` domain file.
pub fn load_domain(path: &Path) -> Result<(Domain, DomainFile)> {
    let text = read_to_string(path)?;
    let file: DomainFile = annotate(path, serde_json::from_str(&text))?;
    let domain = build_domain(&file.spec)?;
    Ok((domain, file))
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Loads and realizes a problem file: builds the domain, validates the
/// variety against it, and assembles the `ExtensionProblem`.
pub fn load_problem(path: &Path) -> Result<LoadedProblem> {
    let text = read_to_string(path)?;
    let file: ProblemFile = annotate(path, serde_json::from_str(&text))?;
    realize_problem(&file)
}

pub fn realize_problem(file: &ProblemFile) -> Result<LoadedProblem> {
    let domain = build_domain(&file.domain.spec)?;
    let variety = file.variety.realize(&domain)?;
    let datum = match &file.datum {
        DatumSpec::Value { value } => Datum::Value(complex(*value)),
        DatumSpec::Coeffs { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::InvalidSpec("datum coefficient list is empty".into()));
            }
            if matches!(variety, Variety::Point { .. }) {
                return Err(Error::InvalidSpec(
                    "coefficient data require a slice variety; give a value instead".into(),
                ));
            }
            Datum::Coeffs(coeffs.iter().map(|c| complex(*c)).collect())
        }
    };
    let weight = match file.weight {
        WeightFile::Zero => WeightSpec::Zero,
        WeightFile::Gaussian { beta } => {
            if !(beta > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "gaussian weight needs beta > 0, got {beta}"
                )));
            }
            WeightSpec::Gaussian { beta }
        }
    };
    let k = file.params_k(&variety, &domain)?;
    let problem = ExtensionProblem {
        domain,
        variety,
        datum,
        weight,
        k,
        b_field: Arc::new(|_| 0.0),
        basis: None,
        resolution: file.domain.resolution.unwrap_or(0),
    };
    Ok(LoadedProblem {
        problem,
        mode: file.mode,
        params: file.parameters.clone(),
    })
}

impl ProblemFile {
    fn params_k(&self, variety: &Variety, domain: &Domain) -> Result<usize> {
        let codim = variety.codim(domain);
        match self.parameters.k {
            None => Ok(codim),
            Some(k) if k == codim => Ok(k),
            Some(k) => Err(Error::InvalidSpec(format!(
                "k = {k} contradicts the variety codimension {codim}"
            ))),
        }
    }
}

/// Named g factors accepted by adjoint-mode problem files.
pub fn g_function(name: &str) -> Result<Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>> {
    match name {
        "z" | "z1" => Ok(Arc::new(|p: &Point| p.z1())),
        other => Err(Error::InvalidSpec(format!(
            "unknown adjoint factor g = {other:?}; expected \"z\" or \"z1\""
        ))),
    }
}

/// Named ψ fields accepted by generalized-bound problem files.
pub fn psi_function(name: &str) -> Result<Arc<dyn Fn(&Point) -> f64 + Send + Sync>> {
    match name {
        "abs_sqr" => Ok(Arc::new(|p: &Point| p.norm_sqr())),
        other => Err(Error::InvalidSpec(format!(
            "unknown psi = {other:?}; expected \"abs_sqr\""
        ))),
    }
}

/// Dispatches a loaded problem to the solver its mode selects.
pub fn run_problem(loaded: &LoadedProblem) -> Result<ExtensionResult> {
    match loaded.mode {
        ProblemMode::Thm31 => minimal_extension(&loaded.problem),
        ProblemMode::Thm36 => {
            let name = loaded.params.g.as_deref().unwrap_or("z");
            let g = g_function(name)?;
            adjoint_extension(&loaded.problem, move |p| g(p))
        }
        ProblemMode::Thm37 => {
            let delta = loaded.params.delta.ok_or_else(|| {
                Error::InvalidSpec("generalized-bound problems need parameters.delta".into())
            })?;
            let name = loaded.params.psi.as_deref().unwrap_or("abs_sqr");
            let psi = psi_function(name)?;
            let pole = match &loaded.problem.variety {
                Variety::Point { a } if a.dim() == 1 => a.z1(),
                _ => {
                    return Err(Error::InvalidSpec(
                        "generalized-bound problems need a planar point variety".into(),
                    ))
                }
            };
            let model = solve_green(&loaded.problem.domain, pole)?;
            generalized_bound_check(&loaded.problem, &model, move |p| psi(p), delta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ProblemFile {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn ball_slice_round_trip() {
        let file = parse(
            r#"{
                "domain": {"kind": "ball2"},
                "variety": {"kind": "slice_z1", "c": [0.0, 0.0], "ambient": "ball2"},
                "datum": {"value": [1.0, 0.0]},
                "weight": {"kind": "zero"},
                "mode": "thm31"
            }"#,
        );
        let loaded = realize_problem(&file).unwrap();
        assert_eq!(loaded.problem.k, 1);
        let r = run_problem(&loaded).unwrap();
        assert!((r.ratio - 0.5).abs() < 1e-3, "ratio {}", r.ratio);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: serde_json::Result<ProblemFile> = serde_json::from_str(
            r#"{
                "domain": {"kind": "ball2"},
                "variety": {"kind": "slice_z1", "c": [0.0, 0.0], "ambient": "ball2"},
                "datum": {"value": [1.0, 0.0]},
                "mode": "thm31",
                "unexpected": 1
            }"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn k_must_match_codimension() {
        let file = parse(
            r#"{
                "domain": {"kind": "ball2"},
                "variety": {"kind": "slice_z1", "c": [0.0, 0.0], "ambient": "ball2"},
                "datum": {"value": [1.0, 0.0]},
                "mode": "thm31",
                "parameters": {"k": 2}
            }"#,
        );
        assert!(realize_problem(&file).is_err());
    }

    #[test]
    fn gaussian_problem_dispatch() {
        let file = parse(
            r#"{
                "domain": {"kind": "disk", "parameters": {"center": [0.0, 0.0], "radius": 1.0}},
                "variety": {"kind": "point", "a": [0.0, 0.0]},
                "datum": {"value": [1.0, 0.0]},
                "weight": {"kind": "gaussian", "beta": 1.0},
                "mode": "thm37",
                "parameters": {"delta": 1.0, "psi": "abs_sqr"}
            }"#,
        );
        let loaded = realize_problem(&file).unwrap();
        let r = run_problem(&loaded).unwrap();
        // ‖F‖² = π(1 − e^{−(δ+1)})/(δ+1) against (1/δ + 1)π.
        let want = std::f64::consts::PI * (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((r.norm_sq - want).abs() < 1e-6, "norm {}", r.norm_sq);
        assert!(r.ratio <= 1.0);
    }
}
