use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::bergman::{
    annulus_moments, ball2_moments, disk_moments, gram, gram_diagonal, Basis, GramSystem,
};
use crate::error::{Error, Result};
use crate::geometry::{integrate_re, quadrature, Domain, Point, Variety};
use crate::potential::GreenModel;

use super::problem::{Datum, ExtensionProblem, ExtensionResult, WeightSpec};
use super::sigma;

/// Relative cutoff for the bordered KKT eigensolve, matching the Gram
/// stabilization policy.
const KKT_DROP: f64 = 1e-12;
const CONSTRAINT_TOL: f64 = 1e-8;

fn default_resolution(domain: &Domain, requested: u32) -> u32 {
    if requested > 0 {
        requested
    } else if domain.dim() == 1 {
        64
    } else {
        16
    }
}

/// Weighted Gram system over the ambient domain, through closed-form
/// diagonal moments for the flat weight on the analytic domains and
/// through quadrature otherwise.
pub fn domain_gram(
    domain: &Domain,
    weight: &WeightSpec,
    basis: &Basis,
    resolution: u32,
) -> Result<GramSystem> {
    let res = default_resolution(domain, resolution);
    if let WeightSpec::Zero = weight {
        match (domain, basis) {
            (Domain::Disk { center, radius }, Basis::Monomials { center: bc, degree })
                if (center - bc).norm() == 0.0 =>
            {
                return gram_diagonal(basis.clone(), &disk_moments(*degree, *radius));
            }
            (Domain::Annulus { r_inner, r_outer }, Basis::Laurent { jmax }) => {
                return gram_diagonal(basis.clone(), &annulus_moments(*jmax, *r_inner, *r_outer));
            }
            (Domain::Bidisk, Basis::Monomials2 { total_degree }) => {
                let mut m = Vec::new();
                for d in 0..=*total_degree {
                    for i in 0..=d {
                        let j = d - i;
                        m.push(
                            std::f64::consts::PI / (i as f64 + 1.0) * std::f64::consts::PI
                                / (j as f64 + 1.0),
                        );
                    }
                }
                return gram_diagonal(basis.clone(), &m);
            }
            (Domain::Ball2, Basis::Monomials2 { total_degree }) => {
                return gram_diagonal(basis.clone(), &ball2_moments(*total_degree));
            }
            _ => {}
        }
    }
    let rule = quadrature(domain, res)?;
    gram(&rule, basis, |p| weight.eval(p))
}

/// `σ_k ∫_V |f|² e^{−φ+kB}` over the induced measure of V (an atom for
/// point varieties).
pub fn restriction_norm<F, P, B>(
    variety: &Variety,
    f: F,
    phi: P,
    b_field: B,
    k: usize,
    resolution: u32,
) -> Result<f64>
where
    F: Fn(&Point) -> Complex64,
    P: Fn(&Point) -> f64,
    B: Fn(&Point) -> f64,
{
    let rule = variety.rule(resolution.max(32));
    let s = sigma(k)?;
    let v = integrate_re(&rule, |p| {
        f(p).norm_sqr() * (-phi(p) + k as f64 * b_field(p)).exp()
    })?;
    Ok(s * v)
}

/// The datum as a function on V.
fn datum_fn<'a>(datum: &'a Datum) -> impl Fn(&Point) -> Complex64 + 'a {
    move |p: &Point| match datum {
        Datum::Value(v) => *v,
        Datum::Coeffs(c) => {
            let z = p.z2();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pw = Complex64::new(1.0, 0.0);
            for a in c {
                acc += a * pw;
                pw *= z;
            }
            acc
        }
    }
}

/// Exact linear interpolation constraints `C·coef = d` realizing
/// `F|_V = f` over the span: evaluation at a point variety, z₂-expansion
/// coefficient matching along a slice.
fn constraints(
    basis: &Basis,
    variety: &Variety,
    datum: &Datum,
) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
    match variety {
        Variety::Point { a } => {
            let row = basis.eval(a);
            let d = match datum {
                Datum::Value(v) => *v,
                Datum::Coeffs(c) if c.len() == 1 => c[0],
                _ => {
                    return Err(Error::InvalidSpec(
                        "a point variety takes a single-value datum".into(),
                    ))
                }
            };
            Ok((
                DMatrix::from_row_slice(1, row.len(), &row),
                DVector::from_element(1, d),
            ))
        }
        Variety::Slice { c, .. } => {
            let idx = basis.indices2().ok_or_else(|| {
                Error::InvalidSpec("slice constraints need a C² monomial basis".into())
            })?;
            let coeffs = match datum {
                Datum::Value(v) => vec![*v],
                Datum::Coeffs(cs) => cs.clone(),
            };
            let max_j = idx.iter().map(|&(_, j)| j).max().unwrap_or(0);
            if coeffs.len() > max_j + 1 {
                return Err(Error::Infeasible(1.0));
            }
            let q = max_j + 1;
            let mut cm = DMatrix::zeros(q, idx.len());
            for (col, &(i, j)) in idx.iter().enumerate() {
                cm[(j, col)] = c.powu(i as u32);
            }
            let mut d = DVector::zeros(q);
            for (j, v) in coeffs.iter().enumerate() {
                d[j] = *v;
            }
            Ok((cm, d))
        }
    }
}

/// Solves `min c† M c  s.t.  C c = d` through a bordered Hermitian KKT
/// system sharing the Gram drop-threshold policy. Returns coefficients
/// and the retained/dropped mode counts.
fn solve_kkt(
    sys: &GramSystem,
    cmat: &DMatrix<Complex64>,
    d: &DVector<Complex64>,
) -> Result<(DVector<Complex64>, usize, usize)> {
    let n = sys.dim();
    let q = cmat.nrows();
    // Basis rescaling by the Gram diagonal tames monomial ill-conditioning.
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let v = sys.matrix[(i, i)].re;
            if v > 0.0 {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut z = DMatrix::zeros(n + q, n + q);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] = sys.matrix[(i, j)] * scale[i] * scale[j];
        }
    }
    for r in 0..q {
        for j in 0..n {
            let v = cmat[(r, j)] * scale[j];
            z[(n + r, j)] = v;
            z[(j, n + r)] = v.conj();
        }
    }
    let z = (z.adjoint() + &z) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(z);
    let lmax = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.abs()));
    if lmax <= 0.0 {
        return Err(Error::RankCollapse("KKT system is identically zero".into()));
    }
    let mut rank = 0usize;
    let mut rhs = DVector::zeros(n + q);
    for r in 0..q {
        rhs[n + r] = d[r];
    }
    let proj = eig.eigenvectors.adjoint() * &rhs;
    let mut sol_modal = DVector::zeros(n + q);
    for m in 0..n + q {
        if eig.eigenvalues[m].abs() > KKT_DROP * lmax {
            sol_modal[m] = proj[m] / Complex64::new(eig.eigenvalues[m], 0.0);
            rank += 1;
        }
    }
    let x = &eig.eigenvectors * sol_modal;
    let c = DVector::from_iterator(n, (0..n).map(|i| x[i] * scale[i]));
    Ok((c, rank, n + q - rank))
}

struct Solved {
    coefficients: DVector<Complex64>,
    norm_sq: f64,
    constraint_residual: f64,
    orthogonality_residual: f64,
    rank: usize,
    dropped: usize,
}

fn solve_constrained(problem: &ExtensionProblem, weight: &WeightSpec) -> Result<Solved> {
    let basis = problem
        .basis
        .clone()
        .unwrap_or_else(|| Basis::default_for(&problem.domain));
    let sys = domain_gram(&problem.domain, weight, &basis, problem.resolution)?;
    let (cmat, d) = constraints(&basis, &problem.variety, &problem.datum)?;
    let (c, rank, dropped) = solve_kkt(&sys, &cmat, &d)?;
    // Feasibility: the span must actually interpolate the datum.
    let resid_vec = &cmat * &c - &d;
    let scale = d.iter().fold(1.0f64, |a, v| a.max(v.norm()));
    let constraint_residual = resid_vec.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if constraint_residual > CONSTRAINT_TOL * scale {
        return Err(Error::Infeasible(constraint_residual));
    }
    let norm_sq = sys.norm_sq(&c);
    // Minimality: F ⊥ I(V) ∩ span. Optimality means M c ∈ range(C†), so
    // the component of M c orthogonal to range(C†) bounds |⟨F, h⟩| for
    // every h in the null space of C. Reported as a relative residual.
    let svd = cmat.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let w = &sys.matrix * &c;
    let mut w_perp = w.clone();
    for r in 0..v_t.nrows() {
        if svd.singular_values.get(r).copied().unwrap_or(0.0) <= 1e-12 * smax.max(1e-300) {
            continue;
        }
        let u = v_t.row(r).adjoint();
        let coef = (u.adjoint() * &w)[(0, 0)];
        w_perp -= u * coef;
    }
    let ortho = w_perp.norm() / w.norm().max(1e-300);
    Ok(Solved {
        coefficients: c,
        norm_sq,
        constraint_residual,
        orthogonality_residual: ortho,
        rank,
        dropped,
    })
}

/// L²-minimal extension of the datum with bound `σ_k ∫_V |f|² e^{−φ+kB}`.
pub fn minimal_extension(problem: &ExtensionProblem) -> Result<ExtensionResult> {
    let solved = solve_constrained(problem, &problem.weight)?;
    let f = datum_fn(&problem.datum);
    let rhs = restriction_norm(
        &problem.variety,
        &f,
        |p| problem.weight.eval(p),
        |p| (problem.b_field)(p),
        problem.k,
        problem.resolution.max(64),
    )?;
    finish(problem, solved, rhs)
}

fn finish(problem: &ExtensionProblem, solved: Solved, bound: f64) -> Result<ExtensionResult> {
    let _ = problem;
    let ratio = if bound > 0.0 {
        solved.norm_sq / bound
    } else if solved.norm_sq.abs() < 1e-12 {
        0.0
    } else {
        return Err(Error::InvalidSpec(
            "zero bound with a nonzero extension".into(),
        ));
    };
    Ok(ExtensionResult {
        coefficients: solved.coefficients.iter().cloned().collect(),
        norm_sq: solved.norm_sq,
        bound,
        ratio,
        constraint_residual: solved.constraint_residual,
        orthogonality_residual: solved.orthogonality_residual,
        rank: solved.rank,
        dropped: solved.dropped,
    })
}

/// Adjoint (form-level) extension `F₀ = f ∧ dg`: checks `|g| ≤ 1` on the
/// domain and `dg ≠ 0` along V, folds the (constant) transverse Jacobian
/// of g into the datum, and reuses the function-level solver. With the
/// normalized form convention, form integrals equal coefficient
/// integrals, so the bound is the function-case `σ_k ∫_V |f|² e^{−φ+kB}`.
pub fn adjoint_extension<G>(problem: &ExtensionProblem, g: G) -> Result<ExtensionResult>
where
    G: Fn(&Point) -> Complex64,
{
    let res = default_resolution(&problem.domain, problem.resolution);
    let rule = quadrature(&problem.domain, res)?;
    let mut gmax = 0.0f64;
    for p in &rule.nodes {
        gmax = gmax.max(g(p).norm());
    }
    if gmax > 1.0 + 1e-8 {
        return Err(Error::Hypothesis(format!(
            "adjoint datum requires |g| <= 1 on the domain, found {gmax:.6}"
        )));
    }
    // Transverse derivative of g along V by central complex differences.
    let h = 1e-5;
    let vnodes = problem.variety.rule(32).nodes;
    let mut jac: Option<Complex64> = None;
    for p in &vnodes {
        let (plus, minus) = match problem.variety {
            Variety::Point { .. } if p.dim() == 1 => (
                Point::one(p.z1() + h),
                Point::one(p.z1() - h),
            ),
            _ => (
                Point::two(p.z1() + h, p.z2()),
                Point::two(p.z1() - h, p.z2()),
            ),
        };
        let d = (g(&plus) - g(&minus)) / Complex64::new(2.0 * h, 0.0);
        if d.norm() < 1e-8 {
            return Err(Error::Hypothesis(format!(
                "dg vanishes on V (|dg| = {:.3e})",
                d.norm()
            )));
        }
        match jac {
            None => jac = Some(d),
            Some(j) if (j - d).norm() > 1e-6 * j.norm().max(1.0) => {
                return Err(Error::InvalidSpec(
                    "non-constant transverse Jacobian of g along V is not supported".into(),
                ));
            }
            _ => {}
        }
    }
    let jac = jac.expect("variety rule is nonempty");
    let scaled_datum = match &problem.datum {
        Datum::Value(v) => Datum::Value(v * jac),
        Datum::Coeffs(cs) => Datum::Coeffs(cs.iter().map(|c| c * jac).collect()),
    };
    let mut scaled = problem.clone();
    scaled.datum = scaled_datum;
    let solved = solve_constrained(&scaled, &scaled.weight)?;
    // Bound from the original form datum f (not f·dg).
    let f = datum_fn(&problem.datum);
    let rhs = restriction_norm(
        &problem.variety,
        &f,
        |p| problem.weight.eval(p),
        |p| (problem.b_field)(p),
        problem.k,
        problem.resolution.max(64),
    )?;
    finish(problem, solved, rhs)
}

/// Generalized-weight bound: solves the minimal extension in the weight
/// `φ + kψ` and certifies `∫_D |F|²e^{−φ−kψ} ≤ (k/δ+1)·σ_k ∫_V |f|²e^{−φ+kB}`
/// after sampling the hypotheses `G < ψ` and `dd^cφ ≥ δ·dd^cψ`.
pub fn generalized_bound_check<S>(
    problem: &ExtensionProblem,
    model: &GreenModel,
    psi: S,
    delta: f64,
) -> Result<ExtensionResult>
where
    S: Fn(&Point) -> f64 + Clone + Send + Sync + 'static,
{
    if delta <= 0.0 {
        return Err(Error::InvalidSpec(format!("delta must be positive, got {delta}")));
    }
    if problem.domain.dim() != 1 {
        return Err(Error::InvalidSpec(
            "generalized-bound probes are implemented for planar domains".into(),
        ));
    }
    let res = default_resolution(&problem.domain, problem.resolution);
    let rule = quadrature(&problem.domain, res)?;
    for (i, p) in rule.nodes.iter().enumerate() {
        if !(model.eval(p) < psi(p) + 1e-9) {
            return Err(Error::Hypothesis(format!(
                "G >= psi at node {i} ({p:?})"
            )));
        }
    }
    // dd^c comparison by 5-point Laplacian stencils at a probe subset.
    let h = 1e-4;
    let stride = (rule.len() / 32).max(1);
    for p in rule.nodes.iter().step_by(stride) {
        let z = p.z1();
        if problem.domain.boundary_distance(z).unwrap_or(0.0) < 4.0 * h {
            continue;
        }
        let lap = |f: &dyn Fn(&Point) -> f64| {
            let at = |dz: Complex64| f(&Point::one(z + dz));
            (at(Complex64::new(h, 0.0))
                + at(Complex64::new(-h, 0.0))
                + at(Complex64::new(0.0, h))
                + at(Complex64::new(0.0, -h))
                - 4.0 * at(Complex64::new(0.0, 0.0)))
                / (h * h)
        };
        let lphi = lap(&|q: &Point| problem.weight.eval(q));
        let lpsi = lap(&psi);
        let tol = 1e-4 * (lphi.abs() + lpsi.abs() + 1.0);
        if lphi - delta * lpsi < -tol {
            return Err(Error::Hypothesis(format!(
                "dd^c phi >= delta dd^c psi fails at {z} ({lphi:.6} < {delta}*{lpsi:.6})"
            )));
        }
    }
    let k = problem.k as f64;
    let base = problem.weight.clone();
    let psi2 = psi.clone();
    let mut shifted = problem.clone();
    shifted.weight = WeightSpec::Custom(std::sync::Arc::new(move |p: &Point| {
        base.eval(p) + k * psi2(p)
    }));
    let solved = solve_constrained(&shifted, &shifted.weight)?;
    let f = datum_fn(&problem.datum);
    let rhs = restriction_norm(
        &problem.variety,
        &f,
        |p| problem.weight.eval(p),
        |p| (problem.b_field)(p),
        problem.k,
        problem.resolution.max(64),
    )?;
    let bound = (problem.k as f64 / delta + 1.0) * rhs;
    finish(problem, solved, bound)
}
