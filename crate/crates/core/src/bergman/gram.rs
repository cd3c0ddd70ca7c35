use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureRule};

use super::basis::Basis;

/// Relative eigenvalue cutoff below which modes are treated as numerically
/// in the kernel of the Gram matrix. Dropping modes shrinks the computed
/// reproducing kernel, so truncation only weakens lower bounds.
const DROP_TOL: f64 = 1e-12;

/// Hermitian Gram system `M_ij = ∫ conj(b_i) b_j e^{−w}` over a finite
/// basis, held together with a stabilized pseudo-inverse: the matrix is
/// diagonally rescaled, eigendecomposed, and small modes dropped.
#[derive(Clone, Debug)]
pub struct GramSystem {
    pub basis: Basis,
    pub matrix: DMatrix<Complex64>,
    scale: DVector<f64>,
    eigvecs: DMatrix<Complex64>,
    inv_eigvals: DVector<f64>,
    pub rank: usize,
    pub dropped: usize,
}

impl GramSystem {
    /// Builds the stabilized system from an assembled Hermitian matrix.
    pub fn from_matrix(basis: Basis, matrix: DMatrix<Complex64>) -> Result<GramSystem> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidSpec(format!(
                "gram matrix is {}x{}, basis has {n} elements",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut herm_defect = 0.0f64;
        let mut diag_max = 0.0f64;
        for i in 0..n {
            diag_max = diag_max.max(matrix[(i, i)].re.abs());
            for j in i..n {
                herm_defect = herm_defect.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if diag_max == 0.0 || !diag_max.is_finite() {
            return Err(Error::RankCollapse(
                "gram matrix has no usable diagonal".into(),
            ));
        }
        if herm_defect > 1e-8 * diag_max {
            return Err(Error::InvalidSpec(format!(
                "gram matrix is not Hermitian (defect {herm_defect:.3e})"
            )));
        }
        // Diagonal rescaling keeps the eigensolve well conditioned when
        // basis elements have wildly different norms.
        let scale = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let d = matrix[(i, i)].re;
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    0.0
                }
            }),
        );
        let mut scaled = matrix.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= scale[i] * scale[j];
            }
        }
        // Symmetrize exactly so the eigensolve sees a Hermitian input.
        let scaled = (scaled.adjoint() + &scaled) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(scaled);
        let lam_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        if lam_max <= 0.0 {
            return Err(Error::RankCollapse(
                "gram matrix has no positive eigenvalues".into(),
            ));
        }
        let keep: Vec<usize> = (0..n)
            .filter(|&k| eig.eigenvalues[k] > DROP_TOL * lam_max)
            .collect();
        if keep.is_empty() {
            return Err(Error::RankCollapse(
                "all gram eigenvalues below the drop threshold".into(),
            ));
        }
        let rank = keep.len();
        let mut eigvecs = DMatrix::zeros(n, rank);
        let mut inv_eigvals = DVector::zeros(rank);
        for (col, &k) in keep.iter().enumerate() {
            eigvecs.set_column(col, &eig.eigenvectors.column(k));
            inv_eigvals[col] = 1.0 / eig.eigenvalues[k];
        }
        Ok(GramSystem {
            basis,
            matrix,
            scale,
            eigvecs,
            inv_eigvals,
            rank,
            dropped: n - rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `M⁺ u` through the retained eigenmodes.
    pub fn apply_inv(&self, u: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.dim();
        let su = DVector::from_iterator(
            n,
            u.iter()
                .zip(self.scale.iter())
                .map(|(v, s)| v * Complex64::new(*s, 0.0)),
        );
        let mut proj = self.eigvecs.adjoint() * su;
        for k in 0..self.rank {
            proj[k] *= Complex64::new(self.inv_eigvals[k], 0.0);
        }
        let back = &self.eigvecs * proj;
        DVector::from_iterator(
            n,
            back.iter()
                .zip(self.scale.iter())
                .map(|(v, s)| v * Complex64::new(*s, 0.0)),
        )
    }

    /// Quadratic form `u† M⁺ u` (real and nonnegative).
    pub fn quad_form_inv(&self, u: &DVector<Complex64>) -> f64 {
        let n = self.dim();
        let su = DVector::from_iterator(
            n,
            u.iter()
                .zip(self.scale.iter())
                .map(|(v, s)| v * Complex64::new(*s, 0.0)),
        );
        let proj = self.eigvecs.adjoint() * su;
        let mut acc = 0.0;
        for k in 0..self.rank {
            acc += self.inv_eigvals[k] * proj[k].norm_sqr();
        }
        acc
    }

    /// Squared norm `c† M c` of the element with coefficients c.
    pub fn norm_sq(&self, c: &DVector<Complex64>) -> f64 {
        (c.adjoint() * &self.matrix * c)[(0, 0)].re
    }

    /// Reproducing kernel value `K(a) = v† M⁺ v` with `v_i = conj(b_i(a))`.
    pub fn kernel_value(&self, a: &Point) -> f64 {
        let vals = self.basis.eval(a);
        let v = DVector::from_iterator(vals.len(), vals.iter().map(|z| z.conj()));
        self.quad_form_inv(&v)
    }

    /// Dual norm squared of the functional with pairings `w_i = ⟨ξ, b_i⟩`:
    /// `‖ξ‖² = conj(w)† M⁺ conj(w)`. Errors when the pairing vector lies
    /// entirely in the dropped eigenspace (the functional is invisible to
    /// the retained modes).
    pub fn dual_norm_sq(&self, pairings: &[Complex64]) -> Result<f64> {
        if pairings.len() != self.dim() {
            return Err(Error::InvalidSpec(format!(
                "pairing vector has {} entries, basis has {}",
                pairings.len(),
                self.dim()
            )));
        }
        let u = DVector::from_iterator(pairings.len(), pairings.iter().map(|z| z.conj()));
        let norm = u.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if self.dropped > 0 {
            let su = DVector::from_iterator(
                self.dim(),
                u.iter()
                    .zip(self.scale.iter())
                    .map(|(v, s)| v * Complex64::new(*s, 0.0)),
            );
            let snorm = su.norm();
            let proj = self.eigvecs.adjoint() * su;
            if snorm > 0.0 && proj.norm() < 1e-10 * snorm {
                return Err(Error::RankCollapse(
                    "functional is supported on dropped gram modes".into(),
                ));
            }
        }
        Ok(self.quad_form_inv(&u))
    }
}

/// Caches the node-by-basis evaluation matrix of a quadrature rule so a
/// family of weights (one Gram system per t) reuses the basis sweep.
pub struct GramFactory {
    basis: Basis,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    bmat: DMatrix<Complex64>,
}

impl GramFactory {
    pub fn new(rule: &QuadratureRule, basis: Basis) -> Result<GramFactory> {
        if rule.is_empty() {
            return Err(Error::EmptyRule("gram factory needs a nonempty rule".into()));
        }
        let n = rule.len();
        let m = basis.len();
        let mut bmat = DMatrix::zeros(n, m);
        let mut row = vec![Complex64::new(0.0, 0.0); m];
        for (i, p) in rule.nodes.iter().enumerate() {
            basis.eval_into(p, &mut row);
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteNode {
                        index: i,
                        location: format!("{:?}", p),
                        value: v.norm(),
                    });
                }
                bmat[(i, j)] = *v;
            }
        }
        Ok(GramFactory {
            basis,
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            bmat,
        })
    }

    /// Assembles `M = B† diag(q e^{−w}) B` for the given weight field.
    pub fn gram<W: Fn(&Point) -> f64>(&self, weight: W) -> Result<GramSystem> {
        let n = self.nodes.len();
        let mut wb = self.bmat.clone();
        for i in 0..n {
            let w = weight(&self.nodes[i]);
            if !w.is_finite() && w != f64::INFINITY {
                return Err(Error::NonFiniteNode {
                    index: i,
                    location: format!("{:?}", self.nodes[i]),
                    value: w,
                });
            }
            let f = self.weights[i] * (-w).exp();
            let fc = Complex64::new(f, 0.0);
            for j in 0..wb.ncols() {
                wb[(i, j)] *= fc;
            }
        }
        let m = self.bmat.adjoint() * wb;
        GramSystem::from_matrix(self.basis.clone(), m)
    }

    pub fn unweighted(&self) -> Result<GramSystem> {
        self.gram(|_| 0.0)
    }
}

/// One-shot Gram assembly over a quadrature rule.
pub fn gram<W: Fn(&Point) -> f64>(
    rule: &QuadratureRule,
    basis: &Basis,
    weight: W,
) -> Result<GramSystem> {
    GramFactory::new(rule, basis.clone())?.gram(weight)
}

/// Gram system of a radially symmetric configuration where the matrix is
/// diagonal with entries `m_j ≥ 0` (angular orthogonality).
pub fn gram_diagonal(basis: Basis, moments: &[f64]) -> Result<GramSystem> {
    if moments.len() != basis.len() {
        return Err(Error::InvalidSpec(format!(
            "{} moments for a basis of {} elements",
            moments.len(),
            basis.len()
        )));
    }
    let n = moments.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &v) in moments.iter().enumerate() {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidSpec(format!("bad diagonal moment m_{j} = {v}")));
        }
        m[(j, j)] = Complex64::new(v, 0.0);
    }
    GramSystem::from_matrix(basis, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, quadrature, DomainSpec};
    use std::f64::consts::PI;

    fn unit_disk_rule() -> QuadratureRule {
        let d = build_domain(&DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        })
        .unwrap();
        quadrature(&d, 64).unwrap()
    }

    #[test]
    fn disk_monomial_gram_is_diagonal() {
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 6,
        };
        let sys = gram(&unit_disk_rule(), &basis, |_| 0.0).unwrap();
        for j in 0..=6 {
            let want = PI / (j as f64 + 1.0);
            assert!(
                (sys.matrix[(j, j)].re - want).abs() < 1e-10,
                "m_{j} = {} vs {want}",
                sys.matrix[(j, j)].re
            );
        }
        assert!(sys.matrix[(0, 2)].norm() < 1e-10);
        assert_eq!(sys.dropped, 0);
    }

    #[test]
    fn disk_kernel_matches_closed_form() {
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 40,
        };
        let sys = gram(&unit_disk_rule(), &basis, |_| 0.0).unwrap();
        // K(a) = 1/(π(1−|a|²)²) on the unit disk.
        let a = Point::one(Complex64::new(0.5, 0.0));
        let want = 1.0 / (PI * (1.0 - 0.25f64).powi(2));
        let got = sys.kernel_value(&a);
        assert!((got - want).abs() < 1e-6 * want, "K(0.5) = {got} vs {want}");
    }

    #[test]
    fn annulus_laurent_moment() {
        let d = build_domain(&DomainSpec::Annulus {
            r_inner: 0.2,
            r_outer: 1.0,
        })
        .unwrap();
        let rule = quadrature(&d, 64).unwrap();
        let basis = Basis::Laurent { jmax: 3 };
        let sys = gram(&rule, &basis, |_| 0.0).unwrap();
        // ∫ |z^{-1}|² = 2π log(R2/R1) = 2π log 5.
        let j_m1 = 2usize; // index of z^{-1}
        let want = 2.0 * PI * 5.0f64.ln();
        assert!(
            (sys.matrix[(j_m1, j_m1)].re - want).abs() < 1e-8,
            "moment {} vs {want}",
            sys.matrix[(j_m1, j_m1)].re
        );
    }

    #[test]
    fn weighted_moment_disk() {
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 2,
        };
        // Weight |z|²: ∫ e^{−|z|²} = π(1 − e^{−1}).
        let sys = gram(&unit_disk_rule(), &basis, |p: &Point| p.z1().norm_sqr()).unwrap();
        let want = PI * (1.0 - (-1.0f64).exp());
        assert!(
            (sys.matrix[(0, 0)].re - want).abs() < 1e-10,
            "{} vs {want}",
            sys.matrix[(0, 0)].re
        );
    }

    #[test]
    fn pseudo_inverse_consistency() {
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 8,
        };
        let sys = gram(&unit_disk_rule(), &basis, |_| 0.0).unwrap();
        let u = DVector::from_fn(9, |i, _| Complex64::new(1.0 / (i as f64 + 1.0), 0.3));
        let x = sys.apply_inv(&u);
        let back = &sys.matrix * &x;
        assert!((back - &u).norm() < 1e-10);
        let qf = sys.quad_form_inv(&u);
        let direct = (u.adjoint() * &x)[(0, 0)].re;
        assert!((qf - direct).abs() < 1e-10 * qf.abs().max(1.0));
    }

    #[test]
    fn rank_deficient_matrix_truncates() {
        // Duplicate basis element: rank deficiency of exactly one.
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 1,
        };
        let sys = GramSystem::from_matrix(basis, m).unwrap();
        assert_eq!(sys.rank, 1);
        assert_eq!(sys.dropped, 1);
        // A pairing in the null direction is rejected.
        let err = sys.dual_norm_sq(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!(err.is_err());
        // A visible pairing still works: projection onto (1,1)/√2.
        let ok = sys
            .dual_norm_sq(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        assert!((ok - 1.0).abs() < 1e-12, "got {ok}");
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let basis = Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree: 1,
        };
        assert!(GramSystem::from_matrix(basis, m).is_err());
    }
}
