use num_complex::Complex64;

use crate::geometry::{Domain, Point};

/// Finite holomorphic basis over which Gram systems are assembled:
/// monomials for disk-like domains, Laurent monomials for the annulus,
/// total-degree monomials for the C² domains.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    /// `(z − center)^j`, j = 0..=degree.
    Monomials { center: Complex64, degree: usize },
    /// `z^j`, j = −jmax..=jmax.
    Laurent { jmax: i32 },
    /// `z₁^i z₂^j`, i + j ≤ total_degree, ordered by total degree.
    Monomials2 { total_degree: usize },
}

impl Basis {
    /// Default basis sizes: degree 25 on planar simply connected
    /// domains, Laurent |j| ≤ 50 on the annulus, total degree 12 in C².
    pub fn default_for(domain: &Domain) -> Basis {
        match domain {
            Domain::Annulus { .. } => Basis::Laurent { jmax: 50 },
            Domain::Ball2 | Domain::Bidisk => Basis::Monomials2 { total_degree: 12 },
            Domain::Disk { center, .. } => Basis::Monomials {
                center: *center,
                degree: 25,
            },
            _ => Basis::Monomials {
                center: Complex64::new(0.0, 0.0),
                degree: 25,
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::Monomials { degree, .. } => degree + 1,
            Basis::Laurent { jmax } => (2 * jmax + 1) as usize,
            Basis::Monomials2 { total_degree } => (total_degree + 1) * (total_degree + 2) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exponent pairs in basis order (C² bases only).
    pub fn indices2(&self) -> Option<Vec<(usize, usize)>> {
        match self {
            Basis::Monomials2 { total_degree } => {
                let mut idx = Vec::new();
                for d in 0..=*total_degree {
                    for i in 0..=d {
                        idx.push((i, d - i));
                    }
                }
                Some(idx)
            }
            _ => None,
        }
    }

    /// Evaluates every basis element at a point, in basis order.
    pub fn eval_into(&self, p: &Point, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.len());
        match self {
            Basis::Monomials { center, degree } => {
                let z = p.z1() - center;
                let mut pw = Complex64::new(1.0, 0.0);
                for j in 0..=*degree {
                    out[j] = pw;
                    pw *= z;
                }
            }
            Basis::Laurent { jmax } => {
                let z = p.z1();
                let zi = Complex64::new(1.0, 0.0) / z;
                let j0 = *jmax as usize;
                out[j0] = Complex64::new(1.0, 0.0);
                let mut pos = Complex64::new(1.0, 0.0);
                let mut neg = Complex64::new(1.0, 0.0);
                for j in 1..=(*jmax as usize) {
                    pos *= z;
                    neg *= zi;
                    out[j0 + j] = pos;
                    out[j0 - j] = neg;
                }
            }
            Basis::Monomials2 { total_degree } => {
                let (z1, z2) = (p.z1(), p.z2());
                let d = *total_degree;
                let mut p1 = vec![Complex64::new(1.0, 0.0); d + 1];
                let mut p2 = vec![Complex64::new(1.0, 0.0); d + 1];
                for j in 1..=d {
                    p1[j] = p1[j - 1] * z1;
                    p2[j] = p2[j - 1] * z2;
                }
                let mut k = 0;
                for deg in 0..=d {
                    for i in 0..=deg {
                        out[k] = p1[i] * p2[deg - i];
                        k += 1;
                    }
                }
            }
        }
    }

    pub fn eval(&self, p: &Point) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.eval_into(p, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_ordering() {
        let b = Basis::Laurent { jmax: 2 };
        assert_eq!(b.len(), 5);
        let z = Complex64::new(2.0, 0.0);
        let vals = b.eval(&Point::one(z));
        assert!((vals[0].re - 0.25).abs() < 1e-15); // z^{-2}
        assert!((vals[2].re - 1.0).abs() < 1e-15); // z^0
        assert!((vals[4].re - 4.0).abs() < 1e-15); // z^2
    }

    #[test]
    fn monomials2_count_and_order() {
        let b = Basis::Monomials2 { total_degree: 2 };
        assert_eq!(b.len(), 6);
        assert_eq!(
            b.indices2().unwrap(),
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
        );
        let p = Point::two(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0));
        let vals = b.eval(&p);
        assert!((vals[4].re - 6.0).abs() < 1e-15); // z1 z2
    }
}
