use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::domain::{Domain, Point};
use super::quadrature::{polar_rule, QuadratureRule};

/// Which C² domain a `{z₁ = c}` slice lives in. The slice of the ball
/// is a disk of radius `√(1 − |c|²)`; the slice of the bidisk is the
/// unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceAmbient {
    Ball2,
    Bidisk,
}

/// A subvariety V ⊂ D supporting restriction data: either a single
/// point (codimension n) or the zero locus of `g(z) = z₁ − c` in a C²
/// product/ball domain (codimension 1), with explicit parametrization
/// for induced-measure integration.
#[derive(Clone, Debug)]
pub enum Variety {
    Point { a: Point },
    Slice { c: Complex64, ambient: SliceAmbient },
}

/// Serializable variety description used in problem spec files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarietySpec {
    /// `a` is `[x, y]` in C¹ or `[x1, y1, x2, y2]` in C².
    Point { a: Vec<f64> },
    SliceZ1 { c: [f64; 2], ambient: SliceAmbient },
}

impl VarietySpec {
    /// Validates against the ambient domain and realizes the variety.
    pub fn realize(&self, domain: &Domain) -> Result<Variety> {
        match self {
            VarietySpec::Point { a } => {
                let p = match a.len() {
                    2 => Point::one(Complex64::new(a[0], a[1])),
                    4 => Point::two(Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])),
                    n => {
                        return Err(Error::InvalidSpec(format!(
                            "point variety needs 2 or 4 coordinates, got {n}"
                        )))
                    }
                };
                if p.dim() != domain.dim() {
                    return Err(Error::InvalidSpec(format!(
                        "variety dimension {} does not match domain dimension {}",
                        p.dim(),
                        domain.dim()
                    )));
                }
                if !domain.contains(&p) {
                    return Err(Error::InvalidSpec("point variety lies outside the domain".into()));
                }
                Ok(Variety::Point { a: p })
            }
            VarietySpec::SliceZ1 { c, ambient } => {
                let c = Complex64::new(c[0], c[1]);
                let ok = match ambient {
                    SliceAmbient::Ball2 => {
                        matches!(domain, Domain::Ball2) && c.norm() < 1.0
                    }
                    SliceAmbient::Bidisk => {
                        matches!(domain, Domain::Bidisk) && c.norm() < 1.0
                    }
                };
                if !ok {
                    return Err(Error::InvalidSpec(
                        "slice variety must match its ambient domain and satisfy |c| < 1".into(),
                    ));
                }
                Ok(Variety::Slice {
                    c,
                    ambient: *ambient,
                })
            }
        }
    }
}

impl Variety {
    /// Codimension k of V in its ambient domain.
    pub fn codim(&self, domain: &Domain) -> usize {
        match self {
            Variety::Point { .. } => domain.dim(),
            Variety::Slice { .. } => 1,
        }
    }

    /// Euclidean distance d_V from a point to the variety.
    pub fn distance(&self, p: &Point) -> f64 {
        match self {
            Variety::Point { a } => p.dist(a),
            Variety::Slice { c, .. } => (p.z1() - c).norm(),
        }
    }

    /// Radius of the slice disk (slices only).
    pub fn slice_radius(&self) -> Option<f64> {
        match self {
            Variety::Point { .. } => None,
            Variety::Slice { c, ambient } => Some(match ambient {
                SliceAmbient::Ball2 => (1.0 - c.norm_sqr()).max(0.0).sqrt(),
                SliceAmbient::Bidisk => 1.0,
            }),
        }
    }

    /// Induced-euclidean-measure quadrature over V. A point carries an
    /// atom of mass one; a slice carries a polar rule over its disk with
    /// nodes embedded back into C².
    pub fn rule(&self, resolution: u32) -> QuadratureRule {
        match self {
            Variety::Point { a } => QuadratureRule {
                nodes: vec![*a],
                weights: vec![1.0],
                resolution,
                refinement: 0,
            },
            Variety::Slice { c, .. } => {
                let rho = self.slice_radius().expect("slice has a radius");
                let res = resolution.max(8) as usize;
                let flat = polar_rule(Complex64::new(0.0, 0.0), 0.0, rho, res, 2 * res);
                QuadratureRule {
                    nodes: flat
                        .nodes
                        .iter()
                        .map(|p| Point::two(*c, p.z1()))
                        .collect(),
                    weights: flat.weights,
                    resolution,
                    refinement: 0,
                }
            }
        }
    }

    /// Induced volume of V (an atom counts as 1).
    pub fn volume(&self) -> f64 {
        match self {
            Variety::Point { .. } => 1.0,
            Variety::Slice { .. } => {
                let rho = self.slice_radius().unwrap();
                std::f64::consts::PI * rho * rho
            }
        }
    }

    /// Sample points at distance exactly `d` from V, for tube-grid
    /// estimates of the defect bound.
    pub fn tube_points(&self, d: f64, n_ang: usize, n_slice: u32) -> Vec<Point> {
        match self {
            Variety::Point { a } => {
                if a.dim() == 1 {
                    (0..n_ang)
                        .map(|j| {
                            let th = 2.0 * std::f64::consts::PI * j as f64 / n_ang as f64;
                            Point::one(a.z1() + Complex64::from_polar(d, th))
                        })
                        .collect()
                } else {
                    // Sphere of radius d around a point in C²: sample a
                    // deterministic product grid of the two phases and the
                    // split of d between the coordinates.
                    let mut pts = Vec::new();
                    for s in 0..4 {
                        let alpha = (s as f64 + 0.5) / 4.0 * std::f64::consts::FRAC_PI_2;
                        let (d1, d2) = (d * alpha.cos(), d * alpha.sin());
                        for j in 0..n_ang {
                            let t1 = 2.0 * std::f64::consts::PI * j as f64 / n_ang as f64;
                            for k in 0..4 {
                                let t2 = 2.0 * std::f64::consts::PI * k as f64 / 4.0;
                                pts.push(Point::two(
                                    a.z1() + Complex64::from_polar(d1, t1),
                                    a.z2() + Complex64::from_polar(d2, t2),
                                ));
                            }
                        }
                    }
                    pts
                }
            }
            Variety::Slice { c, .. } => {
                let slice = self.rule(n_slice);
                let mut pts = Vec::new();
                for j in 0..n_ang {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / n_ang as f64;
                    let z1 = c + Complex64::from_polar(d, th);
                    for p in &slice.nodes {
                        // Shrink z2 slightly so the tube point stays inside
                        // the ambient ball when the slice is maximal.
                        pts.push(Point::two(z1, p.z2() * 0.9));
                    }
                }
                pts
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};
    use std::f64::consts::PI;

    #[test]
    fn slice_rule_integrates_constants_to_volume() {
        let d = build_domain(&DomainSpec::Bidisk).unwrap();
        let v = VarietySpec::SliceZ1 {
            c: [0.0, 0.0],
            ambient: SliceAmbient::Bidisk,
        }
        .realize(&d)
        .unwrap();
        let rule = v.rule(32);
        assert!((rule.volume() - PI).abs() < 1e-10);
        assert!((v.volume() - PI).abs() < 1e-15);
    }

    #[test]
    fn ball_slice_radius_shrinks() {
        let d = build_domain(&DomainSpec::Ball2).unwrap();
        let v = VarietySpec::SliceZ1 {
            c: [0.6, 0.0],
            ambient: SliceAmbient::Ball2,
        }
        .realize(&d)
        .unwrap();
        assert!((v.slice_radius().unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn outside_point_rejected() {
        let d = build_domain(&DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        })
        .unwrap();
        assert!(VarietySpec::Point { a: vec![2.0, 0.0] }.realize(&d).is_err());
    }

    #[test]
    fn distances() {
        let d = build_domain(&DomainSpec::Bidisk).unwrap();
        let v = VarietySpec::SliceZ1 {
            c: [0.0, 0.0],
            ambient: SliceAmbient::Bidisk,
        }
        .realize(&d)
        .unwrap();
        let p = Point::two(Complex64::new(0.3, 0.0), Complex64::new(0.9, 0.0));
        assert!((v.distance(&p) - 0.3).abs() < 1e-15);
    }
}
