use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of C^n with n ≤ 2. For n = 1 only the first coordinate is used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [Complex64; 2],
    dim: usize,
}

impl Point {
    pub fn one(z: Complex64) -> Self {
        Point {
            coords: [z, Complex64::new(0.0, 0.0)],
            dim: 1,
        }
    }

    pub fn two(z1: Complex64, z2: Complex64) -> Self {
        Point {
            coords: [z1, z2],
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First (or only) coordinate.
    pub fn z1(&self) -> Complex64 {
        self.coords[0]
    }

    pub fn z2(&self) -> Complex64 {
        self.coords[1]
    }

    /// Euclidean distance in C^n.
    pub fn dist(&self, other: &Point) -> f64 {
        let d1 = self.coords[0] - other.coords[0];
        let d2 = self.coords[1] - other.coords[1];
        (d1.norm_sqr() + d2.norm_sqr()).sqrt()
    }

    /// Squared euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.coords[0].norm_sqr() + self.coords[1].norm_sqr()
    }
}

/// Serializable description of a domain, the `{kind, parameters}` part of
/// the domain spec file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { center: [f64; 2], radius: f64 },
    Annulus { r_inner: f64, r_outer: f64 },
    Ball2,
    Bidisk,
    Polygon { vertices: Vec<[f64; 2]> },
}

/// On-disk domain spec document: `{kind, parameters, resolution, refinement}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainFile {
    #[serde(flatten)]
    pub spec: DomainSpec,
    #[serde(default)]
    pub resolution: Option<u32>,
    #[serde(default)]
    pub refinement: Option<u32>,
}

/// A realized region of C^n with indicator, bounding box and analytic
/// tags used by the fast quadrature / Green's function paths.
#[derive(Clone)]
pub enum Domain {
    Disk {
        center: Complex64,
        radius: f64,
    },
    Annulus {
        r_inner: f64,
        r_outer: f64,
    },
    Ball2,
    Bidisk,
    Polygon {
        vertices: Vec<Complex64>,
    },
    /// Planar implicit region: indicator plus a bounding box that
    /// strictly contains the closure of the region.
    Implicit {
        bbox: [f64; 4],
        indicator: Arc<dyn Fn(Complex64) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Disk { center, radius } => {
                write!(f, "Disk(center={center}, radius={radius})")
            }
            Domain::Annulus { r_inner, r_outer } => write!(f, "Annulus({r_inner}, {r_outer})"),
            Domain::Ball2 => write!(f, "Ball2"),
            Domain::Bidisk => write!(f, "Bidisk"),
            Domain::Polygon { vertices } => write!(f, "Polygon({} vertices)", vertices.len()),
            Domain::Implicit { bbox, .. } => write!(f, "Implicit(bbox={bbox:?})"),
        }
    }
}

/// Validates a [`DomainSpec`] and realizes it as a [`Domain`].
pub fn build_domain(spec: &DomainSpec) -> Result<Domain> {
    match spec {
        DomainSpec::Disk { center, radius } => {
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "disk radius must be positive and finite, got {radius}"
                )));
            }
            Ok(Domain::Disk {
                center: Complex64::new(center[0], center[1]),
                radius: *radius,
            })
        }
        DomainSpec::Annulus { r_inner, r_outer } => {
            if !(*r_inner > 0.0 && r_inner < r_outer) || !r_outer.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "annulus needs 0 < r_inner < r_outer, got ({r_inner}, {r_outer})"
                )));
            }
            Ok(Domain::Annulus {
                r_inner: *r_inner,
                r_outer: *r_outer,
            })
        }
        DomainSpec::Ball2 => Ok(Domain::Ball2),
        DomainSpec::Bidisk => Ok(Domain::Bidisk),
        DomainSpec::Polygon { vertices } => {
            if vertices.len() < 3 {
                return Err(Error::InvalidSpec(format!(
                    "polygon needs at least 3 vertices, got {}",
                    vertices.len()
                )));
            }
            let vs: Vec<Complex64> = vertices
                .iter()
                .map(|v| Complex64::new(v[0], v[1]))
                .collect();
            if shoelace_area(&vs).abs() < 1e-14 {
                return Err(Error::InvalidSpec("polygon is degenerate".into()));
            }
            Ok(Domain::Polygon { vertices: vs })
        }
    }
}

fn shoelace_area(vs: &[Complex64]) -> f64 {
    let n = vs.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn point_in_polygon(vs: &[Complex64], z: Complex64) -> bool {
    // Ray casting along +x.
    let n = vs.len();
    let mut inside = false;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if x > z.re {
                inside = !inside;
            }
        }
    }
    inside
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball2 | Domain::Bidisk => 2,
            _ => 1,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Domain::Disk { center, radius } => (p.z1() - center).norm() < *radius,
            Domain::Annulus { r_inner, r_outer } => {
                let r = p.z1().norm();
                r > *r_inner && r < *r_outer
            }
            Domain::Ball2 => p.z1().norm_sqr() + p.z2().norm_sqr() < 1.0,
            Domain::Bidisk => p.z1().norm() < 1.0 && p.z2().norm() < 1.0,
            Domain::Polygon { vertices } => point_in_polygon(vertices, p.z1()),
            Domain::Implicit { indicator, .. } => indicator(p.z1()),
        }
    }

    /// Bounding box `[x0, x1, y0, y1]` for planar domains. The box is
    /// padded so it strictly contains the closure of the region.
    pub fn bbox_planar(&self) -> Option<[f64; 4]> {
        match self {
            Domain::Disk { center, radius } => {
                let r = radius * 1.001;
                Some([center.re - r, center.re + r, center.im - r, center.im + r])
            }
            Domain::Annulus { r_outer, .. } => {
                let r = r_outer * 1.001;
                Some([-r, r, -r, r])
            }
            Domain::Polygon { vertices } => {
                let mut x0 = f64::INFINITY;
                let mut x1 = f64::NEG_INFINITY;
                let mut y0 = f64::INFINITY;
                let mut y1 = f64::NEG_INFINITY;
                for v in vertices {
                    x0 = x0.min(v.re);
                    x1 = x1.max(v.re);
                    y0 = y0.min(v.im);
                    y1 = y1.max(v.im);
                }
                let px = 1e-3 * (x1 - x0).max(1e-9);
                let py = 1e-3 * (y1 - y0).max(1e-9);
                Some([x0 - px, x1 + px, y0 - py, y1 + py])
            }
            Domain::Implicit { bbox, .. } => Some(*bbox),
            Domain::Ball2 | Domain::Bidisk => None,
        }
    }

    /// Exact euclidean volume where a closed form exists.
    pub fn exact_volume(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match self {
            Domain::Disk { radius, .. } => Some(PI * radius * radius),
            Domain::Annulus { r_inner, r_outer } => {
                Some(PI * (r_outer * r_outer - r_inner * r_inner))
            }
            Domain::Ball2 => Some(PI * PI / 2.0),
            Domain::Bidisk => Some(PI * PI),
            Domain::Polygon { vertices } => Some(shoelace_area(vertices).abs()),
            Domain::Implicit { .. } => None,
        }
    }

    /// Distance from an interior point to the boundary (planar domains).
    pub fn boundary_distance(&self, z: Complex64) -> Option<f64> {
        match self {
            Domain::Disk { center, radius } => Some(radius - (z - center).norm()),
            Domain::Annulus { r_inner, r_outer } => {
                let r = z.norm();
                Some((r - r_inner).min(r_outer - r))
            }
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut d = f64::INFINITY;
                for i in 0..n {
                    d = d.min(dist_to_segment(z, vertices[i], vertices[(i + 1) % n]));
                }
                Some(d)
            }
            Domain::Implicit { indicator, .. } => {
                // Radial bisection from z along a fan of directions.
                let mut d = f64::INFINITY;
                for j in 0..64 {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
                    let dir = Complex64::new(th.cos(), th.sin());
                    let mut lo = 0.0;
                    let mut hi = 1e-3;
                    while indicator(z + dir * hi) && hi < 1e6 {
                        lo = hi;
                        hi *= 2.0;
                    }
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if indicator(z + dir * mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    d = d.min(0.5 * (lo + hi));
                }
                Some(d)
            }
            Domain::Ball2 | Domain::Bidisk => None,
        }
    }

    /// `n` points on the boundary of a planar domain (each connected
    /// component gets its own set for the annulus), in deterministic
    /// order. Used by the MFS solver and by boundary-residual probes.
    pub fn boundary_points(&self, n: usize) -> Result<Vec<Complex64>> {
        use std::f64::consts::PI;
        match self {
            Domain::Disk { center, radius } => Ok((0..n)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / n as f64;
                    center + Complex64::from_polar(*radius, th)
                })
                .collect()),
            Domain::Annulus { r_inner, r_outer } => {
                let mut pts = Vec::with_capacity(2 * n);
                for j in 0..n {
                    let th = 2.0 * PI * j as f64 / n as f64;
                    pts.push(Complex64::from_polar(*r_outer, th));
                }
                for j in 0..n {
                    let th = 2.0 * PI * j as f64 / n as f64;
                    pts.push(Complex64::from_polar(*r_inner, th));
                }
                Ok(pts)
            }
            Domain::Polygon { vertices } => {
                let m = vertices.len();
                let lengths: Vec<f64> = (0..m)
                    .map(|i| (vertices[(i + 1) % m] - vertices[i]).norm())
                    .collect();
                let total: f64 = lengths.iter().sum();
                let mut pts = Vec::with_capacity(n);
                for j in 0..n {
                    // Midpoint-offset arc-length parametrization avoids
                    // placing collocation points exactly at corners.
                    let mut s = (j as f64 + 0.5) / n as f64 * total;
                    let mut i = 0;
                    while s > lengths[i] && i + 1 < m {
                        s -= lengths[i];
                        i += 1;
                    }
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    pts.push(a + (b - a) * (s / lengths[i]));
                }
                Ok(pts)
            }
            Domain::Implicit { bbox, indicator } => {
                let c = Complex64::new(0.5 * (bbox[0] + bbox[1]), 0.5 * (bbox[2] + bbox[3]));
                if !indicator(c) {
                    return Err(Error::InvalidSpec(
                        "implicit boundary sampling needs the bbox center inside the region"
                            .into(),
                    ));
                }
                let mut pts = Vec::with_capacity(n);
                for j in 0..n {
                    let th = 2.0 * PI * j as f64 / n as f64;
                    let dir = Complex64::new(th.cos(), th.sin());
                    let mut lo = 0.0;
                    let mut hi = 1e-3;
                    while indicator(c + dir * hi) && hi < 1e6 {
                        lo = hi;
                        hi *= 2.0;
                    }
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if indicator(c + dir * mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    pts.push(c + dir * (0.5 * (lo + hi)));
                }
                Ok(pts)
            }
            Domain::Ball2 | Domain::Bidisk => Err(Error::InvalidSpec(
                "boundary sampling is only available for planar domains".into(),
            )),
        }
    }
}

fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / ab.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}
