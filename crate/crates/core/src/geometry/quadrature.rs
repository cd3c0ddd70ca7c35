use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_on, pairwise_sum, pairwise_sum_c};

use super::domain::{Domain, Point};

/// Nodes and positive weights realizing euclidean volume measure on a
/// region. Node/weight ordering is deterministic for fixed inputs.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub resolution: u32,
    pub refinement: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of weights (the rule's estimate of the region volume).
    pub fn volume(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Polar product rule on the annulus `r0 < |z - center| < r1`
/// (`r0 = 0` gives the disk). Gauss–Legendre in radius, uniform
/// (trapezoidal, spectrally accurate for periodic integrands) in angle.
pub fn polar_rule(center: Complex64, r0: f64, r1: f64, n_r: usize, n_t: usize) -> QuadratureRule {
    let (rs, wr) = gauss_legendre_on(n_r, r0, r1);
    let dtheta = 2.0 * std::f64::consts::PI / n_t as f64;
    let mut nodes = Vec::with_capacity(n_r * n_t);
    let mut weights = Vec::with_capacity(n_r * n_t);
    for (r, w) in rs.iter().zip(&wr) {
        for j in 0..n_t {
            let th = dtheta * j as f64;
            nodes.push(Point::one(center + Complex64::from_polar(*r, th)));
            weights.push(w * r * dtheta);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        resolution: n_r as u32,
        refinement: 0,
    }
}

/// Tensor Gauss–Legendre panels on a planar bounding box, masked by an
/// indicator, with dyadic subdivision of cells cut by the boundary.
///
/// Cells fully inside get a 4×4 Gauss panel. Cut cells subdivide up to
/// `depth` levels; surviving cut leaves contribute a single node at the
/// centroid of an 8×8 membership subsample, weighted by the covered
/// fraction of the leaf area.
pub fn masked_rule_planar(
    bbox: [f64; 4],
    inside: &dyn Fn(Complex64) -> bool,
    cells: usize,
    depth: u32,
) -> QuadratureRule {
    let [x0, x1, y0, y1] = bbox;
    let hx = (x1 - x0) / cells as f64;
    let hy = (y1 - y0) / cells as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for iy in 0..cells {
        for ix in 0..cells {
            let cx0 = x0 + ix as f64 * hx;
            let cy0 = y0 + iy as f64 * hy;
            masked_cell(
                cx0,
                cx0 + hx,
                cy0,
                cy0 + hy,
                inside,
                depth,
                &mut nodes,
                &mut weights,
            );
        }
    }
    QuadratureRule {
        nodes,
        weights,
        resolution: cells as u32,
        refinement: depth,
    }
}

#[allow(clippy::too_many_arguments)]
fn masked_cell(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    inside: &dyn Fn(Complex64) -> bool,
    depth: u32,
    nodes: &mut Vec<Point>,
    weights: &mut Vec<f64>,
) {
    // 3x3 probe grid classifies the cell.
    let mut n_in = 0usize;
    for j in 0..3 {
        for i in 0..3 {
            let px = x0 + (x1 - x0) * i as f64 / 2.0;
            let py = y0 + (y1 - y0) * j as f64 / 2.0;
            if inside(Complex64::new(px, py)) {
                n_in += 1;
            }
        }
    }
    if n_in == 9 {
        gauss_panel(x0, x1, y0, y1, nodes, weights);
        return;
    }
    if n_in == 0 && depth == 0 {
        return;
    }
    if depth > 0 {
        let xm = 0.5 * (x0 + x1);
        let ym = 0.5 * (y0 + y1);
        masked_cell(x0, xm, y0, ym, inside, depth - 1, nodes, weights);
        masked_cell(xm, x1, y0, ym, inside, depth - 1, nodes, weights);
        masked_cell(x0, xm, ym, y1, inside, depth - 1, nodes, weights);
        masked_cell(xm, x1, ym, y1, inside, depth - 1, nodes, weights);
        return;
    }
    // Cut leaf at maximal depth: fraction-weighted single node.
    let mut count = 0usize;
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut best: Option<Complex64> = None;
    for j in 0..8 {
        for i in 0..8 {
            let px = x0 + (x1 - x0) * (i as f64 + 0.5) / 8.0;
            let py = y0 + (y1 - y0) * (j as f64 + 0.5) / 8.0;
            if inside(Complex64::new(px, py)) {
                count += 1;
                cx += px;
                cy += py;
                if best.is_none() {
                    best = Some(Complex64::new(px, py));
                }
            }
        }
    }
    if count == 0 {
        return;
    }
    let frac = count as f64 / 64.0;
    let centroid = Complex64::new(cx / count as f64, cy / count as f64);
    // Keep the node inside the region (rule invariant).
    let node = if inside(centroid) {
        centroid
    } else {
        best.unwrap()
    };
    nodes.push(Point::one(node));
    weights.push(frac * (x1 - x0) * (y1 - y0));
}

fn gauss_panel(x0: f64, x1: f64, y0: f64, y1: f64, nodes: &mut Vec<Point>, weights: &mut Vec<f64>) {
    let (xs, wx) = gauss_legendre_on(4, x0, x1);
    let (ys, wy) = gauss_legendre_on(4, y0, y1);
    for (y, wy) in ys.iter().zip(&wy) {
        for (x, wx) in xs.iter().zip(&wx) {
            nodes.push(Point::one(Complex64::new(*x, *y)));
            weights.push(wx * wy);
        }
    }
}

/// Builds the default quadrature rule for a domain. `resolution` is
/// cells-per-axis for masked rules and the radial node count for polar
/// rules; for the C² product domains it is shared between the factors.
pub fn quadrature(domain: &Domain, resolution: u32) -> Result<QuadratureRule> {
    if resolution < 8 {
        return Err(Error::InvalidSpec(format!(
            "resolution must be at least 8, got {resolution}"
        )));
    }
    let res = resolution as usize;
    match domain {
        Domain::Disk { center, radius } => Ok(polar_rule(*center, 0.0, *radius, res, 2 * res)),
        Domain::Annulus { r_inner, r_outer } => Ok(polar_rule(
            Complex64::new(0.0, 0.0),
            *r_inner,
            *r_outer,
            res,
            2 * res,
        )),
        Domain::Bidisk => {
            let (n_r, n_t) = ((res / 2).max(4), res.max(8));
            let factor = polar_rule(Complex64::new(0.0, 0.0), 0.0, 1.0, n_r, n_t);
            let mut nodes = Vec::with_capacity(factor.len() * factor.len());
            let mut weights = Vec::with_capacity(factor.len() * factor.len());
            for (z1, w1) in factor.nodes.iter().zip(&factor.weights) {
                for (z2, w2) in factor.nodes.iter().zip(&factor.weights) {
                    nodes.push(Point::two(z1.z1(), z2.z1()));
                    weights.push(w1 * w2);
                }
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                resolution,
                refinement: 0,
            })
        }
        Domain::Ball2 => {
            let (n_r, n_t) = ((res / 2).max(4), res.max(8));
            let outer = polar_rule(Complex64::new(0.0, 0.0), 0.0, 1.0, n_r, n_t);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (z1, w1) in outer.nodes.iter().zip(&outer.weights) {
                let rho = (1.0 - z1.z1().norm_sqr()).max(0.0).sqrt();
                let inner = polar_rule(Complex64::new(0.0, 0.0), 0.0, rho, n_r, n_t);
                for (z2, w2) in inner.nodes.iter().zip(&inner.weights) {
                    nodes.push(Point::two(z1.z1(), z2.z1()));
                    weights.push(w1 * w2);
                }
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                resolution,
                refinement: 0,
            })
        }
        Domain::Polygon { .. } | Domain::Implicit { .. } => {
            let bbox = domain.bbox_planar().expect("planar domain has a bbox");
            let rule = masked_rule_planar(bbox, &|z| domain.contains(&Point::one(z)), res, 4);
            if rule.is_empty() {
                return Err(Error::EmptyRule(format!(
                    "no quadrature nodes inside {domain:?} at resolution {resolution}"
                )));
            }
            Ok(rule)
        }
    }
}

/// Integrates a complex-valued field against a rule. Fixed-tree pairwise
/// summation makes the result independent of any execution schedule.
pub fn integrate<F: Fn(&Point) -> Complex64>(rule: &QuadratureRule, f: F) -> Result<Complex64> {
    let mut terms = Vec::with_capacity(rule.len());
    for (i, (p, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(p);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteNode {
                index: i,
                location: format!("{:?}", p),
                value: v.norm(),
            });
        }
        terms.push(v * *w);
    }
    Ok(pairwise_sum_c(&terms))
}

/// Real-valued variant of [`integrate`].
pub fn integrate_re<F: Fn(&Point) -> f64>(rule: &QuadratureRule, f: F) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.len());
    for (i, (p, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::NonFiniteNode {
                index: i,
                location: format!("{:?}", p),
                value: v,
            });
        }
        terms.push(v * *w);
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};
    use std::f64::consts::PI;

    fn disk() -> Domain {
        build_domain(&DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn disk_rule_volume() {
        let rule = quadrature(&disk(), 64).unwrap();
        assert!((rule.volume() - PI).abs() < 1e-3 * PI);
    }

    #[test]
    fn annulus_rule_volume() {
        let d = build_domain(&DomainSpec::Annulus {
            r_inner: 0.2,
            r_outer: 1.0,
        })
        .unwrap();
        let rule = quadrature(&d, 128).unwrap();
        assert!((rule.volume() - 0.96 * PI).abs() < 1e-3);
    }

    #[test]
    fn bidisk_rule_volume() {
        let d = build_domain(&DomainSpec::Bidisk).unwrap();
        let rule = quadrature(&d, 32).unwrap();
        assert!((rule.volume() - PI * PI).abs() < 0.01 * PI * PI);
    }

    #[test]
    fn ball2_rule_volume() {
        let d = build_domain(&DomainSpec::Ball2).unwrap();
        let rule = quadrature(&d, 16).unwrap();
        assert!((rule.volume() - PI * PI / 2.0).abs() < 0.01 * PI * PI / 2.0);
    }

    #[test]
    fn disk_integrals() {
        let rule = quadrature(&disk(), 64).unwrap();
        let one = integrate(&rule, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - PI).abs() < 1e-3);
        let sq = integrate(&rule, |p| Complex64::new(p.z1().norm_sqr(), 0.0)).unwrap();
        assert!((sq.re - PI / 2.0).abs() < 1e-3);
        let lin = integrate(&rule, |p| p.z1()).unwrap();
        assert!(lin.norm() < 1e-3);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let rule = quadrature(&disk(), 8).unwrap();
        let err = integrate_re(&rule, |p| 1.0 / (p.z1().norm() - p.z1().norm())).unwrap_err();
        assert!(matches!(err, Error::NonFiniteNode { .. }));
    }

    #[test]
    fn resolution_floor() {
        assert!(quadrature(&disk(), 4).is_err());
    }

    #[test]
    fn masked_rule_disk_volume_converges() {
        let inside = |z: Complex64| z.norm() < 1.0;
        let coarse = masked_rule_planar([-1.01, 1.01, -1.01, 1.01], &inside, 16, 3);
        let fine = masked_rule_planar([-1.01, 1.01, -1.01, 1.01], &inside, 64, 5);
        let e0 = (coarse.volume() - PI).abs();
        let e1 = (fine.volume() - PI).abs();
        assert!(e1 < e0, "refinement should reduce the volume error");
        assert!(e1 < 1e-5, "fine masked volume error {e1}");
    }

    #[test]
    fn masked_nodes_lie_inside() {
        let inside = |z: Complex64| z.norm() < 1.0;
        let rule = masked_rule_planar([-1.01, 1.01, -1.01, 1.01], &inside, 16, 3);
        assert!(rule.nodes.iter().all(|p| inside(p.z1())));
        assert!(rule.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn rules_are_deterministic() {
        let a = quadrature(&disk(), 32).unwrap();
        let b = quadrature(&disk(), 32).unwrap();
        assert_eq!(a.nodes.len(), b.nodes.len());
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            assert_eq!(x.z1().re.to_bits(), y.z1().re.to_bits());
            assert_eq!(x.z1().im.to_bits(), y.z1().im.to_bits());
        }
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
