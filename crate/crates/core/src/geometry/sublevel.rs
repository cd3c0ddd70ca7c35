use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::gauss_legendre_on;

use super::domain::{Domain, Point};
use super::quadrature::{masked_rule_planar, QuadratureRule};

/// Quadrature over the sublevel region `{z ∈ D : G(z) < t}` of a scalar
/// field on a planar domain.
///
/// A coarse membership scan locates a tight bounding box of the region
/// (so deep sublevels around a pole stay well resolved), then a masked
/// panel rule with dyadic boundary refinement is built inside it. An
/// empty region yields an explicit empty rule, not a silent zero.
pub fn sublevel_rule<F: Fn(&Point) -> f64>(
    domain: &Domain,
    g: F,
    t: f64,
    resolution: u32,
    refinement: u32,
) -> Result<QuadratureRule> {
    if t > 0.0 {
        return Err(Error::InvalidSpec(format!(
            "sublevel threshold must satisfy t <= 0, got {t}"
        )));
    }
    if domain.dim() != 1 {
        return Err(Error::InvalidSpec(
            "generic sublevel rules are planar; C^2 sublevel domains go through \
             the analytic product structure of the Green model"
                .into(),
        ));
    }
    let bbox = domain.bbox_planar().expect("planar domain has a bbox");
    let inside = |z: Complex64| {
        let p = Point::one(z);
        domain.contains(&p) && g(&p) < t
    };

    // Coarse scan for a tight bounding box of {G < t}.
    const SCAN: usize = 256;
    let hx = (bbox[1] - bbox[0]) / SCAN as f64;
    let hy = (bbox[3] - bbox[2]) / SCAN as f64;
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    let mut hits = 0usize;
    for j in 0..SCAN {
        for i in 0..SCAN {
            let z = Complex64::new(
                bbox[0] + (i as f64 + 0.5) * hx,
                bbox[2] + (j as f64 + 0.5) * hy,
            );
            if inside(z) {
                hits += 1;
                x0 = x0.min(z.re);
                x1 = x1.max(z.re);
                y0 = y0.min(z.im);
                y1 = y1.max(z.im);
            }
        }
    }
    if hits == 0 {
        return Ok(QuadratureRule {
            nodes: Vec::new(),
            weights: Vec::new(),
            resolution,
            refinement,
        });
    }
    // Pad by two scan cells so the region closure is strictly interior.
    let tight = [
        x0 - 2.0 * hx,
        x1 + 2.0 * hx,
        y0 - 2.0 * hy,
        y1 + 2.0 * hy,
    ];
    Ok(masked_rule_planar(
        tight,
        &inside,
        resolution as usize,
        refinement,
    ))
}

/// Polar sublevel rule for regions `{G < t}` that are star-shaped around
/// a pole: along each of `n_t` rays from the pole the first crossing of
/// `G = t` is located by bisection and a radial Gauss rule fills `[0, r(θ)]`.
///
/// Node positions vary smoothly with `t`, which keeps finite differences
/// of profiles over a `t` grid free of cell-masking noise. The caller is
/// responsible for `t` being deep enough that the region is star-shaped.
pub fn sublevel_rule_star<F: Fn(&Point) -> f64>(
    domain: &Domain,
    g: F,
    t: f64,
    pole: Complex64,
    n_r: usize,
    n_t: usize,
) -> Result<QuadratureRule> {
    let reach = domain
        .boundary_distance(pole)
        .ok_or_else(|| Error::InvalidSpec("star rule needs a planar domain".into()))?;
    if reach <= 0.0 {
        return Err(Error::InvalidSpec("pole lies outside the domain".into()));
    }
    let dtheta = 2.0 * std::f64::consts::PI / n_t as f64;
    let mut nodes = Vec::with_capacity(n_r * n_t);
    let mut weights = Vec::with_capacity(n_r * n_t);
    for j in 0..n_t {
        let th = dtheta * j as f64;
        let dir = Complex64::new(th.cos(), th.sin());
        // March outward to bracket the first crossing of G = t.
        let steps = 512;
        let mut lo = 0.0;
        let mut hi = reach;
        let mut found = false;
        for s in 1..=steps {
            let r = reach * s as f64 / steps as f64;
            let p = Point::one(pole + dir * r);
            if !domain.contains(&p) || g(&p) >= t {
                lo = reach * (s - 1) as f64 / steps as f64;
                hi = r;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::InvalidSpec(format!(
                "sublevel region is not star-shaped around the pole at t = {t}"
            )));
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let p = Point::one(pole + dir * mid);
            if domain.contains(&p) && g(&p) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r_theta = 0.5 * (lo + hi);
        let (rs, wr) = gauss_legendre_on(n_r, 0.0, r_theta);
        for (r, w) in rs.iter().zip(&wr) {
            nodes.push(Point::one(pole + dir * *r));
            weights.push(w * r * dtheta);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        resolution: n_r as u32,
        refinement: 0,
    })
}
