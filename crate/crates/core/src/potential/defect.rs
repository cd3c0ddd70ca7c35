use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, Variety};

use super::green::GreenModel;

/// Tube-grid estimates of the constants sandwiching `G` against
/// `log d_V²` near the variety: `log d_V² − B ≤ G ≤ log d_V² + A`.
#[derive(Clone, Debug)]
pub struct DefectBound {
    pub a_est: f64,
    pub b_max: f64,
    /// Radii the tube grid was sampled at, smallest last.
    pub radii: Vec<f64>,
    /// Per-radius sup of `(log d_V² − G)₊`, aligned with `radii`.
    pub b_by_radius: Vec<f64>,
}

/// The defect field `B(z) = max(log d_V²(z) − G(z), 0)`. Clamped at
/// zero: only the upper bound on `log d_V² − G` is informative.
pub fn b_field<'a>(model: &'a GreenModel, variety: &'a Variety) -> impl Fn(&Point) -> f64 + 'a {
    move |p: &Point| {
        let d = variety.distance(p);
        (2.0 * d.ln() - model.eval(p)).max(0.0)
    }
}

/// Samples `G − log d_V²` on tube grids of the given radii around V and
/// reports the sandwich constants. Radii are sorted descending so the
/// smallest (closest to V) is checked last; estimates that keep growing
/// as the tube shrinks mean `G` violates the sandwich and are an error.
pub fn defect_bound(
    model: &GreenModel,
    variety: &Variety,
    domain: &Domain,
    tube_radii: &[f64],
) -> Result<DefectBound> {
    if tube_radii.is_empty() {
        return Err(Error::InvalidSpec("defect_bound needs tube radii".into()));
    }
    let mut radii: Vec<f64> = tube_radii.to_vec();
    radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut a_est = f64::NEG_INFINITY;
    let mut b_by_radius = Vec::with_capacity(radii.len());
    for &d in &radii {
        let mut b_here = 0.0f64;
        let pts = variety.tube_points(d, 128, 16);
        let mut sampled = 0usize;
        for p in &pts {
            if !domain.contains(p) {
                continue;
            }
            sampled += 1;
            let gap = model.eval(p) - 2.0 * d.ln();
            if !gap.is_finite() {
                return Err(Error::Hypothesis(format!(
                    "G − log d_V² is not finite on the tube at radius {d}"
                )));
            }
            a_est = a_est.max(gap);
            b_here = b_here.max(-gap);
        }
        if sampled == 0 {
            return Err(Error::InvalidSpec(format!(
                "tube of radius {d} does not fit inside the domain"
            )));
        }
        b_by_radius.push(b_here);
    }
    // Divergence across refinement: the sup must stabilize as d shrinks.
    for w in b_by_radius.windows(2) {
        if w[1] > w[0] + 1.0 {
            return Err(Error::Hypothesis(format!(
                "defect bound grows under tube refinement ({} -> {}): G violates the sandwich",
                w[0], w[1]
            )));
        }
    }
    let b_max = b_by_radius.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(DefectBound {
        a_est,
        b_max,
        radii,
        b_by_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec, VarietySpec};
    use crate::potential::{solve_green, GreenKind, GreenMethod};
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn exact_log_distance_has_zero_defect() {
        let d = build_domain(&DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        })
        .unwrap();
        let v = VarietySpec::Point { a: vec![0.0, 0.0] }.realize(&d).unwrap();
        let g = GreenModel {
            kind: GreenKind::User {
                eval: Arc::new(|p: &Point| p.z1().norm_sqr().ln()),
                pole: Point::one(Complex64::new(0.0, 0.0)),
            },
            method: GreenMethod::UserSupplied,
            accuracy: 0.0,
        };
        let db = defect_bound(&g, &v, &d, &[0.05, 0.025, 0.0125]).unwrap();
        assert!(db.a_est.abs() < 1e-12);
        assert!(db.b_max.abs() < 1e-12);
    }

    #[test]
    fn bidisk_slice_exact_defect() {
        let d = build_domain(&DomainSpec::Bidisk).unwrap();
        let v = VarietySpec::SliceZ1 {
            c: [0.0, 0.0],
            ambient: crate::geometry::SliceAmbient::Bidisk,
        }
        .realize(&d)
        .unwrap();
        let g = GreenModel {
            kind: GreenKind::ProductDisk {
                pole: Complex64::new(0.0, 0.0),
            },
            method: GreenMethod::AnalyticSeries,
            accuracy: 0.0,
        };
        let db = defect_bound(&g, &v, &d, &[0.05, 0.025]).unwrap();
        assert!(db.a_est.abs() < 1e-12);
        assert!(db.b_max.abs() < 1e-12);
    }

    #[test]
    fn annulus_defect_from_series() {
        let d = build_domain(&DomainSpec::Annulus {
            r_inner: 0.2,
            r_outer: 1.0,
        })
        .unwrap();
        let pole = Complex64::new(0.5, 0.0);
        let v = VarietySpec::Point { a: vec![0.5, 0.0] }.realize(&d).unwrap();
        let g = solve_green(&d, pole).unwrap();
        let db = defect_bound(&g, &v, &d, &[0.05, 0.025, 0.0125]).unwrap();
        // B dominates -h on the tube; near the pole h ≈ c < 0, so the
        // clamped field is 0 there; A ≈ -c > 0.
        let c = crate::potential::robin_constant(&g, &d).unwrap().c;
        assert!(db.a_est >= -c - 0.05, "a_est {} vs -c {}", db.a_est, -c);
        assert!(db.b_max >= 0.0 && db.b_max.is_finite());
    }
}
