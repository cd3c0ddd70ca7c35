use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

use super::green::{GreenKind, GreenMethod, GreenModel};

/// Robin constant `c = lim_{z→a} (log|z−a|² − G(z)) = h(a)`, with the
/// sign convention making `K(a) ≥ e^{−c}/π` the Suita bound.
#[derive(Clone, Debug)]
pub struct RobinReport {
    pub c: f64,
    pub pole: Complex64,
    pub method: GreenMethod,
    pub error_estimate: f64,
}

/// Robin constant of a point-pole Green model. Closed forms are used on
/// the analytic paths; other models go through circle extrapolation.
pub fn robin_constant(model: &GreenModel, domain: &Domain) -> Result<RobinReport> {
    match &model.kind {
        GreenKind::DiskPole {
            center,
            radius,
            pole,
        } => {
            let b = (pole - center) / *radius;
            Ok(RobinReport {
                c: 2.0 * (radius * (1.0 - b.norm_sqr())).ln(),
                pole: *pole,
                method: GreenMethod::AnalyticSeries,
                error_estimate: 0.0,
            })
        }
        GreenKind::AnnulusSeries {
            pole,
            a0,
            b0,
            modes,
            ..
        } => {
            let r = pole.norm();
            let mut c = a0 + b0 * r.ln();
            let mut rp = 1.0;
            for (am, bm) in modes {
                rp *= r;
                c += am * rp + bm / rp;
            }
            Ok(RobinReport {
                c,
                pole: *pole,
                method: GreenMethod::AnalyticSeries,
                error_estimate: model.accuracy,
            })
        }
        _ => robin_extrapolated(model, domain),
    }
}

/// Circle-mean extrapolation of the Robin constant: evaluate the
/// corrector mean on circles `2^{−j}·r₀`, j = 3..7, fit an affine model
/// in r², and report the fit residual as the error estimate.
pub fn robin_extrapolated(model: &GreenModel, domain: &Domain) -> Result<RobinReport> {
    let pole = model.pole();
    if pole.dim() != 1 {
        return Err(Error::InvalidSpec(
            "robin extrapolation needs a planar point pole".into(),
        ));
    }
    let a = pole.z1();
    let reach = domain
        .boundary_distance(a)
        .ok_or_else(|| Error::InvalidSpec("robin extrapolation needs a planar domain".into()))?;
    let r0 = 0.5 * reach;
    let mut radii = Vec::new();
    let mut means = Vec::new();
    for j in 3..=7u32 {
        let r = r0 / f64::powi(2.0, j as i32);
        let n = 64;
        let mut s = 0.0;
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let z = a + Complex64::from_polar(r, th);
            s += model.corrector(&Point::one(z));
        }
        radii.push(r);
        means.push(s / n as f64);
    }
    affine_extrapolate(&radii, &means, 1e-3).map(|(c, err)| RobinReport {
        c,
        pole: a,
        method: model.method,
        error_estimate: err,
    })
}

/// Generalized Robin constant `limsup_{z→a} log|z−a|² − ψ(z)` of a
/// negative plurisubharmonic ψ with a logarithmic pole at `a`.
/// The limsup is realized as the max over shrinking circles/spheres
/// with the same affine-in-r² extrapolation.
pub fn generalized_robin<F: Fn(&Point) -> f64>(psi: F, pole: &Point, r0: f64) -> Result<f64> {
    let mut radii = Vec::new();
    let mut sups = Vec::new();
    for j in 3..=7u32 {
        let r = r0 / f64::powi(2.0, j as i32);
        let mut sup = f64::NEG_INFINITY;
        if pole.dim() == 1 {
            for k in 0..64 {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                let z = Point::one(pole.z1() + Complex64::from_polar(r, th));
                sup = sup.max(2.0 * r.ln() - psi(&z));
            }
        } else {
            // Deterministic sphere sample in C².
            for s in 0..8 {
                let alpha = (s as f64 + 0.5) / 8.0 * std::f64::consts::FRAC_PI_2;
                let (d1, d2) = (r * alpha.cos(), r * alpha.sin());
                for k in 0..16 {
                    let t1 = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
                    for l in 0..16 {
                        let t2 = 2.0 * std::f64::consts::PI * l as f64 / 16.0;
                        let z = Point::two(
                            pole.z1() + Complex64::from_polar(d1, t1),
                            pole.z2() + Complex64::from_polar(d2, t2),
                        );
                        sup = sup.max(2.0 * r.ln() - psi(&z));
                    }
                }
            }
        }
        radii.push(r);
        sups.push(sup);
    }
    affine_extrapolate(&radii, &sups, 1e-2).map(|(c, _)| c)
}

/// Least-squares fit `v ≈ c + β r²`, returning `(c, max residual)`.
/// Errors out when the samples do not fit the smooth model.
fn affine_extrapolate(radii: &[f64], values: &[f64], tolerance: f64) -> Result<(f64, f64)> {
    let n = radii.len() as f64;
    let sx: f64 = radii.iter().map(|r| r * r).sum();
    let sxx: f64 = radii.iter().map(|r| r.powi(4)).sum();
    let sy: f64 = values.iter().sum();
    let sxy: f64 = radii.iter().zip(values).map(|(r, v)| r * r * v).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::NonConvergent {
            spread: f64::INFINITY,
            tolerance,
        });
    }
    let c = (sy * sxx - sx * sxy) / det;
    let beta = (n * sxy - sx * sy) / det;
    let resid = radii
        .iter()
        .zip(values)
        .map(|(r, v)| (v - c - beta * r * r).abs())
        .fold(0.0f64, f64::max);
    if resid > tolerance {
        return Err(Error::NonConvergent {
            spread: resid,
            tolerance,
        });
    }
    Ok((c, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};
    use crate::potential::solve_green;

    fn unit_disk() -> Domain {
        build_domain(&DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn disk_center_pole_robin_is_zero() {
        let g = solve_green(&unit_disk(), Complex64::new(0.0, 0.0)).unwrap();
        let r = robin_constant(&g, &unit_disk()).unwrap();
        assert_eq!(r.c, 0.0);
    }

    #[test]
    fn disk_offset_pole_closed_form() {
        let a = Complex64::new(0.3, 0.0);
        let g = solve_green(&unit_disk(), a).unwrap();
        let r = robin_constant(&g, &unit_disk()).unwrap();
        let expected = (1.0f64 - 0.09).powi(2).ln();
        assert!((r.c - expected).abs() < 1e-14);
        // Extrapolated value agrees with the closed form.
        let e = robin_extrapolated(&g, &unit_disk()).unwrap();
        assert!((e.c - expected).abs() < 1e-8, "extrapolated {} vs {expected}", e.c);
    }

    #[test]
    fn annulus_series_and_extrapolation_agree() {
        let d = build_domain(&DomainSpec::Annulus {
            r_inner: 0.2,
            r_outer: 1.0,
        })
        .unwrap();
        let g = solve_green(&d, Complex64::new(0.5, 0.0)).unwrap();
        let series = robin_constant(&g, &d).unwrap();
        let extr = robin_extrapolated(&g, &d).unwrap();
        assert!(
            (series.c - extr.c).abs() < 1e-8,
            "series {} vs extrapolated {}",
            series.c,
            extr.c
        );
    }

    #[test]
    fn generalized_robin_trivial_cases() {
        let pole = Point::one(Complex64::new(0.0, 0.0));
        let psi = |p: &Point| 2.0 * p.z1().norm().ln();
        assert!(generalized_robin(psi, &pole, 0.5).unwrap().abs() < 1e-10);
        let shifted = |p: &Point| 2.0 * p.z1().norm().ln() - 1.0;
        assert!((generalized_robin(shifted, &pole, 0.5).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn generalized_robin_ball_pluricomplex() {
        // log|z|² on the ball in C² has vanishing generalized Robin constant.
        let pole = Point::two(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let psi = |p: &Point| p.norm_sqr().ln();
        assert!(generalized_robin(psi, &pole, 0.5).unwrap().abs() < 1e-10);
    }

    #[test]
    fn divergent_psi_rejected() {
        // ψ with a non-logarithmic singularity: the circle sups diverge.
        let pole = Point::one(Complex64::new(0.0, 0.0));
        let psi = |p: &Point| -1.0 / p.z1().norm();
        assert!(generalized_robin(psi, &pole, 0.5).is_err());
    }
}
