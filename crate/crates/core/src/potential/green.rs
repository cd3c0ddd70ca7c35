use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// How a Green model was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreenMethod {
    AnalyticSeries,
    Mfs,
    UserSupplied,
}

impl GreenMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GreenMethod::AnalyticSeries => "analytic_series",
            GreenMethod::Mfs => "mfs",
            GreenMethod::UserSupplied => "user_supplied",
        }
    }
}

/// Evaluator kinds behind a [`GreenModel`].
#[derive(Clone)]
pub enum GreenKind {
    /// Möbius-invariant Green's function of a disk.
    DiskPole {
        center: Complex64,
        radius: f64,
        pole: Complex64,
    },
    /// `G = log|z−a|² − h(z)` on an annulus, with the harmonic corrector
    /// expanded as `h = a0 + b0·log r + Σ_m (A_m r^m + B_m r^{−m}) cos m(θ−α)`.
    AnnulusSeries {
        r_inner: f64,
        r_outer: f64,
        pole: Complex64,
        a0: f64,
        b0: f64,
        /// `(A_m, B_m)` for m = 1..=M.
        modes: Vec<(f64, f64)>,
    },
    /// Method-of-fundamental-solutions corrector
    /// `h(z) = c₀ + Σ_j c_j log|z − q_j|` with charges outside the domain.
    Mfs {
        pole: Complex64,
        const_term: f64,
        charges: Vec<Complex64>,
        coeffs: Vec<f64>,
    },
    /// `G(z) = log|m_b(z₁)|²` with `m_b` the unit-disk Möbius factor:
    /// the Green field cutting out the slice `{z₁ = b}` of a product
    /// domain over the unit disk.
    ProductDisk { pole: Complex64 },
    /// User-supplied negative plurisubharmonic field.
    User {
        eval: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
        pole: Point,
    },
}

/// A negative (pluri)subharmonic `G` with pole data and an accuracy
/// estimate (max |G| over boundary probes for solver-produced models).
#[derive(Clone)]
pub struct GreenModel {
    pub kind: GreenKind,
    pub method: GreenMethod,
    pub accuracy: f64,
}

impl fmt::Debug for GreenModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GreenModel({}, accuracy {:.2e})",
            self.method.name(),
            self.accuracy
        )
    }
}

fn mobius_disk(w: Complex64, b: Complex64) -> Complex64 {
    (w - b) / (Complex64::new(1.0, 0.0) - b.conj() * w)
}

impl GreenModel {
    pub fn eval(&self, p: &Point) -> f64 {
        match &self.kind {
            GreenKind::DiskPole {
                center,
                radius,
                pole,
            } => {
                let w = (p.z1() - center) / *radius;
                let b = (pole - center) / *radius;
                2.0 * mobius_disk(w, b).norm().ln()
            }
            GreenKind::AnnulusSeries {
                pole,
                a0,
                b0,
                modes,
                ..
            } => {
                let z = p.z1();
                let lead = 2.0 * (z - pole).norm().ln();
                lead - corrector_series(z, *pole, *a0, *b0, modes)
            }
            GreenKind::Mfs {
                pole,
                const_term,
                charges,
                coeffs,
            } => {
                let z = p.z1();
                let mut h = *const_term;
                for (q, c) in charges.iter().zip(coeffs) {
                    h += c * (z - q).norm().ln();
                }
                2.0 * (z - pole).norm().ln() - h
            }
            GreenKind::ProductDisk { pole } => 2.0 * mobius_disk(p.z1(), *pole).norm().ln(),
            GreenKind::User { eval, .. } => eval(p),
        }
    }

    /// The harmonic corrector `h = log|z − a|² − G` (planar models with a
    /// point pole).
    pub fn corrector(&self, p: &Point) -> f64 {
        let a = self.pole();
        2.0 * (p.z1() - a.z1()).norm().ln() - self.eval(p)
    }

    pub fn pole(&self) -> Point {
        match &self.kind {
            GreenKind::DiskPole { pole, .. }
            | GreenKind::AnnulusSeries { pole, .. }
            | GreenKind::Mfs { pole, .. } => Point::one(*pole),
            GreenKind::ProductDisk { pole } => Point::two(*pole, Complex64::new(0.0, 0.0)),
            GreenKind::User { pole, .. } => *pole,
        }
    }

    /// Exact sublevel region `{G < t}` when the model has one in closed
    /// form (Möbius preimage of a disk).
    pub fn sublevel_domain(&self, t: f64) -> Option<Domain> {
        match &self.kind {
            GreenKind::DiskPole {
                center,
                radius,
                pole,
            } => {
                let b = (pole - center) / *radius;
                let (c_w, r_w) = mobius_preimage_disk(b, (0.5 * t).exp());
                Some(Domain::Disk {
                    center: center + c_w * *radius,
                    radius: r_w * radius,
                })
            }
            GreenKind::ProductDisk { pole } => {
                let (c_w, r_w) = mobius_preimage_disk(*pole, (0.5 * t).exp());
                // z1 factor of the product sublevel region.
                Some(Domain::Disk {
                    center: c_w,
                    radius: r_w,
                })
            }
            _ => None,
        }
    }

    /// Serializes solver-produced models for reuse across CLI runs.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let body = match &self.kind {
            GreenKind::DiskPole {
                center,
                radius,
                pole,
            } => json!({
                "kind": "disk_pole",
                "center": [center.re, center.im],
                "radius": radius,
                "pole": [pole.re, pole.im],
            }),
            GreenKind::AnnulusSeries {
                r_inner,
                r_outer,
                pole,
                a0,
                b0,
                modes,
            } => json!({
                "kind": "annulus_series",
                "r_inner": r_inner,
                "r_outer": r_outer,
                "pole": [pole.re, pole.im],
                "a0": a0,
                "b0": b0,
                "modes": modes,
            }),
            GreenKind::Mfs {
                pole,
                const_term,
                charges,
                coeffs,
            } => json!({
                "kind": "mfs",
                "pole": [pole.re, pole.im],
                "const_term": const_term,
                "charges": charges.iter().map(|q| vec![q.re, q.im]).collect::<Vec<_>>(),
                "coeffs": coeffs,
            }),
            GreenKind::ProductDisk { pole } => json!({
                "kind": "product_disk",
                "pole": [pole.re, pole.im],
            }),
            GreenKind::User { .. } => {
                return Err(Error::Invalid(
                    "user-supplied Green models are not serializable".into(),
                ))
            }
        };
        Ok(json!({
            "method": self.method.name(),
            "accuracy": self.accuracy,
            "model": body,
        }))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<GreenModel> {
        let method = match v["method"].as_str() {
            Some("analytic_series") => GreenMethod::AnalyticSeries,
            Some("mfs") => GreenMethod::Mfs,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown green model method {other:?}"
                )))
            }
        };
        let accuracy = v["accuracy"].as_f64().unwrap_or(f64::NAN);
        let m = &v["model"];
        let cx = |val: &serde_json::Value| -> Result<Complex64> {
            let a = val
                .as_array()
                .ok_or_else(|| Error::Invalid("expected [re, im]".into()))?;
            Ok(Complex64::new(
                a[0].as_f64().unwrap_or(f64::NAN),
                a[1].as_f64().unwrap_or(f64::NAN),
            ))
        };
        let kind = match m["kind"].as_str() {
            Some("disk_pole") => GreenKind::DiskPole {
                center: cx(&m["center"])?,
                radius: m["radius"].as_f64().unwrap_or(f64::NAN),
                pole: cx(&m["pole"])?,
            },
            Some("annulus_series") => GreenKind::AnnulusSeries {
                r_inner: m["r_inner"].as_f64().unwrap_or(f64::NAN),
                r_outer: m["r_outer"].as_f64().unwrap_or(f64::NAN),
                pole: cx(&m["pole"])?,
                a0: m["a0"].as_f64().unwrap_or(f64::NAN),
                b0: m["b0"].as_f64().unwrap_or(f64::NAN),
                modes: serde_json::from_value(m["modes"].clone())?,
            },
            Some("mfs") => GreenKind::Mfs {
                pole: cx(&m["pole"])?,
                const_term: m["const_term"].as_f64().unwrap_or(f64::NAN),
                charges: m["charges"]
                    .as_array()
                    .ok_or_else(|| Error::Invalid("mfs charges missing".into()))?
                    .iter()
                    .map(cx)
                    .collect::<Result<Vec<_>>>()?,
                coeffs: serde_json::from_value(m["coeffs"].clone())?,
            },
            Some("product_disk") => GreenKind::ProductDisk {
                pole: cx(&m["pole"])?,
            },
            other => return Err(Error::Invalid(format!("unknown green kind {other:?}"))),
        };
        Ok(GreenModel {
            kind,
            method,
            accuracy,
        })
    }
}

fn corrector_series(z: Complex64, pole: Complex64, a0: f64, b0: f64, modes: &[(f64, f64)]) -> f64 {
    let r = z.norm();
    let theta = z.arg() - pole.arg();
    let mut h = a0 + b0 * r.ln();
    let mut rp = 1.0;
    for (m, (am, bm)) in modes.iter().enumerate() {
        let mf = (m + 1) as f64;
        rp *= r;
        h += (am * rp + bm / rp) * (mf * theta).cos();
    }
    h
}

/// Preimage of the disk `{|w'| < rho}` under the unit-disk Möbius map
/// `w' = (w − b)/(1 − b̄ w)`: a disk, returned as (center, radius).
fn mobius_preimage_disk(b: Complex64, rho: f64) -> (Complex64, f64) {
    let b2 = b.norm_sqr();
    let denom = 1.0 - rho * rho * b2;
    (b * ((1.0 - rho * rho) / denom), rho * (1.0 - b2) / denom)
}

/// Green's function for a planar domain with an interior pole.
///
/// Disk and annulus take the analytic paths; polygon and implicit
/// regions go through the MFS solver with its boundary residual check.
pub fn solve_green(domain: &Domain, pole: Complex64) -> Result<GreenModel> {
    if !domain.contains(&Point::one(pole)) {
        return Err(Error::InvalidSpec(format!(
            "pole {pole} is not strictly inside the domain"
        )));
    }
    match domain {
        Domain::Disk { center, radius } => Ok(GreenModel {
            kind: GreenKind::DiskPole {
                center: *center,
                radius: *radius,
                pole,
            },
            method: GreenMethod::AnalyticSeries,
            accuracy: 0.0,
        }),
        Domain::Annulus { .. } => solve_green_annulus(domain, pole, 64),
        Domain::Polygon { .. } | Domain::Implicit { .. } => {
            solve_green_mfs(domain, pole, 128, 1.5, 1e-6)
        }
        _ => Err(Error::InvalidSpec(
            "solve_green expects a planar domain".into(),
        )),
    }
}

/// Fourier/Laurent series solve of the annulus harmonic corrector with
/// boundary data `log|z − a|²`, truncated at `modes` terms.
pub fn solve_green_annulus(domain: &Domain, pole: Complex64, modes: usize) -> Result<GreenModel> {
    let (r1, r2) = match domain {
        Domain::Annulus { r_inner, r_outer } => (*r_inner, *r_outer),
        _ => return Err(Error::InvalidSpec("annulus solver needs an annulus".into())),
    };
    let aa = pole.norm();
    if !(aa > r1 && aa < r2) {
        return Err(Error::InvalidSpec("pole outside annulus".into()));
    }
    // m = 0: match circle means 2 log R2 (outer) and 2 log|a| (inner).
    let b0 = 2.0 * (r2.ln() - aa.ln()) / (r2.ln() - r1.ln());
    let a0 = 2.0 * r2.ln() - b0 * r2.ln();
    // m >= 1: cos m(θ−α) coefficients of log|z−a|² on each circle.
    let mut coeffs = Vec::with_capacity(modes);
    for m in 1..=modes {
        let mf = m as f64;
        let beta_outer = -(2.0 / mf) * (aa / r2).powi(m as i32);
        let beta_inner = -(2.0 / mf) * (r1 / aa).powi(m as i32);
        let det = (r2 / r1).powi(m as i32) - (r1 / r2).powi(m as i32);
        let am = (beta_outer * r1.powi(-(m as i32)) - beta_inner * r2.powi(-(m as i32))) / det;
        let bm = (beta_inner * r2.powi(m as i32) - beta_outer * r1.powi(m as i32)) / det;
        coeffs.push((am, bm));
    }
    let model = GreenModel {
        kind: GreenKind::AnnulusSeries {
            r_inner: r1,
            r_outer: r2,
            pole,
            a0,
            b0,
            modes: coeffs,
        },
        method: GreenMethod::AnalyticSeries,
        accuracy: 0.0,
    };
    let residual = boundary_residual(&model, domain, 256)?;
    Ok(GreenModel {
        accuracy: residual,
        ..model
    })
}

/// Method-of-fundamental-solutions Green solve: charges on a boundary
/// curve dilated by `dilation` about the centroid, charge count twice
/// the collocation count, min-norm least-squares fit of the corrector.
pub fn solve_green_mfs(
    domain: &Domain,
    pole: Complex64,
    collocation: usize,
    dilation: f64,
    tolerance: f64,
) -> Result<GreenModel> {
    let coll = domain.boundary_points(collocation)?;
    let charge_pts = domain.boundary_points(2 * collocation)?;
    let centroid = {
        let n = coll.len() as f64;
        coll.iter().sum::<Complex64>() / n
    };
    let charges: Vec<Complex64> = charge_pts
        .iter()
        .map(|p| centroid + (p - centroid) * dilation)
        .collect();
    let n_c = charges.len();
    // Columns: charges then the constant term.
    let mut mat = DMatrix::<f64>::zeros(coll.len(), n_c + 1);
    let mut rhs = DVector::<f64>::zeros(coll.len());
    for (i, x) in coll.iter().enumerate() {
        for (j, q) in charges.iter().enumerate() {
            mat[(i, j)] = (x - q).norm().ln();
        }
        mat[(i, n_c)] = 1.0;
        rhs[i] = 2.0 * (x - pole).norm().ln();
    }
    let svd = mat.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Invalid(format!("mfs least squares failed: {e}")))?;
    let model = GreenModel {
        kind: GreenKind::Mfs {
            pole,
            const_term: sol[n_c],
            charges,
            coeffs: sol.as_slice()[..n_c].to_vec(),
        },
        method: GreenMethod::Mfs,
        accuracy: 0.0,
    };
    let residual = boundary_residual(&model, domain, 4 * collocation)?;
    if residual > tolerance {
        return Err(Error::BoundaryResidual {
            residual,
            tolerance,
        });
    }
    Ok(GreenModel {
        accuracy: residual,
        ..model
    })
}

/// Max |G| over boundary probe points.
pub fn boundary_residual(model: &GreenModel, domain: &Domain, probes: usize) -> Result<f64> {
    let pts = domain.boundary_points(probes)?;
    let mut r = 0.0f64;
    for z in pts {
        r = r.max(model.eval(&Point::one(z)).abs());
    }
    Ok(r)
}
