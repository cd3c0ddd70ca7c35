use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{quadrature, sublevel_rule, Domain, Point, QuadratureRule};
use crate::potential::{GreenKind, GreenModel};

use super::basis::Basis;
use super::gram::{gram, gram_diagonal, GramSystem};
use super::radial::{bidisk_family_moments, disk_family_moments, disk_moments};
use super::Functional;

/// How a t-sample of a profile is normed: restriction to the sublevel
/// domain `D_t`, or the weighted family with exponent p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileMode {
    Restricted,
    Weighted { p: f64 },
}

impl ProfileMode {
    pub fn label(&self) -> String {
        match self {
            ProfileMode::Restricted => "restricted".into(),
            ProfileMode::Weighted { .. } => "weighted".into(),
        }
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            ProfileMode::Restricted => None,
            ProfileMode::Weighted { p } => Some(*p),
        }
    }
}

/// A sampled function of t on an ascending grid in `[t_min, 0]`. Values
/// are the raw log quantities (`log K_t(a)` or `log ‖ξ‖²_{t,p}`); the
/// linear-in-t shifts `k(t) = value + k·t` are applied by consumers.
#[derive(Clone, Debug)]
pub struct Profile {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub mode: ProfileMode,
    pub metadata: BTreeMap<String, String>,
    /// Grid points dropped at the deep end (empty `D_t` / rank collapse).
    pub truncated: usize,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `value + k·t` samples (k(t), k_ξ(t)).
    pub fn shifted(&self, k: usize) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.values)
            .map(|(t, v)| v + k as f64 * t)
            .collect()
    }
}

/// Evaluation knobs for profile sampling.
#[derive(Clone, Debug)]
pub struct ProfileOpts {
    pub resolution: u32,
    pub refinement: u32,
    /// Basis override; defaults to `Basis::default_for(domain)`.
    pub basis: Option<Basis>,
}

impl Default for ProfileOpts {
    fn default() -> Self {
        ProfileOpts {
            resolution: 24,
            refinement: 4,
            basis: None,
        }
    }
}

fn ascending(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidSpec("profile grid needs at least 2 points".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidSpec("profile grid must be strictly ascending".into()));
        }
    }
    if *t_grid.last().unwrap() > 0.0 {
        return Err(Error::InvalidSpec("profile grid must stay in (-inf, 0]".into()));
    }
    Ok(())
}

/// Gram system of the norm at parameter t in the requested mode,
/// routed through closed-form radial moments whenever the model admits
/// them and through sublevel quadrature otherwise.
pub fn system_at(
    domain: &Domain,
    model: &GreenModel,
    t: f64,
    mode: ProfileMode,
    opts: &ProfileOpts,
) -> Result<GramSystem> {
    let basis = opts
        .basis
        .clone()
        .unwrap_or_else(|| Basis::default_for(domain));
    match mode {
        ProfileMode::Restricted => match (&model.kind, model.sublevel_domain(t)) {
            (GreenKind::DiskPole { .. }, Some(Domain::Disk { center, radius })) => {
                let degree = match basis {
                    Basis::Monomials { degree, .. } => degree,
                    _ => 25,
                };
                let b = Basis::Monomials { center, degree };
                let m = disk_moments(degree, radius);
                gram_diagonal(b, &m)
            }
            _ => {
                if domain.dim() != 1 {
                    return Err(Error::InvalidSpec(
                        "restricted profiles on C² domains go through the weighted family".into(),
                    ));
                }
                let rule = sublevel_rule(
                    domain,
                    |p| model.eval(p),
                    t,
                    opts.resolution,
                    opts.refinement,
                )?;
                if rule.is_empty() {
                    return Err(Error::EmptyRule("sublevel region has no nodes".into()));
                }
                gram(&rule, &basis, |_| 0.0)
            }
        },
        ProfileMode::Weighted { p } => {
            if p <= 0.0 {
                return Err(Error::InvalidSpec(format!("weighted mode needs p > 0, got {p}")));
            }
            match &model.kind {
                // Unit disk, pole at the center: diagonal closed form.
                GreenKind::DiskPole {
                    center,
                    radius,
                    pole,
                } if (pole - center).norm() == 0.0 && (*radius - 1.0).abs() < 1e-15 => {
                    let degree = match basis {
                        Basis::Monomials { degree, .. } => degree,
                        _ => 25,
                    };
                    let b = Basis::Monomials {
                        center: *center,
                        degree,
                    };
                    let m = disk_family_moments(degree, t, p)?;
                    gram_diagonal(b, &m)
                }
                GreenKind::ProductDisk { pole } if pole.norm() == 0.0 => {
                    let td = match basis {
                        Basis::Monomials2 { total_degree } => total_degree,
                        _ => 12,
                    };
                    let b = Basis::Monomials2 { total_degree: td };
                    let m = bidisk_family_moments(td, t, p)?;
                    gram_diagonal(b, &m)
                }
                _ => {
                    if domain.dim() != 1 {
                        return Err(Error::InvalidSpec(
                            "weighted C² profiles need a product-structure Green model".into(),
                        ));
                    }
                    // The factor e^{−p·max(G−t,0)} is below 2e−16 outside
                    // D_{t+36/p}, so the rule is built on that sublevel.
                    let t_eff = (t + 36.0 / p).min(0.0);
                    let rule: QuadratureRule = if t_eff >= 0.0 {
                        quadrature(domain, 4 * opts.resolution.max(16))?
                    } else {
                        sublevel_rule(
                            domain,
                            |q| model.eval(q),
                            t_eff,
                            opts.resolution,
                            opts.refinement,
                        )?
                    };
                    if rule.is_empty() {
                        return Err(Error::EmptyRule("sublevel region has no nodes".into()));
                    }
                    gram(&rule, &basis, |q: &Point| p * (model.eval(q) - t).max(0.0))
                }
            }
        }
    }
}

fn base_metadata(domain: &Domain, mode: ProfileMode, opts: &ProfileOpts) -> BTreeMap<String, String> {
    let mut md = BTreeMap::new();
    md.insert("domain".into(), format!("{domain:?}"));
    md.insert("mode".into(), mode.label());
    if let Some(p) = mode.p() {
        md.insert("p".into(), format!("{p}"));
    }
    md.insert("resolution".into(), opts.resolution.to_string());
    md
}

/// Samples `log K_t(a)` over the grid. Failures at the deep end of the
/// grid (empty sublevel region, rank collapse) truncate the profile and
/// are reported through `truncated`; failures elsewhere propagate.
pub fn kernel_profile(
    domain: &Domain,
    model: &GreenModel,
    a: &Point,
    t_grid: &[f64],
    mode: ProfileMode,
    opts: &ProfileOpts,
) -> Result<Profile> {
    ascending(t_grid)?;
    if !domain.contains(a) {
        return Err(Error::InvalidSpec("profile point lies outside the domain".into()));
    }
    let mut t_out = Vec::new();
    let mut values = Vec::new();
    let mut truncated = 0usize;
    // Deepest first so a failure cleanly truncates the front of the grid.
    for &t in t_grid.iter() {
        match system_at(domain, model, t, mode, opts) {
            Ok(sys) => {
                let k = sys.kernel_value(a);
                if !(k.is_finite() && k > 0.0) {
                    return Err(Error::NonConvergent {
                        spread: k,
                        tolerance: 0.0,
                    });
                }
                t_out.push(t);
                values.push(k.ln());
            }
            Err(Error::EmptyRule(_)) | Err(Error::RankCollapse(_)) if values.is_empty() => {
                truncated += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if t_out.len() < 2 {
        return Err(Error::NonConvergent {
            spread: t_out.len() as f64,
            tolerance: 2.0,
        });
    }
    let mut md = base_metadata(domain, mode, opts);
    md.insert("pole".into(), format!("{a:?}"));
    md.insert("quantity".into(), "log_kernel".into());
    Ok(Profile {
        t: t_out,
        values,
        mode,
        metadata: md,
        truncated,
    })
}

/// Samples `log ‖ξ‖²_{t,p}` over the grid; same truncation contract as
/// `kernel_profile`. The pairing vector is t-independent and computed
/// once per basis.
pub fn dual_profile(
    domain: &Domain,
    model: &GreenModel,
    xi: &Functional,
    t_grid: &[f64],
    p: f64,
    k: usize,
    opts: &ProfileOpts,
) -> Result<Profile> {
    ascending(t_grid)?;
    let mode = ProfileMode::Weighted { p };
    let mut t_out = Vec::new();
    let mut values = Vec::new();
    let mut truncated = 0usize;
    let mut pairings: Option<Vec<Complex64>> = None;
    for &t in t_grid.iter() {
        match system_at(domain, model, t, mode, opts) {
            Ok(sys) => {
                let w = match &pairings {
                    Some(w) if w.len() == sys.basis.len() => w.clone(),
                    _ => {
                        let w = xi.pairing_vector(&sys.basis)?;
                        pairings = Some(w.clone());
                        w
                    }
                };
                let n2 = sys.dual_norm_sq(&w)?;
                if !(n2.is_finite() && n2 > 0.0) {
                    return Err(Error::NonConvergent {
                        spread: n2,
                        tolerance: 0.0,
                    });
                }
                t_out.push(t);
                values.push(n2.ln());
            }
            Err(Error::EmptyRule(_)) | Err(Error::RankCollapse(_)) if values.is_empty() => {
                truncated += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if t_out.len() < 2 {
        return Err(Error::NonConvergent {
            spread: t_out.len() as f64,
            tolerance: 2.0,
        });
    }
    let mut md = base_metadata(domain, mode, opts);
    md.insert("quantity".into(), "log_dual_norm_sq".into());
    md.insert("k".into(), k.to_string());
    Ok(Profile {
        t: t_out,
        values,
        mode,
        metadata: md,
        truncated,
    })
}

/// Uniform grid `t_min..=0` with the given step (ascending, end-inclusive).
pub fn t_grid(t_min: f64, step: f64) -> Result<Vec<f64>> {
    if !(t_min < 0.0 && step > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "grid needs t_min < 0 and step > 0, got {t_min}, {step}"
        )));
    }
    let n = (-t_min / step).round() as usize;
    Ok((0..=n).map(|i| t_min + step * i as f64).collect())
}
