use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::lower_gamma_int;

/// Closed-form diagonal moments for radially symmetric configurations.
/// These back the analytic kernel/profile paths; the quadrature paths
/// are cross-checked against them in tests.

/// `m_j = ∫_{|z|<R} |z|^{2j} = 2π R^{2j+2}/(2j+2)`, j = 0..=degree.
pub fn disk_moments(degree: usize, radius: f64) -> Vec<f64> {
    (0..=degree)
        .map(|j| {
            let e = 2 * j as i32 + 2;
            2.0 * PI * radius.powi(e) / e as f64
        })
        .collect()
}

/// Laurent moments on the annulus `r1 < |z| < r2`:
/// `m_j = 2π (r2^{2j+2} − r1^{2j+2})/(2j+2)` with the log case at j = −1.
/// Ordered j = −jmax..=jmax.
pub fn annulus_moments(jmax: i32, r1: f64, r2: f64) -> Vec<f64> {
    (-jmax..=jmax)
        .map(|j| {
            if j == -1 {
                2.0 * PI * (r2 / r1).ln()
            } else {
                let e = 2 * j + 2;
                2.0 * PI * (r2.powi(e) - r1.powi(e)) / e as f64
            }
        })
        .collect()
}

/// Weighted-family moments on the unit disk with pole at 0 and φ = 0:
/// `m_j(t,p) = ∫_{|z|<1} |z|^{2j} e^{−p·max(log|z|²−t, 0)}`.
/// Splitting at `|z| = e^{t/2}` gives
/// `2π [ e^{t(j+1)}/(2j+2) + e^{pt}(1 − e^{t(j+1−p)})/(2j+2−2p) ]`,
/// with the degenerate p = j+1 branch handled by the log integral.
pub fn disk_family_moments(degree: usize, t: f64, p: f64) -> Result<Vec<f64>> {
    if t > 0.0 || p <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "family moments need t <= 0 and p > 0, got t = {t}, p = {p}"
        )));
    }
    Ok((0..=degree)
        .map(|j| {
            let j1 = j as f64 + 1.0;
            let inner = (t * j1).exp() / (2.0 * j1);
            let outer = if (j1 - p).abs() < 1e-12 {
                (p * t).exp() * (-t / 2.0)
            } else {
                // (e^{pt} − e^{t(j+1)})/(2j+2−2p): both exponents stay ≤ 0.
                ((p * t).exp() - (t * j1).exp()) / (2.0 * j1 - 2.0 * p)
            };
            2.0 * PI * (inner + outer)
        })
        .collect())
}

/// Gaussian moments on the unit disk:
/// `∫_{|z|<1} |z|^{2j} e^{−β|z|²} = π γ(j+1, β)/β^{j+1}`.
pub fn gaussian_moments(degree: usize, beta: f64) -> Result<Vec<f64>> {
    if beta <= 0.0 {
        return Err(Error::InvalidSpec(format!("gaussian moments need beta > 0, got {beta}")));
    }
    Ok((0..=degree)
        .map(|j| PI * lower_gamma_int(j, beta) / beta.powi(j as i32 + 1))
        .collect())
}

/// Diagonal moments on the bidisk for the basis `z₁^i z₂^j` (total-degree
/// order) under the weight `p·max(log|z₁|² − t, 0)`: the product factors
/// into a z₁ family moment and an unweighted disk moment in z₂.
pub fn bidisk_family_moments(total_degree: usize, t: f64, p: f64) -> Result<Vec<f64>> {
    let m1 = disk_family_moments(total_degree, t, p)?;
    let mut out = Vec::with_capacity((total_degree + 1) * (total_degree + 2) / 2);
    for d in 0..=total_degree {
        for i in 0..=d {
            let j = d - i;
            out.push(m1[i] * PI / (j as f64 + 1.0));
        }
    }
    Ok(out)
}

/// Unweighted diagonal moments on the unit ball of C²:
/// `∫_{B²} |z₁|^{2i}|z₂|^{2j} = π² i! j! / (i+j+2)!`, total-degree order.
pub fn ball2_moments(total_degree: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((total_degree + 1) * (total_degree + 2) / 2);
    for d in 0..=total_degree {
        for i in 0..=d {
            let j = d - i;
            // i! j! / (i+j+2)! accumulated without overflow.
            let mut v = PI * PI;
            for q in 1..=(i + j + 2) {
                v /= q as f64;
            }
            for q in 1..=i {
                v *= q as f64;
            }
            for q in 1..=j {
                v *= q as f64;
            }
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_moment_values() {
        let m = disk_moments(2, 1.0);
        assert!((m[0] - PI).abs() < 1e-15);
        assert!((m[1] - PI / 2.0).abs() < 1e-15);
        assert!((m[2] - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn annulus_log_moment() {
        let m = annulus_moments(1, 0.2, 1.0);
        assert!((m[0] - 2.0 * PI * 5.0f64.ln()).abs() < 1e-12);
        assert!((m[1] - PI * (1.0 - 0.04)).abs() < 1e-12);
    }

    #[test]
    fn family_moments_against_radial_quadrature() {
        // Independent 1-D integration of 2π r^{2j+1} e^{−p·max(2 log r − t, 0)}
        // with the integrand split at the kink r = e^{t/2}.
        let (t, p) = (-1.5, 32.0);
        let m = disk_family_moments(3, t, p).unwrap();
        let rt = (0.5 * t).exp();
        for j in 0..=3 {
            let mut acc = 0.0;
            for (a, b) in [(0.0, rt), (rt, 1.0)] {
                let (xs, ws) = crate::numeric::gauss_legendre_on(80, a, b);
                for (x, w) in xs.iter().zip(&ws) {
                    let psi = (2.0 * x.ln() - t).max(0.0);
                    acc += w * 2.0 * PI * x.powi(2 * j as i32 + 1) * (-p * psi).exp();
                }
            }
            assert!(
                (m[j] - acc).abs() < 1e-12 * acc.abs().max(1.0),
                "m_{j} = {} vs quadrature {acc}",
                m[j]
            );
        }
    }

    #[test]
    fn family_moments_degenerate_p() {
        // p = j+1 branch continuity: compare against p slightly off.
        let t = -2.0;
        let a = disk_family_moments(3, t, 2.0).unwrap()[1];
        let b = disk_family_moments(3, t, 2.0 + 1e-9).unwrap()[1];
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn family_moments_interpolate_restricted_and_full() {
        let t = -2.0;
        let m_big = disk_family_moments(0, t, 1024.0).unwrap()[0];
        let restricted = PI * t.exp();
        assert!((m_big - restricted).abs() < 2e-2 * restricted.abs() + 1e-2);
        // t = 0 gives the plain disk moment for any p.
        let m0 = disk_family_moments(2, 0.0, 8.0).unwrap();
        assert!((m0[0] - PI).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moments_match_gamma() {
        let m = gaussian_moments(1, 2.0).unwrap();
        // γ(1,2) = 1 − e^{−2}; γ(2,2) = 1 − 3e^{−2}.
        assert!((m[0] - PI * (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-14);
        assert!((m[1] - PI * (1.0 - 3.0 * (-2.0f64).exp()) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn ball2_volume_moment() {
        let m = ball2_moments(1);
        assert!((m[0] - PI * PI / 2.0).abs() < 1e-12);
        // ∫|z2|² = π²·1/3! = π²/6.
        assert!((m[1] - PI * PI / 6.0).abs() < 1e-12);
    }
}
