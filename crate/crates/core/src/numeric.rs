//! Small numeric utilities shared across the crate: deterministic
//! pairwise summation and Gauss–Legendre nodes.

use num_complex::Complex64;

/// Pairwise (fixed binary tree) summation. The combination tree depends
/// only on the slice length, so the result is schedule-independent and
/// bit-reproducible for identical inputs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Complex variant of [`pairwise_sum`], same fixed tree.
pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 32 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence, Chebyshev initial
/// guesses. Deterministic; accurate to machine precision for the
/// orders used in this crate (n ≤ a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { p1 } else { p1 };
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Ascending order keeps downstream node ordering deterministic.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| w * half).collect(),
    )
}

/// Lower incomplete gamma `γ(j+1, x)` for integer order. Below the
/// order the ascending series (all terms positive) avoids the
/// cancellation that makes the upward recurrence go negative; above it
/// the complement of the truncated exponential sum is stable.
pub fn lower_gamma_int(j: usize, x: f64) -> f64 {
    let a = j as f64 + 1.0;
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // γ(a, x) = x^a e^{−x} Σ_{n≥0} x^n / (a(a+1)⋯(a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = 1.0;
        while term > 1e-17 * sum {
            term *= x / (a + n);
            sum += term;
            n += 1.0;
        }
        x.powf(a) * (-x).exp() * sum
    } else {
        // γ(j+1, x) = j! (1 − e^{−x} Σ_{m=0}^{j} x^m/m!)
        let mut fact = 1.0;
        let mut esum = 1.0;
        let mut xpow = 1.0;
        for m in 1..=j {
            xpow *= x / m as f64;
            esum += xpow;
            fact *= m as f64;
        }
        fact * (1.0 - (-x).exp() * esum)
    }
}
