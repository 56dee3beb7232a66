//! Gauss rules from the Golub-Welsch eigenproblem and tanh-sinh quadrature.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights of the `n`-point Gauss-Jacobi rule for the weight
/// `(1 - x)^a (1 + x)^b` on `[-1, 1]`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0 && a > -1.0 && b > -1.0);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        jac[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let beta = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
            jac[(k, k + 1)] = beta.sqrt();
            jac[(k + 1, k)] = beta.sqrt();
        }
    }
    let mu0 = ((a + b + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)).exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Rule for `int_0^r x^p g(x) dx`, exact for polynomial `g` of degree `< 2n`.
pub fn gauss_power_weight(n: usize, p: f64, r: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, 0.0, p);
    let scale = (r / 2.0).powf(p + 1.0);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| (r * (1.0 + xi) / 2.0, wi * scale))
        .unzip()
}

/// `int_lo^hi f` by Gauss-Legendre on one panel.
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(nodes: &(Vec<f64>, Vec<f64>), lo: f64, hi: f64, f: F) -> f64 {
    let half = (hi - lo) / 2.0;
    let mid = (hi + lo) / 2.0;
    nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// `int_a^b f` by tanh-sinh with step halving until successive levels agree
/// to `tol` (relative). The integrand is never evaluated at the endpoints.
/// Abscissae near `a` are formed as `a + gap` with the gap computed without
/// cancellation, so an integrable singularity is best placed at `a = 0`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let half = (b - a) / 2.0;
    let t_max = 5.0;
    let node = |t: f64| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let x = if u < 0.0 {
            a + (b - a) / (1.0 + (-2.0 * u).exp())
        } else {
            b - (b - a) / (1.0 + (2.0 * u).exp())
        };
        if x <= a || x >= b {
            return None;
        }
        let w = half * FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        Some(w * f(x))
    };
    let mut step = 0.5;
    let mut sum = node(0.0).unwrap_or(0.0);
    let mut k = 1;
    while k as f64 * step <= t_max {
        let t = k as f64 * step;
        sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
        k += 1;
    }
    let mut estimate = sum * step;
    for _ in 0..12 {
        step /= 2.0;
        let mut k = 1;
        while k as f64 * step <= t_max {
            let t = k as f64 * step;
            sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
            k += 2;
        }
        let next = sum * step;
        if (next - estimate).abs() <= tol * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}
