//! Signed log-Gamma and the Knapp-Stein normalizing constant.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::ratfun::PoleError;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0)
}

/// `(ln |Gamma(x)|, sign Gamma(x))`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(x) {
        return Err(PoleError { factor: format!("Gamma({x})") }.into());
    }
    if x > 0.0 {
        return Ok((ln_gamma(x), 1.0));
    }
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    let s = (PI * x).sin();
    Ok((PI.ln() - s.abs().ln() - ln_gamma(1.0 - x), s.signum()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KnappSteinConstant {
    pub mu: f64,
    pub rho: f64,
    pub n: u32,
    /// From `Gamma(rho - mu/2) Gamma(rho - mu/2 + 1/2) / (Gamma(n/2) Gamma(rho - mu))`.
    pub value: f64,
    /// From `2^{mu - 2 rho + 1} sqrt(pi) Gamma(2 rho - mu) / (Gamma(n/2) Gamma(rho - mu))`.
    pub duplicated: f64,
    pub rel_discrepancy: f64,
}

fn signed_product(factors: &[(f64, i32)]) -> Result<(f64, f64)> {
    let mut log = 0.0;
    let mut sign = 1.0;
    for &(arg, power) in factors {
        let (l, s) = ln_gamma_signed(arg)?;
        log += power as f64 * l;
        sign *= s;
    }
    Ok((log, sign))
}

/// Constant `C_mu` of the kernel `C_mu |x - y|^{-2 mu}` on `R^{n-1}`.
pub fn knapp_stein_constant(mu: f64, n: u32) -> Result<KnappSteinConstant> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    let rho = (n as f64 - 1.0) / 2.0;
    let half_n = n as f64 / 2.0;
    let (l1, s1) = signed_product(&[(rho - mu / 2.0, 1), (rho - mu / 2.0 + 0.5, 1), (half_n, -1), (rho - mu, -1)])?;
    let (l2, s2) = signed_product(&[(2.0 * rho - mu, 1), (half_n, -1), (rho - mu, -1)])?;
    let value = s1 * l1.exp();
    let duplicated = s2 * ((mu - 2.0 * rho + 1.0) * 2f64.ln() + 0.5 * PI.ln() + l2).exp();
    let rel_discrepancy = (value - duplicated).abs() / value.abs().max(f64::MIN_POSITIVE);
    Ok(KnappSteinConstant {
        mu,
        rho,
        n,
        value,
        duplicated,
        rel_discrepancy,
    })
}
