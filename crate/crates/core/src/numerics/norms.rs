//! Complementary-series norms `||f||_mu^2 = int |F f(xi)|^2 |xi|^{d - 2 mu} dxi`
//! and their tensor-product analogue.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{pairwise_sum, GridFunction, Spectrum};
use super::quadrature::{gauss_legendre, gauss_legendre_panel, gauss_power_weight};
use crate::error::{Error, Result};

/// How the multiplier integral is discretized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormRule {
    /// Riemann sum over the DFT frequencies. The zero bin gets weight 0 when
    /// the multiplier is singular there and 1 when it is identically 1.
    Lattice,
    /// Radial product rule: Gauss-Jacobi on `[0, inner_radius]` absorbing
    /// `|xi|^{d - 2 mu} |xi|^{d - 1}`, then dyadic Gauss-Legendre panels up to
    /// the Nyquist frequency, trapezoidal in the angle for `d = 2`. `F f` is
    /// evaluated off the lattice by the trapezoidal sum. Supports `d <= 2`.
    Radial {
        inner_radius: f64,
        points: usize,
        angles: usize,
    },
}

impl NormRule {
    pub fn radial() -> Self {
        NormRule::Radial {
            inner_radius: 1.0,
            points: 32,
            angles: 64,
        }
    }
}

pub(crate) fn check_parameter(mu: f64, d: usize, what: &str) -> Result<()> {
    if !(mu > 0.0 && mu < d as f64) {
        return Err(Error::Range(format!("{what} = {mu} outside the complementary range (0, {d})")));
    }
    Ok(())
}

/// `|xi|^exponent` with the lattice convention at `xi = 0`.
pub fn lattice_weight(xi_norm: f64, exponent: f64) -> f64 {
    if xi_norm == 0.0 {
        if exponent == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        xi_norm.powf(exponent)
    }
}

pub fn frac_norm(f: &GridFunction, mu: f64) -> Result<f64> {
    frac_norm_with(f, mu, NormRule::Lattice)
}

pub fn frac_norm_with(f: &GridFunction, mu: f64, rule: NormRule) -> Result<f64> {
    let d = f.dims();
    check_parameter(mu, d, "mu")?;
    let exponent = d as f64 - 2.0 * mu;
    match rule {
        NormRule::Lattice => Ok(spectrum_norm(&f.fourier(), &[(d, exponent)])),
        NormRule::Radial {
            inner_radius,
            points,
            angles,
        } => radial_norm(f, exponent, inner_radius, points, angles),
    }
}

/// `||f||^2_{alpha (x) beta}` for a function of `2d` variables.
pub fn tensor_norm(f: &GridFunction, alpha: f64, beta: f64) -> Result<f64> {
    if !f.dims().is_multiple_of(2) {
        return Err(Error::Grid("tensor norm needs an even number of axes".into()));
    }
    let d = f.dims() / 2;
    check_parameter(alpha, d, "alpha")?;
    check_parameter(beta, d, "beta")?;
    Ok(spectrum_norm(
        &f.fourier(),
        &[(d, d as f64 - 2.0 * alpha), (d, d as f64 - 2.0 * beta)],
    ))
}

/// Lattice sum of `|F f|^2` times a product of radial weights, one per block
/// of axes `(block_dims, exponent)`.
pub(crate) fn spectrum_norm(spec: &Spectrum, blocks: &[(usize, f64)]) -> f64 {
    let shape = spec.shape();
    let cell = spec.frequency_step().powi(shape.dims as i32);
    let values: Vec<f64> = spec
        .data()
        .par_iter()
        .enumerate()
        .map_init(
            || vec![0usize; shape.dims],
            |idx, (flat, v)| {
                shape.unflatten(flat, idx);
                let mut weight = 1.0;
                let mut axis = 0;
                for &(bd, exponent) in blocks {
                    let r2: f64 = idx[axis..axis + bd].iter().map(|&m| spec.wavenumber(m).powi(2)).sum();
                    weight *= lattice_weight(r2.sqrt(), exponent);
                    axis += bd;
                }
                weight * v.norm_sqr()
            },
        )
        .collect();
    cell * pairwise_sum(&values)
}

/// `int F f conj(F g) |xi|^exponent dxi` by the lattice rule.
pub(crate) fn weighted_inner(fs: &Spectrum, gs: &Spectrum, exponent: f64) -> Complex64 {
    let shape = fs.shape();
    let cell = fs.frequency_step().powi(shape.dims as i32);
    let mut idx = vec![0usize; shape.dims];
    let mut re = Vec::with_capacity(shape.len());
    let mut im = Vec::with_capacity(shape.len());
    for (flat, (a, b)) in fs.data().iter().zip(gs.data()).enumerate() {
        shape.unflatten(flat, &mut idx);
        let r2: f64 = idx.iter().map(|&m| fs.wavenumber(m).powi(2)).sum();
        let v = a * b.conj() * lattice_weight(r2.sqrt(), exponent);
        re.push(v.re);
        im.push(v.im);
    }
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * cell
}

/// Trapezoidal Fourier transform at an arbitrary frequency.
fn transform_at(f: &GridFunction, xi: &[f64]) -> Complex64 {
    let n = f.n();
    let h = f.spacing();
    let d = f.dims();
    let phases: Vec<Vec<Complex64>> = xi
        .iter()
        .map(|&w| (0..n).map(|k| Complex64::from_polar(1.0, -w * f.coordinate(k))).collect())
        .collect();
    let data = f.data();
    let sum = match d {
        1 => data.iter().zip(&phases[0]).map(|(v, p)| v * p).sum::<Complex64>(),
        2 => data
            .chunks(n)
            .zip(&phases[0])
            .map(|(row, p0)| p0 * row.iter().zip(&phases[1]).map(|(v, p)| v * p).sum::<Complex64>())
            .sum(),
        _ => unreachable!("checked by the caller"),
    };
    sum * (2.0 * PI).powf(-(d as f64) / 2.0) * h.powi(d as i32)
}

fn radial_norm(f: &GridFunction, exponent: f64, inner: f64, points: usize, angles: usize) -> Result<f64> {
    let d = f.dims();
    if d > 2 {
        return Err(Error::Unsupported(format!("radial norm rule is implemented for d <= 2, got {d}")));
    }
    let directions: Vec<Vec<f64>> = if d == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..angles)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / angles as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()
    };
    let sphere_weight = if d == 1 { 1.0 } else { 2.0 * PI / angles as f64 };
    let shell = |rho: f64| -> f64 {
        let v: f64 = directions
            .iter()
            .map(|dir| {
                let xi: Vec<f64> = dir.iter().map(|c| c * rho).collect();
                transform_at(f, &xi).norm_sqr()
            })
            .sum();
        v * sphere_weight
    };
    let p = exponent + d as f64 - 1.0;
    let nyquist = PI / f.spacing();
    let (nodes, weights) = gauss_power_weight(points, p, inner.min(nyquist));
    let mut parts: Vec<f64> = nodes.par_iter().zip(&weights).map(|(r, w)| w * shell(*r)).collect();
    let legendre = gauss_legendre(points);
    let mut panels = Vec::new();
    let mut lo = inner;
    while lo < nyquist {
        let hi = (2.0 * lo).min(nyquist);
        panels.push((lo, hi));
        lo = hi;
    }
    parts.extend(
        panels
            .par_iter()
            .map(|&(lo, hi)| gauss_legendre_panel(&legendre, lo, hi, |r| r.powf(p) * shell(r)))
            .collect::<Vec<_>>(),
    );
    Ok(pairwise_sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn gaussian(dims: usize, n: usize, l: f64) -> GridFunction {
        GridFunction::from_real_fn(dims, n, l, |x| (-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp()).unwrap()
    }

    #[test]
    fn gamma_oracle_radial_rule() {
        let f = gaussian(1, 1024, 20.0);
        for mu in [0.2, 0.5, 0.8] {
            let v = frac_norm_with(&f, mu, NormRule::radial()).unwrap();
            let expected = gamma(1.0 - mu);
            assert!((v - expected).abs() < 1e-9 * expected, "mu={mu}: {v} vs {expected}");
        }
    }

    #[test]
    fn gamma_oracle_two_dimensions() {
        // int e^{-|xi|^2} |xi|^{2 - 2 mu} dxi over R^2 = pi Gamma(2 - mu)
        let f = gaussian(2, 64, 20.0);
        let mu = 0.7;
        let v = frac_norm_with(&f, mu, NormRule::Radial { inner_radius: 1.0, points: 24, angles: 16 }).unwrap();
        let expected = PI * gamma(2.0 - mu);
        assert!((v - expected).abs() < 1e-9 * expected, "{v} vs {expected}");
    }

    #[test]
    fn lattice_rule_at_flat_weight() {
        // mu = d/2 makes the multiplier 1, so the lattice sum is Parseval
        let f = gaussian(1, 256, 20.0);
        let v = frac_norm(&f, 0.5).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12 * v);
        assert!((v - f.l2_norm_sq()).abs() < 1e-12 * v);
    }

    #[test]
    fn range_and_zero() {
        let f = gaussian(1, 64, 20.0);
        assert!(matches!(frac_norm(&f, 0.0), Err(Error::Range(_))));
        assert!(matches!(frac_norm(&f, 1.0), Err(Error::Range(_))));
        let z = GridFunction::zeros(1, 64, 20.0).unwrap();
        assert_eq!(frac_norm(&z, 0.4).unwrap(), 0.0);
        assert!(frac_norm(&f, 0.4).unwrap() > 0.0);
    }

    #[test]
    fn scaling_law() {
        let lam: f64 = 1.5;
        for mu in [0.25, 0.6] {
            let f = gaussian(1, 1024, 20.0);
            let g = GridFunction::from_real_fn(1, 1024, 20.0, |x| (-(lam * x[0]).powi(2) / 2.0).exp()).unwrap();
            let a = frac_norm_with(&g, mu, NormRule::radial()).unwrap();
            let b = lam.powf(-2.0 * mu) * frac_norm_with(&f, mu, NormRule::radial()).unwrap();
            assert!((a - b).abs() < 1e-6 * b);
        }
    }

    #[test]
    fn tensor_norm_of_product() {
        let g = GridFunction::from_real_fn(1, 64, 20.0, |x| (-(x[0] - 1.0).powi(2)).exp()).unwrap();
        let h = GridFunction::from_real_fn(1, 64, 20.0, |x| (-x[0] * x[0] / 3.0).exp() * x[0]).unwrap();
        let gh = g.tensor(&h).unwrap();
        let v = tensor_norm(&gh, 0.2, 0.7).unwrap();
        let expected = frac_norm(&g, 0.2).unwrap() * frac_norm(&h, 0.7).unwrap();
        assert!((v - expected).abs() < 1e-10 * expected);
        let z = GridFunction::zeros(2, 16, 20.0).unwrap();
        assert_eq!(tensor_norm(&z, 0.2, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn tensor_gaussians_match_oracle() {
        let f = gaussian(2, 256, 20.0);
        let v = tensor_norm(&f, 0.2, 0.2).unwrap();
        let g = gaussian(1, 256, 20.0);
        let single = frac_norm(&g, 0.2).unwrap();
        assert!((v - single * single).abs() < 1e-10 * v);
        let radial = frac_norm_with(&g, 0.2, NormRule::radial()).unwrap();
        assert!((radial * radial - gamma(0.8).powi(2)).abs() < 1e-9 * v);
    }

    #[test]
    fn parseval_at_half_dimension() {
        let f = GridFunction::from_real_fn(2, 64, 20.0, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp() * (x[0] - x[1])).unwrap();
        let v = tensor_norm(&f, 0.5, 0.5).unwrap();
        assert!((v - f.l2_norm_sq()).abs() < 1e-10 * v);
    }
}
