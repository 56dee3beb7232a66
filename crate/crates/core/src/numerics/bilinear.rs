//! Application of `D_{alpha,beta,m} f = (E_{alpha,beta,m} f)|_{x=y}` on grids.
//!
//! The dense path transforms all `2d` axes, multiplies by the symbol
//! `Q(-|xi|^2, -|eta|^2, -<xi,eta>)` and restricts to the diagonal. The
//! separable path keeps `f = sum_k g_k (x) h_k` and expands
//! `(grad_x . grad_y)^c = sum_{|g| = c} c!/g! d_x^g d_y^g`, so only
//! `d`-dimensional transforms are needed.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{GridFunction, Spectrum};
use super::group::{group_action, GroupElement};
use super::norms::{check_parameter, weighted_inner};
use crate::error::{Error, Result};
use crate::operators::{fourier_symbol, NumericSymbol};

/// The symbol of `E_{alpha,beta,m}` at numeric parameters on `R^d`.
pub fn numeric_symbol(m: u32, alpha: f64, beta: f64, d: usize) -> Result<NumericSymbol> {
    fourier_symbol(m).numeric(alpha, beta, d as f64)
}

/// `D_{alpha,beta,m} f` for `f` sampled on a `2d`-dimensional grid.
pub fn apply_d_grid(f: &GridFunction, m: u32, alpha: f64, beta: f64) -> Result<GridFunction> {
    if !f.dims().is_multiple_of(2) {
        return Err(Error::Grid("bilinear operator needs a function of 2d variables".into()));
    }
    if m == 0 {
        return f.restrict_diagonal();
    }
    let d = f.dims() / 2;
    let q = numeric_symbol(m, alpha, beta, d)?;
    let mut spec = f.fourier();
    spec.multiply(|k| Complex64::new(q.at_frequencies(&k[..d], &k[d..]), 0.0));
    spec.inverse().restrict_diagonal()
}

/// Finite sum of products `g_k(x) h_k(y)` on a `d`-dimensional grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableField {
    d: usize,
    n: usize,
    box_len: f64,
    terms: Vec<(GridFunction, GridFunction)>,
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `F^{-1}[ (-|xi|^2)^a prod (i xi_j)^{g_j} F g ]`.
fn derivative(spec: &Spectrum, laplace_power: u32, gamma: &[u32]) -> GridFunction {
    let mut s = spec.clone();
    if laplace_power == 0 && gamma.iter().all(|&g| g == 0) {
        return s.inverse();
    }
    s.multiply(|xi| {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        let mut factor = Complex64::new((-r2).powi(laplace_power as i32), 0.0);
        for (v, &g) in xi.iter().zip(gamma) {
            factor *= Complex64::new(0.0, *v).powu(g);
        }
        factor
    });
    s.inverse()
}

impl SeparableField {
    pub fn new(d: usize, n: usize, box_len: f64) -> Self {
        Self {
            d,
            n,
            box_len,
            terms: Vec::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(GridFunction, GridFunction)] {
        &self.terms
    }

    pub fn push(&mut self, left: GridFunction, right: GridFunction) -> Result<()> {
        for g in [&left, &right] {
            if g.dims() != self.d || g.n() != self.n || g.box_len() != self.box_len {
                return Err(Error::Grid("separable factor lives on a different grid".into()));
            }
        }
        self.terms.push((left, right));
        Ok(())
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        for (g, _) in &mut out.terms {
            *g = g.scale(Complex64::new(k, 0.0));
        }
        out
    }

    /// Dense samples on the `2d`-dimensional grid.
    pub fn to_dense(&self) -> Result<GridFunction> {
        let mut out = GridFunction::zeros(2 * self.d, self.n, self.box_len)?;
        for (g, h) in &self.terms {
            out = out.add(&g.tensor(h)?)?;
        }
        Ok(out)
    }

    /// `||f||^2_{alpha (x) beta}` from Gram matrices of the factors.
    pub fn tensor_norm(&self, alpha: f64, beta: f64) -> Result<f64> {
        check_parameter(alpha, self.d, "alpha")?;
        check_parameter(beta, self.d, "beta")?;
        let (ea, eb) = (self.d as f64 - 2.0 * alpha, self.d as f64 - 2.0 * beta);
        let left: Vec<Spectrum> = self.terms.par_iter().map(|(g, _)| g.fourier()).collect();
        let right: Vec<Spectrum> = self.terms.par_iter().map(|(_, h)| h.fourier()).collect();
        let k = self.terms.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| (weighted_inner(&left[i], &left[j], ea) * weighted_inner(&right[i], &right[j], eb)).re)
            .collect();
        Ok(super::grid::pairwise_sum(&values))
    }

    /// `D_{alpha,beta,m} f` on the `d`-dimensional grid.
    pub fn apply_d(&self, m: u32, alpha: f64, beta: f64) -> Result<GridFunction> {
        let mut out = GridFunction::zeros(self.d, self.n, self.box_len)?;
        if m == 0 {
            for (g, h) in &self.terms {
                out = out.add(&g.mul(h)?)?;
            }
            return Ok(out);
        }
        let q = numeric_symbol(m, alpha, beta, self.d)?;
        let parts: Vec<GridFunction> = self
            .terms
            .par_iter()
            .map(|(g, h)| -> Result<GridFunction> {
                let (gs, hs) = (g.fourier(), h.fourier());
                let mut left_cache: HashMap<(u32, Vec<u32>), GridFunction> = HashMap::new();
                let mut right_cache: HashMap<(u32, Vec<u32>), GridFunction> = HashMap::new();
                let mut acc = GridFunction::zeros(self.d, self.n, self.box_len)?;
                for (mono, coeff) in &q.terms {
                    for gamma in compositions(mono.c, self.d) {
                        let weight = coeff * factorial(mono.c) / gamma.iter().map(|&k| factorial(k)).product::<f64>();
                        let gl = left_cache
                            .entry((mono.a, gamma.clone()))
                            .or_insert_with(|| derivative(&gs, mono.a, &gamma))
                            .clone();
                        let hr = right_cache
                            .entry((mono.b, gamma.clone()))
                            .or_insert_with(|| derivative(&hs, mono.b, &gamma));
                        acc = acc.add(&gl.mul(hr)?.scale(Complex64::new(weight, 0.0)))?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        for p in parts {
            out = out.add(&p)?;
        }
        Ok(out)
    }

    /// `(pi_alpha (x) pi_beta)(g) f`, acting on each factor.
    pub fn action(&self, g: &GroupElement, alpha: f64, beta: f64) -> Result<Self> {
        let mut out = Self::new(self.d, self.n, self.box_len);
        for (l, r) in &self.terms {
            out.push(group_action(l, g, alpha)?, group_action(r, g, beta)?)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::group::tensor_action;
    use crate::numerics::mixture::{GaussianMixture, MixtureSpec};
    use crate::numerics::norms::tensor_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mixture(dims: usize, seed: u64) -> GaussianMixture {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GaussianMixture::random(&mut rng, dims, &MixtureSpec::middle_half(20.0))
    }

    #[test]
    fn order_zero_is_restriction() {
        let m = mixture(2, 1);
        let f = m.sample(64, 20.0).unwrap();
        let d = apply_d_grid(&f, 0, 0.2, 0.2).unwrap();
        let expected = GridFunction::from_real_fn(1, 64, 20.0, |x| m.eval(&[x[0], x[0]])).unwrap();
        assert!(d.rel_max_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn plane_waves_are_eigenfunctions() {
        let (l, n) = (20.0, 64);
        let step = 2.0 * std::f64::consts::PI / l;
        let (xi, eta) = (3.0 * step, -5.0 * step);
        let f = GridFunction::from_fn(2, n, l, |x| Complex64::from_polar(1.0, xi * x[0] + eta * x[1])).unwrap();
        for m in 1..=3 {
            let (alpha, beta) = (0.3, 0.45);
            let out = apply_d_grid(&f, m, alpha, beta).unwrap();
            let q = numeric_symbol(m, alpha, beta, 1).unwrap().at_frequencies(&[xi], &[eta]);
            let expected = GridFunction::from_fn(1, n, l, |x| Complex64::from_polar(q, (xi + eta) * x[0])).unwrap();
            assert!(out.rel_max_diff(&expected).unwrap() < 1e-8, "m={m}");
        }
    }

    #[test]
    fn linearity() {
        let f = mixture(2, 2).sample(64, 20.0).unwrap();
        let g = mixture(2, 3).sample(64, 20.0).unwrap();
        let sum = apply_d_grid(&f.add(&g).unwrap(), 2, 0.2, 0.3).unwrap();
        let parts = apply_d_grid(&f, 2, 0.2, 0.3).unwrap().add(&apply_d_grid(&g, 2, 0.2, 0.3).unwrap()).unwrap();
        assert!(sum.rel_max_diff(&parts).unwrap() < 1e-12);
    }

    #[test]
    fn pole_is_reported() {
        let f = mixture(2, 4).sample(16, 20.0).unwrap();
        assert!(matches!(apply_d_grid(&f, 1, 0.0, 0.3), Err(Error::Pole(_))));
    }

    #[test]
    fn separable_agrees_with_dense() {
        let m = mixture(2, 5);
        let sep = m.to_separable(128, 20.0).unwrap();
        let dense = m.sample(128, 20.0).unwrap();
        for order in 0..=2 {
            let a = sep.apply_d(order, 0.2, 0.15).unwrap();
            let b = apply_d_grid(&dense, order, 0.2, 0.15).unwrap();
            assert!(a.rel_max_diff(&b).unwrap() < 1e-9, "m={order}");
        }
        let a = sep.tensor_norm(0.2, 0.15).unwrap();
        let b = tensor_norm(&dense, 0.2, 0.15).unwrap();
        assert!((a - b).abs() < 1e-10 * b);
    }

    #[test]
    fn separable_action_agrees_with_dense() {
        let m = mixture(2, 6);
        let sep = m.to_separable(64, 20.0).unwrap();
        let dense = m.sample(64, 20.0).unwrap();
        let g = GroupElement::Dilation(2f64.ln());
        let a = sep.action(&g, 0.2, 0.3).unwrap().to_dense().unwrap();
        let b = tensor_action(&dense, &g, 0.2, 0.3).unwrap();
        assert!(a.rel_max_diff(&b).unwrap() < 1e-14);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(2, 2).len(), 3);
        assert_eq!(compositions(3, 1), vec![vec![3]]);
    }
}
