//! Isotropic Gaussian mixtures used as smooth, well-localized test inputs.

use rand::Rng;
use serde::Serialize;

use super::bilinear::SeparableField;
use super::grid::GridFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gaussian {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianMixture {
    pub dims: usize,
    pub components: Vec<Gaussian>,
}

/// Ranges for [`GaussianMixture::random`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureSpec {
    pub max_components: usize,
    /// Centers are uniform in `[-center_radius, center_radius]^dims`.
    pub center_radius: f64,
    pub sigma: (f64, f64),
}

impl MixtureSpec {
    /// Centers in the middle half of a box of side `box_len`, widths small
    /// enough that the values on the box boundary stay below `1e-10`.
    pub fn middle_half(box_len: f64) -> Self {
        let gap = box_len / 4.0;
        Self {
            max_components: 4,
            center_radius: box_len / 4.0,
            sigma: (gap / 10.0, gap / 50f64.sqrt()),
        }
    }
}

impl GaussianMixture {
    pub fn single(center: Vec<f64>, sigma: f64) -> Self {
        Self {
            dims: center.len(),
            components: vec![Gaussian {
                amplitude: 1.0,
                center,
                sigma,
            }],
        }
    }

    pub fn random<R: Rng>(rng: &mut R, dims: usize, spec: &MixtureSpec) -> Self {
        let k = rng.gen_range(1..=spec.max_components);
        let components = (0..k)
            .map(|_| Gaussian {
                amplitude: rng.gen_range(-1.0..=1.0),
                center: (0..dims).map(|_| rng.gen_range(-spec.center_radius..=spec.center_radius)).collect(),
                sigma: rng.gen_range(spec.sigma.0..=spec.sigma.1),
            })
            .collect();
        Self { dims, components }
    }

    /// Mixture of `2d` variables whose components sit within one width of the
    /// diagonal `x = y`, so that the restriction to the diagonal is not small.
    pub fn random_near_diagonal<R: Rng>(rng: &mut R, d: usize, spec: &MixtureSpec) -> Self {
        let mut out = Self::random(rng, 2 * d, spec);
        for g in &mut out.components {
            for k in 0..d {
                g.center[d + k] = g.center[k] + rng.gen_range(-g.sigma..=g.sigma);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|g| {
                let r2: f64 = x.iter().zip(&g.center).map(|(a, b)| (a - b).powi(2)).sum();
                g.amplitude * (-r2 / (2.0 * g.sigma * g.sigma)).exp()
            })
            .sum()
    }

    pub fn sample(&self, n: usize, box_len: f64) -> Result<GridFunction> {
        GridFunction::from_real_fn(self.dims, n, box_len, |x| self.eval(x))
    }

    /// The same function of `2d` variables held as a sum of products
    /// `g_k(x) h_k(y)`.
    pub fn to_separable(&self, n: usize, box_len: f64) -> Result<SeparableField> {
        if !self.dims.is_multiple_of(2) {
            return Err(Error::Grid("separable form needs an even number of variables".into()));
        }
        let d = self.dims / 2;
        let mut out = SeparableField::new(d, n, box_len);
        for g in &self.components {
            let block = |c: &[f64], amp: f64| {
                let c = c.to_vec();
                let s2 = 2.0 * g.sigma * g.sigma;
                GridFunction::from_real_fn(d, n, box_len, move |x| {
                    amp * (-x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / s2).exp()
                })
            };
            out.push(block(&g.center[..d], g.amplitude)?, block(&g.center[d..], 1.0)?)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_mixture_respects_spec() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = MixtureSpec::middle_half(20.0);
        for _ in 0..20 {
            let m = GaussianMixture::random(&mut rng, 2, &spec);
            assert!((1..=4).contains(&m.components.len()));
            for g in &m.components {
                assert!(g.center.iter().all(|c| c.abs() <= 5.0));
                assert!((0.5..=0.71).contains(&g.sigma));
                assert!(g.amplitude.abs() <= 1.0);
            }
        }
    }

    #[test]
    fn leakage_at_box_edge_is_negligible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = GaussianMixture::random(&mut rng, 1, &MixtureSpec::middle_half(20.0));
            assert!(m.eval(&[10.0]).abs() < 1e-10 && m.eval(&[-10.0]).abs() < 1e-10);
        }
    }

    #[test]
    fn separable_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = GaussianMixture::random(&mut rng, 2, &MixtureSpec::middle_half(20.0));
        let dense = m.sample(32, 20.0).unwrap();
        let sep = m.to_separable(32, 20.0).unwrap().to_dense().unwrap();
        assert!(sep.rel_max_diff(&dense).unwrap() < 1e-14);
    }
}
