//! The boundedness experiment: ratios
//! `||D_m f||^2_{alpha+beta+2m} / ||f||^2_{alpha (x) beta}` over random inputs,
//! at two grid resolutions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mixture::{GaussianMixture, MixtureSpec};
use super::norms::frac_norm;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub m: u32,
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
    pub box_len: f64,
}

impl BoundParams {
    /// Target parameter `alpha + beta + 2m`.
    pub fn target(&self) -> f64 {
        self.alpha + self.beta + 2.0 * self.m as f64
    }

    /// `0 < alpha, beta < d/2` and `alpha + beta + 2m < d/2`.
    pub fn check(&self) -> Result<()> {
        let half = self.d as f64 / 2.0;
        if self.d == 0 {
            return Err(Error::Range("dimension must be positive".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < half) {
                return Err(Error::Range(format!("{name} = {v} outside (0, d/2) = (0, {half})")));
            }
        }
        if self.target() >= half {
            return Err(Error::Range(format!(
                "alpha + beta + 2m = {} is not below d/2 = {half}",
                self.target()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub box_len: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub params: BoundParams,
    pub grid: GridInfo,
    pub refined_grid: GridInfo,
    pub ratios: Vec<f64>,
    pub refined_ratios: Vec<f64>,
    pub max_ratio: f64,
    pub refined_max_ratio: f64,
    pub refinement_drift: f64,
    pub all_finite: bool,
    pub seed: u64,
}

/// `||D_m f||^2_{alpha+beta+2m} / ||f||^2_{alpha (x) beta}` for a mixture of
/// `2d` variables.
pub fn bound_ratio(f: &GaussianMixture, params: &BoundParams, n: usize) -> Result<f64> {
    let sep = f.to_separable(n, params.box_len)?;
    let image = sep.apply_d(params.m, params.alpha, params.beta)?;
    let num = frac_norm(&image, params.target())?;
    let den = sep.tensor_norm(params.alpha, params.beta)?;
    Ok(num / den)
}

/// Random input number `trial` for a given seed.
pub fn trial_input(params: &BoundParams, trial: usize) -> GaussianMixture {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(trial as u64);
    GaussianMixture::random(&mut rng, 2 * params.d, &MixtureSpec::middle_half(params.box_len))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn bound_experiment(params: &BoundParams) -> Result<BoundReport> {
    params.check()?;
    let inputs: Vec<GaussianMixture> = (0..params.trials).map(|t| trial_input(params, t)).collect();
    let ratios_at = |n: usize| -> Result<Vec<f64>> { inputs.par_iter().map(|f| bound_ratio(f, params, n)).collect() };
    let ratios = ratios_at(params.n)?;
    let refined_ratios = ratios_at(2 * params.n)?;
    let max_ratio = max_of(&ratios);
    let refined_max_ratio = max_of(&refined_ratios);
    let all_finite = ratios.iter().chain(&refined_ratios).all(|r| r.is_finite());
    Ok(BoundReport {
        params: *params,
        grid: GridInfo {
            n: params.n,
            box_len: params.box_len,
        },
        refined_grid: GridInfo {
            n: 2 * params.n,
            box_len: params.box_len,
        },
        refinement_drift: (refined_max_ratio - max_ratio).abs() / max_ratio,
        ratios,
        refined_ratios,
        max_ratio,
        refined_max_ratio,
        all_finite,
        seed: params.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, a: f64, b: f64, m: u32) -> BoundParams {
        BoundParams {
            d,
            alpha: a,
            beta: b,
            m,
            trials: 6,
            seed: 42,
            n: 64,
            box_len: 20.0,
        }
    }

    #[test]
    fn hypotheses() {
        assert!(params(1, 0.2, 0.2, 0).check().is_ok());
        assert!(matches!(params(1, 0.3, 0.3, 0).check(), Err(Error::Range(_))));
        assert!(matches!(params(1, 0.0, 0.2, 0).check(), Err(Error::Range(_))));
        assert!(matches!(params(1, 0.1, 0.1, 1).check(), Err(Error::Range(_))));
        assert!(params(5, 0.1, 0.1, 1).check().is_ok());
        assert!(matches!(bound_experiment(&params(1, 0.3, 0.3, 0)), Err(Error::Range(_))));
    }

    #[test]
    fn small_run_is_stable_and_reproducible() {
        let p = params(1, 0.2, 0.2, 0);
        let a = bound_experiment(&p).unwrap();
        let b = bound_experiment(&p).unwrap();
        assert_eq!(a, b);
        assert!(a.all_finite && a.ratios.len() == 6);
        assert!(a.refinement_drift < 0.1);
    }

    #[test]
    fn product_of_gaussians_has_positive_ratio() {
        let p = params(1, 0.2, 0.2, 0);
        let f = GaussianMixture::single(vec![0.0, 0.0], 1.0);
        assert!(bound_ratio(&f, &p, 128).unwrap() > 0.0);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let p = params(1, 0.15, 0.2, 0);
        let f = trial_input(&p, 0);
        let mut g = f.clone();
        for c in &mut g.components {
            c.amplitude *= -3.5;
        }
        let (a, b) = (bound_ratio(&f, &p, 128).unwrap(), bound_ratio(&g, &p, 128).unwrap());
        assert!((a - b).abs() < 1e-12 * a);
    }
}
