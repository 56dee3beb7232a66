//! Monte Carlo estimate of
//!
//! ```text
//! A(zeta) = int_{R^d} |Q(-|zeta-eta|^2, -|eta|^2, -<zeta-eta,eta>)|^2
//!           |zeta - eta|^{-a} |eta|^{-b} d eta,   a = d - 2 alpha, b = d - 2 beta,
//! ```
//!
//! which is homogeneous in `zeta` of degree `4m - a - b + d`. Samples come
//! from a mixture of a power-law ball at 0 (exponent `b`), a power-law ball at
//! `zeta` (exponent `a`) and a power-law tail (exponent `a + b - 4m`), so the
//! weighted integrand stays bounded at both singularities and at infinity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};

use super::bilinear::numeric_symbol;
use super::grid::pairwise_sum;
use super::quadrature::tanh_sinh;
use crate::error::{Error, Result};
use crate::operators::NumericSymbol;

const CHUNK: usize = 4096;
const MIXTURE_WEIGHTS: [f64; 3] = [0.4, 0.3, 0.3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Set when the two halves of the run disagree by more than 5 standard
    /// errors or a single sample carries more than 5% of the total.
    pub divergence_warning: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub m: u32,
    pub samples: usize,
    pub seed: u64,
}

impl McParams {
    /// Singular exponents `(a, b) = (d - 2 alpha, d - 2 beta)`.
    pub fn exponents(&self) -> (f64, f64) {
        (self.d as f64 - 2.0 * self.alpha, self.d as f64 - 2.0 * self.beta)
    }

    pub fn homogeneity_exponent(&self) -> f64 {
        let (a, b) = self.exponents();
        4.0 * self.m as f64 - a - b + self.d as f64
    }

    fn check(&self) -> Result<()> {
        let half = self.d as f64 / 2.0;
        if self.d == 0 {
            return Err(Error::Range("dimension must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < half && self.beta > 0.0 && self.beta < half) {
            return Err(Error::Range(format!("alpha, beta must lie in (0, {half})")));
        }
        if self.alpha + self.beta + 2.0 * self.m as f64 >= half {
            return Err(Error::Range(format!("alpha + beta + 2m must be below {half}")));
        }
        if self.samples < 2 {
            return Err(Error::Range("need at least two samples".into()));
        }
        Ok(())
    }
}

fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_direction<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 0.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// The integrand of `A(zeta)` at `eta`, given also `diff = zeta - eta`.
pub fn a_integrand(q: &NumericSymbol, eta: &[f64], diff: &[f64], a: f64, b: f64) -> f64 {
    let value = q.at_frequencies(diff, eta);
    value * value * norm(diff).powf(-a) * norm(eta).powf(-b)
}

struct Proposal {
    d: usize,
    omega: f64,
    zeta: Vec<f64>,
    radius: f64,
    a: f64,
    b: f64,
    tail: f64,
}

impl Proposal {
    fn ball_density(&self, r: f64, gamma_exp: f64, radius: f64) -> f64 {
        if r >= radius {
            return 0.0;
        }
        let dd = self.d as f64;
        (dd - gamma_exp) * r.powf(-gamma_exp) / (self.omega * radius.powf(dd - gamma_exp))
    }

    fn density(&self, eta: &[f64], diff: &[f64]) -> f64 {
        let dd = self.d as f64;
        let r0 = norm(eta);
        let r1 = norm(diff);
        let tail = if r0 > self.radius {
            (self.tail - dd) * r0.powf(-self.tail) / (self.omega * self.radius.powf(dd - self.tail))
        } else {
            0.0
        };
        MIXTURE_WEIGHTS[0] * self.ball_density(r0, self.b, self.radius)
            + MIXTURE_WEIGHTS[1] * self.ball_density(r1, self.a, self.radius / 2.0)
            + MIXTURE_WEIGHTS[2] * tail
    }

    /// A draw `eta` together with `zeta - eta`, the latter formed without
    /// cancellation for draws from the ball at `zeta`.
    fn sample<R: Rng>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let dd = self.d as f64;
        let u: f64 = rng.gen();
        let v: f64 = 1.0 - rng.gen::<f64>();
        let dir = random_direction(rng, self.d);
        let (center, r) = if u < MIXTURE_WEIGHTS[0] {
            (None, self.radius * v.powf(1.0 / (dd - self.b)))
        } else if u < MIXTURE_WEIGHTS[0] + MIXTURE_WEIGHTS[1] {
            (Some(&self.zeta), self.radius / 2.0 * v.powf(1.0 / (dd - self.a)))
        } else {
            (None, self.radius * v.powf(-1.0 / (self.tail - dd)))
        };
        match center {
            None => {
                let eta: Vec<f64> = dir.iter().map(|c| c * r).collect();
                let diff = self.zeta.iter().zip(&eta).map(|(z, e)| z - e).collect();
                (eta, diff)
            }
            Some(z) => (
                dir.iter().zip(z).map(|(c, z)| z + c * r).collect(),
                dir.iter().map(|c| -c * r).collect(),
            ),
        }
    }
}

struct ChunkStats {
    sum: f64,
    sum_sq: f64,
    max_abs: f64,
    count: usize,
}

/// Importance-sampled estimate of `A(zeta)`; chunk `k` draws from the ChaCha
/// stream `k` of `seed`, so the result does not depend on the thread count.
pub fn a_integral_mc(params: &McParams, zeta: &[f64]) -> Result<MCEstimate> {
    params.check()?;
    if zeta.len() != params.d {
        return Err(Error::Domain(format!("zeta must have {} components", params.d)));
    }
    let radius = norm(zeta);
    if radius == 0.0 {
        return Err(Error::Domain("zeta must be nonzero".into()));
    }
    let q = numeric_symbol(params.m, params.alpha, params.beta, params.d)?;
    let (a, b) = params.exponents();
    let proposal = Proposal {
        d: params.d,
        omega: sphere_area(params.d),
        zeta: zeta.to_vec(),
        radius,
        a,
        b,
        tail: a + b - 4.0 * params.m as f64,
    };
    let chunks = params.samples.div_ceil(CHUNK);
    let stats: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(params.samples - k * CHUNK);
            let mut s = ChunkStats {
                sum: 0.0,
                sum_sq: 0.0,
                max_abs: 0.0,
                count,
            };
            for _ in 0..count {
                let (eta, diff) = proposal.sample(&mut rng);
                let p = proposal.density(&eta, &diff);
                let v = if p > 0.0 { a_integrand(&q, &eta, &diff, a, b) / p } else { 0.0 };
                s.sum += v;
                s.sum_sq += v * v;
                s.max_abs = s.max_abs.max(v.abs());
            }
            s
        })
        .collect();
    let summarize = |part: &[ChunkStats]| -> (f64, f64, usize) {
        let n: usize = part.iter().map(|s| s.count).sum();
        let sum = pairwise_sum(&part.iter().map(|s| s.sum).collect::<Vec<_>>());
        let sum_sq = pairwise_sum(&part.iter().map(|s| s.sum_sq).collect::<Vec<_>>());
        let mean = sum / n as f64;
        let var = ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0);
        (mean, (var / n as f64).sqrt(), n)
    };
    let (mean, std_error, n) = summarize(&stats);
    let total = mean * n as f64;
    let max_abs = stats.iter().map(|s| s.max_abs).fold(0.0, f64::max);
    let mut divergence_warning = !mean.is_finite() || max_abs > 0.05 * total.abs();
    if stats.len() >= 2 {
        let (m1, e1, _) = summarize(&stats[..stats.len() / 2]);
        let (m2, e2, _) = summarize(&stats[stats.len() / 2..]);
        divergence_warning |= (m1 - m2).abs() > 5.0 * (e1 * e1 + e2 * e2).sqrt();
    }
    Ok(MCEstimate {
        mean,
        std_error,
        samples: n,
        divergence_warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityRow {
    pub radius: f64,
    pub seed: u64,
    pub estimate: MCEstimate,
    /// `A(zeta) / |zeta|^kappa`.
    pub normalized: f64,
    pub normalized_std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub params: McParams,
    pub exponent: f64,
    pub direction: Vec<f64>,
    pub rows: Vec<HomogeneityRow>,
    /// Largest `|x_i - x_j| / sqrt(se_i^2 + se_j^2)` over pairs of normalized values.
    pub max_z: f64,
}

/// Estimates at `radius * direction` for each radius; radius `i` uses seed
/// `params.seed + i`.
pub fn homogeneity_check(params: &McParams, direction: &[f64], radii: &[f64]) -> Result<HomogeneityReport> {
    let unit = norm(direction);
    if unit == 0.0 {
        return Err(Error::Domain("direction must be nonzero".into()));
    }
    let kappa = params.homogeneity_exponent();
    let mut rows = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let p = McParams {
            seed: params.seed.wrapping_add(i as u64),
            ..*params
        };
        let zeta: Vec<f64> = direction.iter().map(|c| c / unit * r).collect();
        let est = a_integral_mc(&p, &zeta)?;
        let scale = r.powf(-kappa);
        rows.push(HomogeneityRow {
            radius: r,
            seed: p.seed,
            estimate: est,
            normalized: est.mean * scale,
            normalized_std_error: est.std_error * scale,
        });
    }
    let mut max_z: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let se = rows[i].normalized_std_error.hypot(rows[j].normalized_std_error);
            max_z = max_z.max((rows[i].normalized - rows[j].normalized).abs() / se);
        }
    }
    Ok(HomogeneityReport {
        params: *params,
        exponent: kappa,
        direction: direction.to_vec(),
        rows,
        max_z,
    })
}

/// `A(zeta)` for `d = 1`, `m = 0` by tanh-sinh quadrature on pieces that put
/// every singularity at a left endpoint at 0.
pub fn a_integral_quadrature_1d(alpha: f64, beta: f64, zeta: f64) -> f64 {
    let (a, b) = (1.0 - 2.0 * alpha, 1.0 - 2.0 * beta);
    let z = zeta.abs();
    // integrand in terms of the distances |zeta - eta| and |eta|
    let g = |p: f64, q: f64| p.powf(-a) * q.powf(-b);
    let tol = 1e-12;
    let pieces = [
        tanh_sinh(|y| g(z - y, y), 0.0, z / 2.0, tol),
        tanh_sinh(|y| g(y, z - y), 0.0, z / 2.0, tol),
        tanh_sinh(|y| g(y, z + y), 0.0, z, tol),
        // (2z, inf) and (-inf, -z) through eta = +-1/u
        tanh_sinh(|u| g(1.0 / u - z, 1.0 / u) / (u * u), 0.0, 1.0 / (2.0 * z), tol),
        tanh_sinh(|y| g(z + y, y), 0.0, z, tol),
        tanh_sinh(|u| g(z + 1.0 / u, 1.0 / u) / (u * u), 0.0, 1.0 / z, tol),
    ];
    pairwise_sum(&pieces)
}

fn beta_fn(x: f64, y: f64) -> f64 {
    (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
}

/// Closed form of the `d = 1`, `m = 0` integral at `|zeta| = 1`:
/// `B(1-a, 1-b) + B(a+b-1, 1-a) + B(a+b-1, 1-b)`.
pub fn a_integral_closed_form_1d(alpha: f64, beta: f64) -> f64 {
    let (a, b) = (1.0 - 2.0 * alpha, 1.0 - 2.0 * beta);
    beta_fn(1.0 - a, 1.0 - b) + beta_fn(a + b - 1.0, 1.0 - a) + beta_fn(a + b - 1.0, 1.0 - b)
}
