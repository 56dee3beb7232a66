//! The action of translations, dilations and the inversion on grid functions.
//!
//! `pi_nu(translation x0) f(x) = f(x - x0)`,
//! `pi_nu(dilation t) f(x) = e^{t nu} f(e^t x)`,
//! `pi_nu(inversion) f(x) = |x|^{-2 nu} f(-x / |x|^2)`.
//!
//! With this normalization `||pi_nu(g) f||_nu = ||f||_nu` for translations and
//! dilations, and the tensor action on `2d` variables is the product of the
//! actions on each block.

use num_complex::Complex64;

use super::grid::GridFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Translation(Vec<f64>),
    Dilation(f64),
    Inversion,
}

const SUPPORT_TOL: f64 = 1e-10;

fn lattice_steps(f: &GridFunction, x0: &[f64]) -> Option<Vec<i64>> {
    let h = f.spacing();
    x0.iter()
        .map(|v| {
            let k = (v / h).round();
            ((v / h - k).abs() < 1e-9).then_some(k as i64)
        })
        .collect()
}

fn integer_factor(lambda: f64) -> Option<usize> {
    let k = lambda.round();
    ((lambda - k).abs() < 1e-12 && k >= 1.0).then_some(k as usize)
}

/// Multilinear interpolation; zero outside the sampled box.
fn interpolate(f: &GridFunction, p: &[f64]) -> Complex64 {
    let n = f.n();
    let h = f.spacing();
    let shape = f.shape();
    let mut base = vec![0usize; p.len()];
    let mut frac = vec![0.0; p.len()];
    for a in 0..p.len() {
        let s = (p[a] + f.box_len() / 2.0) / h;
        if !(s >= 0.0 && s <= (n - 1) as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let k = (s.floor() as usize).min(n - 2);
        base[a] = k;
        frac[a] = s - k as f64;
    }
    let mut idx = vec![0usize; p.len()];
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << p.len()) {
        let mut w = 1.0;
        for a in 0..p.len() {
            let up = (corner >> a) & 1 == 1;
            idx[a] = base[a] + up as usize;
            w *= if up { frac[a] } else { 1.0 - frac[a] };
        }
        if w != 0.0 {
            acc += f.data()[shape.flatten(&idx)] * w;
        }
    }
    acc
}

/// `g(x) = w f(p)` where `map(x) = Some((p, w))`, and `g(x) = 0` where it is `None`.
fn resample<M>(f: &GridFunction, map: M) -> Result<GridFunction>
where
    M: Fn(&[f64]) -> Option<(Vec<f64>, f64)> + Sync,
{
    GridFunction::from_fn(f.dims(), f.n(), f.box_len(), |x| match map(x) {
        Some((p, w)) => interpolate(f, &p) * w,
        None => Complex64::new(0.0, 0.0),
    })
}

fn translate(f: &GridFunction, x0: &[f64]) -> Result<GridFunction> {
    if let Some(steps) = lattice_steps(f, x0) {
        return f.roll(&steps);
    }
    let mut spec = f.fourier();
    spec.multiply(|xi| {
        let phase: f64 = xi.iter().zip(x0).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, -phase)
    });
    Ok(spec.inverse())
}

/// `g(x) = f(lambda x)` on every axis.
fn dilate(f: &GridFunction, lambda: f64) -> Result<GridFunction> {
    if let Some(k) = integer_factor(lambda) {
        let n = f.n() as i64;
        let shape = f.shape();
        let offset = (k as i64 - 1) * n / 2;
        let mut idx = vec![0usize; shape.dims];
        let mut out = f.scale(Complex64::new(0.0, 0.0));
        for (flat, v) in out.data_mut().iter_mut().enumerate() {
            shape.unflatten(flat, &mut idx);
            let mut inside = true;
            for a in idx.iter_mut() {
                let j = k as i64 * *a as i64 - offset;
                inside &= (0..n).contains(&j);
                *a = j.clamp(0, n - 1) as usize;
            }
            if inside {
                *v = f.data()[shape.flatten(&idx)];
            }
        }
        return Ok(out);
    }
    resample(f, |x| Some((x.iter().map(|v| v * lambda).collect(), 1.0)))
}

fn check_inversion_support(f: &GridFunction, block: usize) -> Result<()> {
    let threshold = SUPPORT_TOL * f.max_abs();
    let half = f.box_len() / 2.0;
    let shape = f.shape();
    let mut idx = vec![0usize; shape.dims];
    for (flat, v) in f.data().iter().enumerate() {
        if v.norm() <= threshold {
            continue;
        }
        shape.unflatten(flat, &mut idx);
        let y: Vec<f64> = idx.iter().map(|&k| f.coordinate(k)).collect();
        for chunk in y.chunks(block) {
            let r2: f64 = chunk.iter().map(|c| c * c).sum();
            if r2 == 0.0 || chunk.iter().any(|c| (c / r2).abs() >= half) {
                return Err(Error::Support(format!(
                    "inversion maps the support point {y:?} outside the box [-{half}, {half})"
                )));
            }
        }
    }
    Ok(())
}

/// Blockwise inversion with exponents `nus`, one per block of `block` axes.
fn invert(f: &GridFunction, block: usize, nus: &[f64]) -> Result<GridFunction> {
    check_inversion_support(f, block)?;
    resample(f, |x| {
        let mut p = Vec::with_capacity(x.len());
        let mut w = 1.0;
        for (chunk, nu) in x.chunks(block).zip(nus) {
            let r2: f64 = chunk.iter().map(|c| c * c).sum();
            if r2 == 0.0 {
                return None;
            }
            w *= r2.powf(-nu);
            p.extend(chunk.iter().map(|c| -c / r2));
        }
        Some((p, w))
    })
}

/// `pi_nu(g) f`.
pub fn group_action(f: &GridFunction, g: &GroupElement, nu: f64) -> Result<GridFunction> {
    match g {
        GroupElement::Translation(x0) => {
            if x0.len() != f.dims() {
                return Err(Error::Grid("translation vector has the wrong dimension".into()));
            }
            translate(f, x0)
        }
        GroupElement::Dilation(t) => Ok(dilate(f, t.exp())?.scale(Complex64::new((t * nu).exp(), 0.0))),
        GroupElement::Inversion => invert(f, f.dims(), &[nu]),
    }
}

/// `(pi_alpha (x) pi_beta)(g) f` for a function of `2d` variables; `g` acts
/// diagonally.
pub fn tensor_action(f: &GridFunction, g: &GroupElement, alpha: f64, beta: f64) -> Result<GridFunction> {
    if !f.dims().is_multiple_of(2) {
        return Err(Error::Grid("tensor action needs an even number of axes".into()));
    }
    let d = f.dims() / 2;
    match g {
        GroupElement::Translation(x0) => {
            if x0.len() != d {
                return Err(Error::Grid("translation vector has the wrong dimension".into()));
            }
            let doubled: Vec<f64> = x0.iter().chain(x0).copied().collect();
            translate(f, &doubled)
        }
        GroupElement::Dilation(t) => {
            Ok(dilate(f, t.exp())?.scale(Complex64::new((t * (alpha + beta)).exp(), 0.0)))
        }
        GroupElement::Inversion => invert(f, d, &[alpha, beta]),
    }
}
