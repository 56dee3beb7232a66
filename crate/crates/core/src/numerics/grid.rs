//! Uniform periodic grids on the box `[-L/2, L/2)^dims` and the unitary
//! angular Fourier transform
//!
//! ```text
//! F f(xi) = (2 pi)^{-dims/2} int f(x) exp(-i <x, xi>) dx
//! ```
//!
//! discretized by the trapezoidal rule. With `x_k = -L/2 + k h`, `h = L/N` and
//! `xi_m = 2 pi m~ / L` (`m~` the signed index), the sum is
//! `(2 pi)^{-dims/2} h^dims (-1)^{sum m~} FFT[f](m)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridShape {
    pub dims: usize,
    pub n: usize,
}

impl GridShape {
    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index, axis 0 slowest.
    pub fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.dims).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
    }

    pub fn flatten(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &k| acc * self.n + k)
    }
}

fn check_shape(dims: usize, n: usize, box_len: f64) -> Result<()> {
    if dims == 0 {
        return Err(Error::Grid("grid needs at least one axis".into()));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Grid(format!("points per axis must be a power of two, got {n}")));
    }
    if !(box_len.is_finite() && box_len > 0.0) {
        return Err(Error::Grid(format!("box length must be positive, got {box_len}")));
    }
    Ok(())
}

/// Signed frequency index of FFT bin `m`.
pub fn signed_index(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Samples of a function on the periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    shape: GridShape,
    box_len: f64,
    data: Vec<Complex64>,
}

/// Samples of `F f` at the lattice frequencies, same layout as [`GridFunction`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    shape: GridShape,
    box_len: f64,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(dims: usize, n: usize, box_len: f64) -> Result<Self> {
        check_shape(dims, n, box_len)?;
        let shape = GridShape { dims, n };
        Ok(Self {
            shape,
            box_len,
            data: vec![Complex64::new(0.0, 0.0); shape.len()],
        })
    }

    pub fn from_data(dims: usize, n: usize, box_len: f64, data: Vec<Complex64>) -> Result<Self> {
        check_shape(dims, n, box_len)?;
        let shape = GridShape { dims, n };
        if data.len() != shape.len() {
            return Err(Error::Grid(format!("expected {} samples, got {}", shape.len(), data.len())));
        }
        Ok(Self { shape, box_len, data })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(dims: usize, n: usize, box_len: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        check_shape(dims, n, box_len)?;
        let shape = GridShape { dims, n };
        let h = box_len / n as f64;
        let data = (0..shape.len())
            .into_par_iter()
            .map_init(
                || (vec![0usize; dims], vec![0.0; dims]),
                |(idx, x), flat| {
                    shape.unflatten(flat, idx);
                    for a in 0..dims {
                        x[a] = -box_len / 2.0 + idx[a] as f64 * h;
                    }
                    f(x)
                },
            )
            .collect();
        Ok(Self { shape, box_len, data })
    }

    pub fn from_real_fn<F>(dims: usize, n: usize, box_len: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self::from_fn(dims, n, box_len, |x| Complex64::new(f(x), 0.0))
    }

    pub fn dims(&self) -> usize {
        self.shape.dims
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.shape.n as f64
    }

    pub fn coordinate(&self, k: usize) -> f64 {
        -self.box_len / 2.0 + k as f64 * self.spacing()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    fn same_grid(&self, o: &Self) -> Result<()> {
        if self.shape != o.shape || self.box_len != o.box_len {
            return Err(Error::Grid("grid functions live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_grid(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_grid(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * k).collect(),
            ..self.clone()
        }
    }

    /// Pointwise product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_grid(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a * b).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |self - o| / max |o|`.
    pub fn rel_max_diff(&self, o: &Self) -> Result<f64> {
        let diff = self.sub(o)?.max_abs();
        let scale = o.max_abs();
        Ok(if scale == 0.0 { diff } else { diff / scale })
    }

    /// `h^dims sum |f|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.spacing().powi(self.shape.dims as i32) * pairwise_sum(&self.data.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }

    /// Tensor product `(g (x) h)(x, y) = g(x) h(y)`.
    pub fn tensor(&self, o: &Self) -> Result<Self> {
        if self.shape.n != o.shape.n || self.box_len != o.box_len {
            return Err(Error::Grid("tensor factors live on different grids".into()));
        }
        let mut data = Vec::with_capacity(self.data.len() * o.data.len());
        for a in &self.data {
            data.extend(o.data.iter().map(|b| a * b));
        }
        Self::from_data(self.shape.dims + o.shape.dims, self.shape.n, self.box_len, data)
    }

    /// `g(x) = f(x, x)` for a function of `2d` variables.
    pub fn restrict_diagonal(&self) -> Result<Self> {
        if !self.shape.dims.is_multiple_of(2) {
            return Err(Error::Grid("diagonal restriction needs an even number of axes".into()));
        }
        let d = self.shape.dims / 2;
        let small = GridShape { dims: d, n: self.shape.n };
        let stride = small.len();
        let data = (0..stride).map(|k| self.data[k * stride + k]).collect();
        Self::from_data(d, self.shape.n, self.box_len, data)
    }

    /// Circular shift by whole grid steps: `g(x) = f(x - shift h)`.
    pub fn roll(&self, shift: &[i64]) -> Result<Self> {
        if shift.len() != self.shape.dims {
            return Err(Error::Grid("shift has the wrong number of components".into()));
        }
        let n = self.shape.n as i64;
        let mut out = self.clone();
        let mut idx = vec![0usize; self.shape.dims];
        for (flat, v) in out.data.iter_mut().enumerate() {
            self.shape.unflatten(flat, &mut idx);
            for a in 0..idx.len() {
                idx[a] = (idx[a] as i64 - shift[a]).rem_euclid(n) as usize;
            }
            *v = self.data[self.shape.flatten(&idx)];
        }
        Ok(out)
    }

    pub fn fourier(&self) -> Spectrum {
        let mut data = self.data.clone();
        fft_all_axes(&mut data, self.shape, false);
        let h = self.spacing();
        let norm = (2.0 * PI).powf(-(self.shape.dims as f64) / 2.0) * h.powi(self.shape.dims as i32);
        apply_phase(&mut data, self.shape, norm);
        Spectrum {
            shape: self.shape,
            box_len: self.box_len,
            data,
        }
    }
}

impl Spectrum {
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Frequency spacing `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_len
    }

    /// Angular frequency of bin `m` along one axis.
    pub fn wavenumber(&self, m: usize) -> f64 {
        signed_index(m, self.shape.n) as f64 * self.frequency_step()
    }

    /// Multiplies every sample by `multiplier(xi)`.
    pub fn multiply<F>(&mut self, multiplier: F)
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let shape = self.shape;
        let step = self.frequency_step();
        self.data.par_iter_mut().enumerate().for_each_init(
            || (vec![0usize; shape.dims], vec![0.0; shape.dims]),
            |(idx, xi), (flat, v)| {
                shape.unflatten(flat, idx);
                for a in 0..shape.dims {
                    xi[a] = signed_index(idx[a], shape.n) as f64 * step;
                }
                *v *= multiplier(xi);
            },
        );
    }

    pub fn inverse(&self) -> GridFunction {
        let n = self.shape.n as f64;
        let dims = self.shape.dims as i32;
        let h = self.box_len / n;
        let mut data = self.data.clone();
        // undo the phase and normalization, then the unnormalized inverse FFT
        let norm = (2.0 * PI).powf(dims as f64 / 2.0) / h.powi(dims) / n.powi(dims);
        apply_phase(&mut data, self.shape, norm);
        fft_all_axes(&mut data, self.shape, true);
        GridFunction {
            shape: self.shape,
            box_len: self.box_len,
            data,
        }
    }
}

fn apply_phase(data: &mut [Complex64], shape: GridShape, norm: f64) {
    data.par_iter_mut().enumerate().for_each_init(
        || vec![0usize; shape.dims],
        |idx, (flat, v)| {
            shape.unflatten(flat, idx);
            let parity: i64 = idx.iter().map(|&m| signed_index(m, shape.n)).sum();
            let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            *v *= sign * norm;
        },
    );
}

fn fft_all_axes(data: &mut [Complex64], shape: GridShape, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(shape.n)
    } else {
        planner.plan_fft_forward(shape.n)
    };
    let n = shape.n;
    for axis in 0..shape.dims {
        let stride = n.pow((shape.dims - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| fft.process(line));
            continue;
        }
        // blocks of n * stride hold `stride` interleaved lines each
        data.par_chunks_mut(n * stride).for_each(|block| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..stride {
                for k in 0..n {
                    line[k] = block[k * stride + i];
                }
                fft.process(&mut line);
                for k in 0..n {
                    block[k * stride + i] = line[k];
                }
            }
        });
    }
}

/// Pairwise summation; the result does not depend on thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
