//! Functions of the invariants `r = |x|^2`, `s = |y|^2`, `t = <x,y>` on
//! `R^d x R^d`, with exponents of `r` and `s` affine in `(alpha, beta)`.
//!
//! `r`, `s`, `t` are treated as independent generators. The relation
//! `t^2 <= rs` (an equality when `d = 1`) is invisible at this level, which is
//! harmless because every identity checked here is an identity of rational
//! expressions in `x, y`. Numeric cross-checks use `d >= 2`.
//!
//! The derivative operators act through their chain-rule forms:
//!
//! ```text
//! L_x          = 2d dr + 4r dr^2 + 4t dr dt + s dt^2
//! L_y          = 2d ds + 4s ds^2 + 4t ds dt + r dt^2
//! grad_x.grad_y = d dt + 2r dr dt + 2s ds dt + 4t dr ds + t dt^2
//! ```
//!
//! These forms are not trusted: they are tested against the Bernstein-Sato
//! formula for `L_x^j r^{-alpha}` and against finite differences.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::ratfun::{rat, Poly, RatFun, Rational, Symbol};

/// `alpha*kalpha + beta*kbeta + k0` with integer components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentAffine {
    pub alpha: i64,
    pub beta: i64,
    pub constant: i64,
}

impl std::ops::Add for ExponentAffine {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::new(self.alpha + other.alpha, self.beta + other.beta, self.constant + other.constant)
    }
}

impl ExponentAffine {
    pub const ZERO: Self = Self::new(0, 0, 0);

    pub const fn new(alpha: i64, beta: i64, constant: i64) -> Self {
        Self { alpha, beta, constant }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn plus(self, k: i64) -> Self {
        Self::new(self.alpha, self.beta, self.constant + k)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(rat(self.constant), rat(self.alpha), rat(self.beta), rat(0))
    }

    pub fn eval(&self, alpha: f64, beta: f64) -> f64 {
        self.alpha as f64 * alpha + self.beta as f64 * beta + self.constant as f64
    }
}

impl fmt::Display for ExponentAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// Position of a term: `r^{e_r} s^{e_s} t^{k_t}`. The derived ordering is the
/// canonical output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub e_r: ExponentAffine,
    pub e_s: ExponentAffine,
    pub k_t: u32,
}

impl TermKey {
    pub fn new(e_r: ExponentAffine, e_s: ExponentAffine, k_t: u32) -> Self {
        Self { e_r, e_s, k_t }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelTerm {
    pub coeff: RatFun,
    pub key: TermKey,
}

/// Finite sum of [`KernelTerm`]s with like terms merged and zeros dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelExpr {
    terms: BTreeMap<TermKey, RatFun>,
}

impl KernelExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: RatFun, e_r: ExponentAffine, e_s: ExponentAffine, k_t: u32) -> Self {
        let mut out = Self::zero();
        out.add_term(TermKey::new(e_r, e_s, k_t), coeff);
        out
    }

    /// The constant function `1`.
    pub fn one() -> Self {
        Self::monomial(RatFun::one(), ExponentAffine::ZERO, ExponentAffine::ZERO, 0)
    }

    /// `r^{-alpha} s^{-beta}`, i.e. `|x|^{-2 alpha} |y|^{-2 beta}`.
    pub fn power_kernel() -> Self {
        Self::monomial(
            RatFun::one(),
            ExponentAffine::new(-1, 0, 0),
            ExponentAffine::new(0, -1, 0),
            0,
        )
    }

    pub fn from_terms<I: IntoIterator<Item = KernelTerm>>(terms: I) -> Self {
        let mut out = Self::zero();
        for t in terms {
            out.add_term(t.key, t.coeff);
        }
        out
    }

    pub fn add_term(&mut self, key: TermKey, coeff: RatFun) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &RatFun)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TermKey) -> Option<&RatFun> {
        self.terms.get(key)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.neg());
        }
        out
    }

    pub fn scale(&self, k: &RatFun) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.add_term(*key, c.mul(k));
        }
        out
    }

    pub fn scale_rational(&self, k: &Rational) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.add_term(*key, c.scale(k));
        }
        out
    }

    pub fn scale_poly(&self, p: &Poly) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.add_term(*key, c.mul_poly(p));
        }
        out
    }

    /// Product of two kernel expressions (exponents add).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = TermKey::new(ka.e_r + kb.e_r, ka.e_s + kb.e_s, ka.k_t + kb.k_t);
                out.add_term(key, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    fn map_terms(&self, f: impl Fn(&TermKey, &RatFun) -> Option<(TermKey, RatFun)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if let Some((nk, nc)) = f(k, c) {
                out.add_term(nk, nc);
            }
        }
        out
    }

    pub fn d_r(&self) -> Self {
        self.map_terms(|k, c| {
            (!k.e_r.is_zero()).then(|| (TermKey::new(k.e_r.plus(-1), k.e_s, k.k_t), c.mul_poly(&k.e_r.to_poly())))
        })
    }

    pub fn d_s(&self) -> Self {
        self.map_terms(|k, c| {
            (!k.e_s.is_zero()).then(|| (TermKey::new(k.e_r, k.e_s.plus(-1), k.k_t), c.mul_poly(&k.e_s.to_poly())))
        })
    }

    pub fn d_t(&self) -> Self {
        self.map_terms(|k, c| {
            (k.k_t > 0).then(|| (TermKey::new(k.e_r, k.e_s, k.k_t - 1), c.scale(&rat(k.k_t as i64))))
        })
    }

    pub fn mul_r(&self) -> Self {
        self.map_terms(|k, c| Some((TermKey::new(k.e_r.plus(1), k.e_s, k.k_t), c.clone())))
    }

    pub fn mul_s(&self) -> Self {
        self.map_terms(|k, c| Some((TermKey::new(k.e_r, k.e_s.plus(1), k.k_t), c.clone())))
    }

    pub fn mul_t(&self) -> Self {
        self.map_terms(|k, c| Some((TermKey::new(k.e_r, k.e_s, k.k_t + 1), c.clone())))
    }

    /// Euclidean Laplacian in `x`.
    pub fn apply_lx(&self) -> Self {
        let dim = Poly::symbol(Symbol::Dim);
        let fr = self.d_r();
        let first = fr.scale_poly(&dim.scale(&rat(2)));
        let second = fr.d_r().mul_r().scale_rational(&rat(4));
        let third = fr.d_t().mul_t().scale_rational(&rat(4));
        let fourth = self.d_t().d_t().mul_s();
        first.add(&second).add(&third).add(&fourth)
    }

    /// Euclidean Laplacian in `y`.
    pub fn apply_ly(&self) -> Self {
        let dim = Poly::symbol(Symbol::Dim);
        let fs = self.d_s();
        let first = fs.scale_poly(&dim.scale(&rat(2)));
        let second = fs.d_s().mul_s().scale_rational(&rat(4));
        let third = fs.d_t().mul_t().scale_rational(&rat(4));
        let fourth = self.d_t().d_t().mul_r();
        first.add(&second).add(&third).add(&fourth)
    }

    /// `grad_x . grad_y`.
    pub fn apply_c(&self) -> Self {
        let dim = Poly::symbol(Symbol::Dim);
        let ft = self.d_t();
        let a = ft.scale_poly(&dim);
        let b = ft.d_r().mul_r().scale_rational(&rat(2));
        let c = ft.d_s().mul_s().scale_rational(&rat(2));
        let d = self.d_r().d_s().mul_t().scale_rational(&rat(4));
        let e = ft.d_t().mul_t();
        a.add(&b).add(&c).add(&d).add(&e)
    }

    /// Substitutes `r = s = t = rho0` (the diagonal `x = y`), collecting by
    /// the exponent of `rho0 = |x|^2`.
    pub fn restrict_diagonal(&self) -> BTreeMap<ExponentAffine, RatFun> {
        let mut out: BTreeMap<ExponentAffine, RatFun> = BTreeMap::new();
        for (k, c) in &self.terms {
            let e = (k.e_r + k.e_s).plus(k.k_t as i64);
            let sum = out.get(&e).map(|x| x.add(c)).unwrap_or_else(|| c.clone());
            if sum.is_zero() {
                out.remove(&e);
            } else {
                out.insert(e, sum);
            }
        }
        out
    }

    /// Numeric value at `(x, y)` with `d = x.len()`.
    pub fn eval(&self, x: &[f64], y: &[f64], alpha: f64, beta: f64) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::Domain(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
        }
        let d = x.len() as f64;
        let r: f64 = x.iter().map(|v| v * v).sum();
        let s: f64 = y.iter().map(|v| v * v).sum();
        let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let point = [alpha, beta, d];
        let mut acc = 0.0;
        for (k, c) in &self.terms {
            let coeff = c.eval_f64(&point)?;
            let pr = real_power(r, k.e_r.eval(alpha, beta), "r")?;
            let ps = real_power(s, k.e_s.eval(alpha, beta), "s")?;
            acc += coeff * pr * ps * t.powi(k.k_t as i32);
        }
        Ok(acc)
    }
}

fn real_power(base: f64, exponent: f64, name: &str) -> Result<f64> {
    if base == 0.0 {
        if exponent == 0.0 {
            return Ok(1.0);
        }
        if exponent > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!("{name} = 0 with exponent {exponent}")));
    }
    Ok(base.powf(exponent))
}

impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("[{c}]*r^({})*s^({})*t^{}", k.e_r, k.e_s, k.k_t))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Formal equality in the free term ring.
pub fn kernel_equal(f: &KernelExpr, g: &KernelExpr) -> bool {
    f.sub(g).is_zero()
}

/// `((r + s - 2t) / (rs))^j r^{-alpha} s^{-beta}`, fully expanded.
pub fn kernel_s(j: u32) -> KernelExpr {
    let one = RatFun::one();
    let base = KernelExpr::from_terms([
        KernelTerm {
            coeff: one.clone(),
            key: TermKey::new(ExponentAffine::ZERO, ExponentAffine::new(0, 0, -1), 0),
        },
        KernelTerm {
            coeff: one,
            key: TermKey::new(ExponentAffine::new(0, 0, -1), ExponentAffine::ZERO, 0),
        },
        KernelTerm {
            coeff: RatFun::from_integer(-2),
            key: TermKey::new(ExponentAffine::new(0, 0, -1), ExponentAffine::new(0, 0, -1), 1),
        },
    ]);
    base.pow(j).mul(&KernelExpr::power_kernel())
}

/// `c * t^k r^{-alpha-j-k} s^{-beta-i-k}`; the shape of every right-hand side
/// in the kernel identities.
pub fn scaled_power_kernel(coeff: RatFun, shift_r: i64, shift_s: i64, k_t: u32) -> KernelExpr {
    KernelExpr::monomial(
        coeff,
        ExponentAffine::new(-1, 0, -shift_r),
        ExponentAffine::new(0, -1, -shift_s),
        k_t,
    )
}

/// Whether a coefficient is the constant one; handy in tests and reports.
pub fn is_unit(c: &RatFun) -> bool {
    c.as_constant().map(|v| v.is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::{pochhammer, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alpha() -> Poly {
        Poly::symbol(Symbol::Alpha)
    }

    /// alpha + 1 - d/2
    fn alpha_minus_rho_plus_one() -> Poly {
        Poly::linear(rat(1), rat(1), rat(0), ratio(-1, 2))
    }

    fn r_pow(e: ExponentAffine) -> KernelExpr {
        KernelExpr::monomial(RatFun::one(), e, ExponentAffine::ZERO, 0)
    }

    #[test]
    fn kernel_s_small_j() {
        assert_eq!(kernel_s(0), KernelExpr::power_kernel());
        let s1 = kernel_s(1);
        let expected = scaled_power_kernel(RatFun::one(), 0, 1, 0)
            .add(&scaled_power_kernel(RatFun::one(), 1, 0, 0))
            .add(&scaled_power_kernel(RatFun::from_integer(-2), 1, 1, 1));
        assert!(kernel_equal(&s1, &expected));
        let s2 = kernel_s(2);
        assert_eq!(s2.len(), 6);
        let mut coeffs: Vec<i64> = s2
            .terms()
            .map(|(_, c)| num_traits::ToPrimitive::to_i64(&c.as_constant().unwrap().to_integer()).unwrap())
            .collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![-4, -4, 1, 1, 2, 4]);
    }

    #[test]
    fn laplacian_of_power() {
        let f = r_pow(ExponentAffine::new(-1, 0, 0));
        let coeff = alpha().mul(&alpha_minus_rho_plus_one()).scale(&rat(4));
        let expected = KernelExpr::monomial(RatFun::from_poly(coeff), ExponentAffine::new(-1, 0, -1), ExponentAffine::ZERO, 0);
        assert!(kernel_equal(&f.apply_lx(), &expected));
        assert!(KernelExpr::one().apply_lx().is_zero());
        // |x|^{-1} is harmonic in R^3
        let v = f.apply_lx().eval(&[0.3, 0.4, 1.0], &[1.0, 0.0, 0.0], 0.5, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn bernstein_sato_formula() {
        let mut f = r_pow(ExponentAffine::new(-1, 0, 0));
        for j in 1..=8u32 {
            f = f.apply_lx();
            let coeff = pochhammer(&alpha(), j)
                .mul(&pochhammer(&alpha_minus_rho_plus_one(), j))
                .scale(&rat(1i64 << (2 * j)));
            let expected =
                KernelExpr::monomial(RatFun::from_poly(coeff), ExponentAffine::new(-1, 0, -(j as i64)), ExponentAffine::ZERO, 0);
            assert!(kernel_equal(&f, &expected), "j = {j}");
        }
    }

    #[test]
    fn mixed_operator_examples() {
        let expected = scaled_power_kernel(
            RatFun::from_poly(alpha().mul(&Poly::symbol(Symbol::Beta)).scale(&rat(4))),
            1,
            1,
            1,
        );
        assert!(kernel_equal(&KernelExpr::power_kernel().apply_c(), &expected));
        let t = KernelExpr::monomial(RatFun::one(), ExponentAffine::ZERO, ExponentAffine::ZERO, 1);
        let dim = KernelExpr::monomial(RatFun::from_poly(Poly::symbol(Symbol::Dim)), ExponentAffine::ZERO, ExponentAffine::ZERO, 0);
        assert!(kernel_equal(&t.apply_c(), &dim));
        let r = r_pow(ExponentAffine::new(0, 0, 1));
        assert!(r.apply_c().is_zero());
    }

    #[test]
    fn equality_merges_exponents() {
        let f = KernelExpr::power_kernel();
        assert!(kernel_equal(&f, &f.clone()));
        let lhs = r_pow(ExponentAffine::new(-1, 0, 0)).mul_r();
        let rhs = r_pow(ExponentAffine::new(-1, 0, 1));
        assert!(kernel_equal(&lhs, &rhs));
    }

    #[test]
    fn eval_examples() {
        let f = r_pow(ExponentAffine::new(-1, 0, 0));
        assert!((f.eval(&[2.0, 0.0], &[1.0, 1.0], 1.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((kernel_s(0).eval(&[1.0, 0.0], &[1.0, 0.0], 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((kernel_s(1).eval(&[1.0, 0.0], &[0.0, 1.0], 0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(f.eval(&[0.0, 0.0], &[1.0, 0.0], 1.0, 0.0), Err(Error::Domain(_))));
        let pole = KernelExpr::monomial(
            RatFun::one().div_factors(&[crate::ratfun::LinearFactor::symbol_plus(Symbol::Alpha, rat(0))]),
            ExponentAffine::ZERO,
            ExponentAffine::ZERO,
            0,
        );
        assert!(matches!(pole.eval(&[1.0], &[1.0], 0.0, 0.0), Err(Error::Pole(_))));
    }

    fn random_expr(rng: &mut ChaCha8Rng) -> KernelExpr {
        let mut out = KernelExpr::zero();
        for _ in 0..4 {
            let coeff = Poly::linear(
                ratio(rng.gen_range(-4..5), rng.gen_range(1..4)),
                rat(rng.gen_range(-2..3)),
                rat(rng.gen_range(-2..3)),
                ratio(rng.gen_range(-1..2), 2),
            );
            let key = TermKey::new(
                ExponentAffine::new(-rng.gen_range(0..2), 0, rng.gen_range(-2..2)),
                ExponentAffine::new(0, -rng.gen_range(0..2), rng.gen_range(-2..2)),
                rng.gen_range(0..3),
            );
            out.add_term(key, RatFun::from_poly(coeff));
        }
        out
    }

    #[test]
    fn operators_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let f = random_expr(&mut rng);
            assert!(kernel_equal(&f.apply_lx().apply_ly(), &f.apply_ly().apply_lx()));
            assert!(kernel_equal(&f.apply_lx().apply_c(), &f.apply_c().apply_lx()));
            assert!(kernel_equal(&f.apply_ly().apply_c(), &f.apply_c().apply_ly()));
        }
    }

    /// Central second differences, step `h`, on the numeric value of `f`.
    fn fd_mixed(f: &KernelExpr, x: &[f64], y: &[f64], a: f64, b: f64, h: f64) -> f64 {
        let ev = |x: &[f64], y: &[f64]| f.eval(x, y, a, b).unwrap();
        let mut acc = 0.0;
        for i in 0..x.len() {
            let shifted = |sx: f64, sy: f64| {
                let mut xx = x.to_vec();
                let mut yy = y.to_vec();
                xx[i] += sx;
                yy[i] += sy;
                ev(&xx, &yy)
            };
            acc += (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
        }
        acc
    }

    fn fd_laplacian_x(f: &KernelExpr, x: &[f64], y: &[f64], a: f64, b: f64, h: f64) -> f64 {
        let ev = |x: &[f64]| f.eval(x, y, a, b).unwrap();
        let centre = ev(x);
        let mut acc = 0.0;
        for i in 0..x.len() {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            acc += (ev(&p) - 2.0 * centre + ev(&m)) / (h * h);
        }
        acc
    }

    #[test]
    fn finite_difference_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-4;
        for &(a, b, d) in &[(0.3, 0.7, 3usize), (1.2, 0.4, 5usize)] {
            for _ in 0..4 {
                let f = random_expr(&mut rng);
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.4..1.2)).collect();
                let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.2..-0.4)).collect();
                let scale = f.eval(&x, &y, a, b).unwrap().abs().max(1.0);
                let exact = f.apply_c().eval(&x, &y, a, b).unwrap();
                let approx = fd_mixed(&f, &x, &y, a, b, h);
                assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(scale), "C: {exact} vs {approx}");
                let exact = f.apply_lx().eval(&x, &y, a, b).unwrap();
                let approx = fd_laplacian_x(&f, &x, &y, a, b, h);
                assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(scale), "Lx: {exact} vs {approx}");
            }
        }
    }

    #[test]
    fn formal_equality_implies_numeric_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_expr(&mut rng);
        let lhs = f.apply_lx().apply_ly();
        let rhs = f.apply_ly().apply_lx();
        assert!(kernel_equal(&lhs, &rhs));
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (a, b) = (lhs.eval(&x, &y, 0.3, 0.7).unwrap(), rhs.eval(&x, &y, 0.3, 0.7).unwrap());
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn diagonal_restriction_of_s_vanishes() {
        // (r + s - 2t) vanishes on x = y
        for j in 1..=3 {
            assert!(kernel_s(j).restrict_diagonal().is_empty());
        }
        assert_eq!(kernel_s(0).restrict_diagonal().len(), 1);
    }
}
