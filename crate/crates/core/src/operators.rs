//! The operator families `M_{alpha,beta,j}`, `E_{alpha,beta,m}` and
//! `D_{alpha,beta,m}`, written as polynomials in the commuting generators
//! `A = L_x`, `B = L_y`, `C = grad_x . grad_y` with rational coefficients.
//!
//! The recursion used for `M` is
//!
//! ```text
//! M_0 = I,  M_1 = C,
//! M_{j+1} = C M_j - j (d - 1 - 3j - 2 alpha - 2 beta)
//!                   / (4 (alpha + 1 - d/2) (beta + 1 - d/2))
//!                   * M_{j-1}(alpha + 1, beta + 1) A B
//! ```
//!
//! which is the one that makes `M_m r^{-alpha} s^{-beta}` equal to
//! `4^m (alpha)_m (beta)_m (t / rs)^m r^{-alpha} s^{-beta}`. Two other
//! variants are kept as [`RecursionRule`]s so the exact check can show that
//! they fail.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel_cas::{kernel_equal, kernel_s, scaled_power_kernel, ExponentAffine, KernelExpr};
use crate::ratfun::{pochhammer_factors, rat, ratio, LinearFactor, Poly, RatFun, Rational, Symbol};

/// Powers of `(A, B, C) = (L_x, L_y, grad_x . grad_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0, c: 0 };

    pub const fn new(a: u32, b: u32, c: u32) -> Self {
        Self { a, b, c }
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b + self.c
    }

    fn mul(&self, o: &Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

/// Which coefficient the `M` recursion uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecursionRule {
    /// `j(d-1-3j-2a-2b) / (4 (a+1-d/2)(b+1-d/2))`, certified by the kernel identity.
    #[default]
    Verified,
    /// Same numerator with the denominator `4 (a+d/2-1)(b+d/2-1)`.
    ProofSign,
    /// `j(d-3j-2a-2b) / ((a+1-d/2)(b+1-d/2))`, the coefficient as usually printed.
    AsPrinted,
}

/// Polynomial in `A, B, C` with [`RatFun`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BidiffOp {
    coeffs: BTreeMap<Monomial, RatFun>,
}

impl BidiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(Monomial::ONE, RatFun::one())
    }

    pub fn monomial(m: Monomial, coeff: RatFun) -> Self {
        let mut out = Self::zero();
        out.add_term(m, coeff);
        out
    }

    pub fn lx() -> Self {
        Self::monomial(Monomial::new(1, 0, 0), RatFun::one())
    }

    pub fn ly() -> Self {
        Self::monomial(Monomial::new(0, 1, 0), RatFun::one())
    }

    pub fn mixed() -> Self {
        Self::monomial(Monomial::new(0, 0, 1), RatFun::one())
    }

    fn add_term(&mut self, m: Monomial, c: RatFun) {
        if c.is_zero() {
            return;
        }
        let sum = self.coeffs.get(&m).map(|x| x.add(&c)).unwrap_or(c);
        if sum.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RatFun)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&RatFun> {
        self.coeffs.get(m)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(*m, c.neg());
        }
        out
    }

    /// Product with the generators treated as commuting.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &o.coeffs {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, k: &RatFun) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.coeffs {
            out.add_term(*m, c.mul(k));
        }
        out
    }

    /// The same operator family at `(alpha + da, beta + db)`.
    pub fn shift(&self, da: i64, db: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, c.shift(da, db))).collect(),
        }
    }

    /// Exchanges the two tensor factors: `alpha <-> beta`, `A <-> B`.
    pub fn swap_factors(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (Monomial::new(m.b, m.a, m.c), c.swap_alpha_beta()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.coeffs.keys().all(|m| m.degree() == degree)
    }

    /// Distinct denominator factors in `s` over all coefficients.
    pub fn pole_set(&self, s: Symbol) -> Vec<LinearFactor> {
        let mut out: Vec<LinearFactor> = self.coeffs.values().flat_map(|c| c.pole_set(s)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Substitutes a number for `d`; fails if a coefficient has a pole there.
    pub fn specialize_dim(&self, d: i64) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.coeffs {
            out.add_term(*m, c.specialize(Symbol::Dim, &rat(d))?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Vec<MonomialJson> {
        self.coeffs
            .iter()
            .map(|(m, c)| MonomialJson {
                pow_a: m.a,
                pow_b: m.b,
                pow_c: m.c,
                coeff: CoeffJson {
                    num: c.numerator_text(),
                    den: c.denominator_texts(),
                },
            })
            .collect()
    }

    pub fn to_latex(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let gen = |name: &str, k: u32| match k {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{{{k}}}"),
        };
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(m, c)| {
                let ops = format!(
                    "{}{}{}",
                    gen("\\mathcal{L}_x", m.a),
                    gen("\\mathcal{L}_y", m.b),
                    gen("(\\nabla_x \\cdot \\nabla_y)", m.c)
                );
                let coeff = c.to_latex();
                match (ops.is_empty(), coeff.as_str()) {
                    (true, _) => coeff,
                    (false, "1") => ops,
                    (false, _) => format!("\\left({coeff}\\right) {ops}"),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for BidiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(m, c)| format!("[{c}]*A^{}*B^{}*C^{}", m.a, m.b, m.c))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoeffJson {
    pub num: String,
    pub den: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialJson {
    #[serde(rename = "powA")]
    pub pow_a: u32,
    #[serde(rename = "powB")]
    pub pow_b: u32,
    #[serde(rename = "powC")]
    pub pow_c: u32,
    pub coeff: CoeffJson,
}

/// `s + 1 - d/2 + offset`
fn shifted_by_rho(s: Symbol, offset: i64) -> LinearFactor {
    let (k, f) = match s {
        Symbol::Alpha => LinearFactor::new(rat(1 + offset), rat(1), rat(0), ratio(-1, 2)),
        Symbol::Beta => LinearFactor::new(rat(1 + offset), rat(0), rat(1), ratio(-1, 2)),
        Symbol::Dim => unreachable!("only alpha and beta carry rho shifts"),
    }
    .expect("nonzero");
    debug_assert!(k.is_one());
    f
}

/// Coefficient in front of `M_{j-1}(alpha+1, beta+1) A B` in the step
/// `M_j -> M_{j+1}` (sign included as subtracted).
pub fn recursion_coefficient(j: u32, rule: RecursionRule) -> RatFun {
    let j_q = rat(j as i64);
    let (d_offset, scale, den) = match rule {
        RecursionRule::Verified => (
            -1 - 3 * j as i64,
            ratio(1, 4),
            vec![shifted_by_rho(Symbol::Alpha, 0), shifted_by_rho(Symbol::Beta, 0)],
        ),
        RecursionRule::ProofSign => {
            // alpha + d/2 - 1, beta + d/2 - 1
            let fa = LinearFactor::new(rat(-1), rat(1), rat(0), ratio(1, 2)).expect("nonzero").1;
            let fb = LinearFactor::new(rat(-1), rat(0), rat(1), ratio(1, 2)).expect("nonzero").1;
            (-1 - 3 * j as i64, ratio(1, 4), vec![fa, fb])
        }
        RecursionRule::AsPrinted => (
            -3 * j as i64,
            Rational::one(),
            vec![shifted_by_rho(Symbol::Alpha, 0), shifted_by_rho(Symbol::Beta, 0)],
        ),
    };
    let numerator = Poly::linear(rat(d_offset), rat(-2), rat(-2), rat(1));
    RatFun::from_parts(j_q * scale, numerator, den)
}

/// `M_0 ..= M_{j_max}` under `rule`, all as functions of `(alpha, beta)`.
pub fn build_m_family(j_max: u32, rule: RecursionRule) -> Vec<BidiffOp> {
    let mut family = vec![BidiffOp::identity()];
    if j_max >= 1 {
        family.push(BidiffOp::mixed());
    }
    let ab = BidiffOp::lx().mul(&BidiffOp::ly());
    for j in 1..j_max {
        let j_us = j as usize;
        let lead = BidiffOp::mixed().mul(&family[j_us]);
        let tail = family[j_us - 1]
            .shift(1, 1)
            .mul(&ab)
            .scale(&recursion_coefficient(j, rule));
        family.push(lead.sub(&tail));
    }
    family.truncate(j_max as usize + 1);
    family
}

pub fn build_m(j: u32) -> BidiffOp {
    build_m_with(j, RecursionRule::Verified)
}

pub fn build_m_with(j: u32, rule: RecursionRule) -> BidiffOp {
    build_m_family(j, rule).pop().expect("family is nonempty")
}

/// Linear factors and scalar of
/// `c_{i,j,k} = 2^{2(i+j+k)} (alpha)_{j+k} (alpha+1-d/2)_j (beta)_{i+k} (beta+1-d/2)_i`.
pub fn c_factors(i: u32, j: u32, k: u32) -> (Rational, Vec<LinearFactor>) {
    let scalar = Rational::from_integer(num_bigint::BigInt::from(1u8) << (2 * (i + j + k)) as usize);
    let mut factors = pochhammer_factors(&LinearFactor::symbol_plus(Symbol::Alpha, rat(0)), j + k);
    factors.extend(pochhammer_factors(&shifted_by_rho(Symbol::Alpha, 0), j));
    factors.extend(pochhammer_factors(&LinearFactor::symbol_plus(Symbol::Beta, rat(0)), i + k));
    factors.extend(pochhammer_factors(&shifted_by_rho(Symbol::Beta, 0), i));
    (scalar, factors)
}

/// `c_{i,j,k}(alpha, beta)` as an expanded polynomial.
pub fn coeff_c(i: u32, j: u32, k: u32) -> RatFun {
    let (scalar, factors) = c_factors(i, j, k);
    let numerator = factors.iter().fold(Poly::one(), |acc, f| acc.mul(&f.to_poly()));
    RatFun::from_parts(scalar, numerator, Vec::new())
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k))
}

/// `multinomial(i+j+k; i, j, k) (-2)^k / c_{i,j,k}`.
pub fn epsilon(i: u32, j: u32, k: u32) -> RatFun {
    let m = i + j + k;
    let multinomial = factorial(m) / (factorial(i) * factorial(j) * factorial(k));
    let sign_pow = (0..k).fold(Rational::one(), |acc, _| acc * rat(-2));
    let (scalar, factors) = c_factors(i, j, k);
    RatFun::from_parts(multinomial * sign_pow / scalar, Poly::one(), factors)
}

/// `E_m = sum_{i+j+k=m} eps_{i,j,k} M_k(alpha+j, beta+i) A^j B^i`.
pub fn build_e(m: u32) -> BidiffOp {
    build_e_with(m, RecursionRule::Verified)
}

pub fn build_e_with(m: u32, rule: RecursionRule) -> BidiffOp {
    let family = build_m_family(m, rule);
    let mut out = BidiffOp::zero();
    for k in 0..=m {
        for j in 0..=(m - k) {
            let i = m - k - j;
            let shifted = family[k as usize].shift(j as i64, i as i64);
            let powers = BidiffOp::monomial(Monomial::new(j, i, 0), epsilon(i, j, k));
            out = out.add(&shifted.mul(&powers));
        }
    }
    out
}

/// Applies `op` by reading `A, B, C` as `L_x, L_y, grad_x . grad_y`.
pub fn apply_bidiff(op: &BidiffOp, f: &KernelExpr) -> KernelExpr {
    let mut cache: HashMap<Monomial, KernelExpr> = HashMap::new();
    cache.insert(Monomial::ONE, f.clone());
    let mut out = KernelExpr::zero();
    for (m, c) in op.terms() {
        let g = generator_power(&mut cache, *m);
        out = out.add(&g.scale(c));
    }
    out
}

fn generator_power(cache: &mut HashMap<Monomial, KernelExpr>, m: Monomial) -> KernelExpr {
    if let Some(v) = cache.get(&m) {
        return v.clone();
    }
    // peel A first, then B, then C
    let value = if m.a > 0 {
        generator_power(cache, Monomial::new(m.a - 1, m.b, m.c)).apply_lx()
    } else if m.b > 0 {
        generator_power(cache, Monomial::new(0, m.b - 1, m.c)).apply_ly()
    } else {
        generator_power(cache, Monomial::new(0, 0, m.c - 1)).apply_c()
    };
    cache.insert(m, value.clone());
    value
}

/// One row of an identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub label: String,
    pub passed: bool,
    /// `lhs - rhs` in canonical text when the check fails.
    pub difference: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn compare(label: String, lhs: &KernelExpr, rhs: &KernelExpr) -> IdentityCheck {
    let passed = kernel_equal(lhs, rhs);
    IdentityCheck {
        label,
        passed,
        difference: (!passed).then(|| lhs.sub(rhs).to_string()),
    }
}

fn pow4(k: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(1u8) << (2 * k) as usize)
}

/// `L_x^j r^{-alpha} = 4^j (alpha)_j (alpha + 1 - d/2)_j r^{-alpha-j}` for `j <= j_max`.
pub fn verify_laplacian_power(j_max: u32) -> IdentityReport {
    let start = KernelExpr::monomial(RatFun::one(), ExponentAffine::new(-1, 0, 0), ExponentAffine::ZERO, 0);
    let mut lhs = start;
    let mut checks = Vec::new();
    for j in 0..=j_max {
        if j > 0 {
            lhs = lhs.apply_lx();
        }
        let mut factors = pochhammer_factors(&LinearFactor::symbol_plus(Symbol::Alpha, rat(0)), j);
        factors.extend(pochhammer_factors(&shifted_by_rho(Symbol::Alpha, 0), j));
        let coeff = factors.iter().fold(Poly::one(), |acc, f| acc.mul(&f.to_poly()));
        let rhs = KernelExpr::monomial(
            RatFun::from_parts(pow4(j), coeff, Vec::new()),
            ExponentAffine::new(-1, 0, -(j as i64)),
            ExponentAffine::ZERO,
            0,
        );
        checks.push(compare(format!("j={j}"), &lhs, &rhs));
    }
    IdentityReport {
        identity: "laplacian-power".into(),
        checks,
    }
}

/// `M_m r^{-alpha} s^{-beta} = 4^m (alpha)_m (beta)_m t^m r^{-alpha-m} s^{-beta-m}`.
pub fn verify_m_on_kernel(m_max: u32, rule: RecursionRule) -> IdentityReport {
    let family = build_m_family(m_max, rule);
    let base = KernelExpr::power_kernel();
    let checks = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let lhs = apply_bidiff(&family[m as usize], &base);
            let mut factors = pochhammer_factors(&LinearFactor::symbol_plus(Symbol::Alpha, rat(0)), m);
            factors.extend(pochhammer_factors(&LinearFactor::symbol_plus(Symbol::Beta, rat(0)), m));
            let coeff = factors.iter().fold(Poly::one(), |acc, f| acc.mul(&f.to_poly()));
            let rhs = scaled_power_kernel(RatFun::from_parts(pow4(m), coeff, Vec::new()), m as i64, m as i64, m);
            compare(format!("m={m}"), &lhs, &rhs)
        })
        .collect();
    IdentityReport {
        identity: "m-on-kernel".into(),
        checks,
    }
}

/// `M_k(alpha+j, beta+i) L_x^j L_y^i r^{-alpha} s^{-beta}
///  = c_{i,j,k} t^k r^{-alpha-j-k} s^{-beta-i-k}` for `i + j + k <= total_max`.
pub fn verify_shifted_m(total_max: u32) -> IdentityReport {
    let family = build_m_family(total_max, RecursionRule::Verified);
    let base = KernelExpr::power_kernel();
    let mut triples = Vec::new();
    for total in 0..=total_max {
        for k in 0..=total {
            for j in 0..=(total - k) {
                triples.push((total - k - j, j, k));
            }
        }
    }
    let checks = triples
        .into_par_iter()
        .map(|(i, j, k)| {
            let op = family[k as usize]
                .shift(j as i64, i as i64)
                .mul(&BidiffOp::monomial(Monomial::new(j, i, 0), RatFun::one()));
            let lhs = apply_bidiff(&op, &base);
            let rhs = scaled_power_kernel(coeff_c(i, j, k), (j + k) as i64, (i + k) as i64, k);
            compare(format!("i={i},j={j},k={k}"), &lhs, &rhs)
        })
        .collect();
    IdentityReport {
        identity: "shifted-m-on-kernel".into(),
        checks,
    }
}

/// `E_m r^{-alpha} s^{-beta} = ((r + s - 2t)/(rs))^m r^{-alpha} s^{-beta}`.
pub fn verify_e_identity(m_max: u32) -> IdentityReport {
    let base = KernelExpr::power_kernel();
    let checks = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let lhs = apply_bidiff(&build_e(m), &base);
            compare(format!("m={m}"), &lhs, &kernel_s(m))
        })
        .collect();
    IdentityReport {
        identity: "e-on-kernel".into(),
        checks,
    }
}

/// The polynomial `Q(u, v, w)` with `E_m = Q(L_x, L_y, grad_x . grad_y)`. A plane
/// wave `exp(i<x,xi> + i<y,eta>)` is an eigenfunction with eigenvalue
/// `Q(-|xi|^2, -|eta|^2, -<xi,eta>)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSymbol {
    pub degree: u32,
    coeffs: BTreeMap<Monomial, RatFun>,
}

impl FourierSymbol {
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RatFun)> {
        self.coeffs.iter()
    }

    /// Coefficients evaluated at numeric `(alpha, beta, d)`.
    pub fn numeric(&self, alpha: f64, beta: f64, d: f64) -> Result<NumericSymbol> {
        let point = [alpha, beta, d];
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (m, c) in &self.coeffs {
            terms.push((*m, c.eval_f64(&point).map_err(Error::from)?));
        }
        Ok(NumericSymbol { terms })
    }

    pub fn eval(&self, u: f64, v: f64, w: f64, alpha: f64, beta: f64, d: f64) -> Result<f64> {
        Ok(self.numeric(alpha, beta, d)?.eval(u, v, w))
    }
}

/// [`FourierSymbol`] with the parameters substituted.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSymbol {
    pub terms: Vec<(Monomial, f64)>,
}

impl NumericSymbol {
    pub fn eval(&self, u: f64, v: f64, w: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c * u.powi(m.a as i32) * v.powi(m.b as i32) * w.powi(m.c as i32))
            .sum()
    }

    /// Value at the frequencies `(xi, eta)` of a plane-wave pair.
    pub fn at_frequencies(&self, xi: &[f64], eta: &[f64]) -> f64 {
        let u = -xi.iter().map(|v| v * v).sum::<f64>();
        let v = -eta.iter().map(|v| v * v).sum::<f64>();
        let w = -xi.iter().zip(eta).map(|(a, b)| a * b).sum::<f64>();
        self.eval(u, v, w)
    }
}

pub fn fourier_symbol(m: u32) -> FourierSymbol {
    let e = build_e(m);
    FourierSymbol {
        degree: m,
        coeffs: e.terms().map(|(k, c)| (*k, c.clone())).collect(),
    }
}

/// Computed pole factors of `E_j` next to the literal set `Lambda_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleReport {
    pub j: u32,
    pub computed_alpha: Vec<String>,
    pub computed_beta: Vec<String>,
    pub stated_alpha: Vec<String>,
    pub stated_beta: Vec<String>,
    /// Computed factors not of the form `s + p` or `s + 1 - d/2 + p`, `0 <= p < j`.
    pub outside_family: Vec<String>,
    /// Computed factors missing from the literal set.
    pub computed_not_stated: Vec<String>,
    /// Literal factors that do not occur after cancellation.
    pub stated_not_computed: Vec<String>,
    pub contained_in_family: bool,
    pub matches_stated: bool,
}

/// The literal `Lambda_j` as factors in `s`: `s + p` for `p = 0..j-1` and
/// `s + 1 - d/2 + p` for `p = 0..j-2`.
pub fn stated_lambda_factors(j: u32, s: Symbol) -> Vec<LinearFactor> {
    let mut out: Vec<LinearFactor> = (0..j as i64).map(|p| LinearFactor::symbol_plus(s, rat(p))).collect();
    if j >= 2 {
        out.extend((0..=(j as i64 - 2)).map(|p| shifted_by_rho(s, p)));
    }
    out.sort();
    out
}

fn in_family(f: &LinearFactor, j: u32, s: Symbol) -> bool {
    (0..j as i64).any(|p| *f == LinearFactor::symbol_plus(s, rat(p)) || *f == shifted_by_rho(s, p))
}

pub fn lambda_set(j: u32) -> PoleReport {
    let e = build_e(j);
    let mut outside = Vec::new();
    let mut computed_not_stated = Vec::new();
    let mut stated_not_computed = Vec::new();
    let mut texts = [Vec::new(), Vec::new()];
    let mut stated_texts = [Vec::new(), Vec::new()];
    for (slot, s) in [Symbol::Alpha, Symbol::Beta].into_iter().enumerate() {
        let computed = e.pole_set(s);
        let stated = stated_lambda_factors(j, s);
        for f in &computed {
            if !in_family(f, j, s) {
                outside.push(f.to_string());
            }
            if !stated.contains(f) {
                computed_not_stated.push(f.to_string());
            }
        }
        for f in &stated {
            if !computed.contains(f) {
                stated_not_computed.push(f.to_string());
            }
        }
        texts[slot] = computed.iter().map(|f| f.to_string()).collect();
        stated_texts[slot] = stated.iter().map(|f| f.to_string()).collect();
    }
    let [computed_alpha, computed_beta] = texts;
    let [stated_alpha, stated_beta] = stated_texts;
    PoleReport {
        j,
        computed_alpha,
        computed_beta,
        stated_alpha,
        stated_beta,
        contained_in_family: outside.is_empty(),
        matches_stated: computed_not_stated.is_empty() && stated_not_computed.is_empty(),
        outside_family: outside,
        computed_not_stated,
        stated_not_computed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Poly {
        Poly::symbol(Symbol::Alpha)
    }
    fn beta() -> Poly {
        Poly::symbol(Symbol::Beta)
    }

    #[test]
    fn m_low_orders() {
        assert_eq!(build_m(0), BidiffOp::identity());
        assert_eq!(build_m(1), BidiffOp::mixed());
        // C^2 - (d - 4 - 2a - 2b) / (4 (a+1-d/2)(b+1-d/2)) A B
        let coeff = RatFun::from_parts(
            ratio(1, 4),
            Poly::linear(rat(-4), rat(-2), rat(-2), rat(1)),
            vec![shifted_by_rho(Symbol::Alpha, 0), shifted_by_rho(Symbol::Beta, 0)],
        );
        let expected = BidiffOp::monomial(Monomial::new(0, 0, 2), RatFun::one())
            .sub(&BidiffOp::monomial(Monomial::new(1, 1, 0), coeff));
        assert_eq!(build_m(2), expected);
    }

    #[test]
    fn c_examples() {
        assert_eq!(coeff_c(0, 0, 0), RatFun::one());
        assert_eq!(coeff_c(0, 0, 1), RatFun::from_poly(alpha().mul(&beta()).scale(&rat(4))));
        let expected = beta().mul(&Poly::linear(rat(1), rat(0), rat(1), ratio(-1, 2))).scale(&rat(4));
        assert_eq!(coeff_c(1, 0, 0), RatFun::from_poly(expected));
    }

    #[test]
    fn e_low_orders() {
        assert_eq!(build_e(0), BidiffOp::identity());
        let e1 = build_e(1);
        assert_eq!(e1.len(), 3);
        assert_eq!(e1.coefficient(&Monomial::new(0, 0, 1)), Some(&epsilon(0, 0, 1)));
        let expected = RatFun::from_integer(-2).div_factors(&[
            LinearFactor::symbol_plus(Symbol::Alpha, rat(0)),
            LinearFactor::symbol_plus(Symbol::Beta, rat(0)),
        ]);
        assert_eq!(epsilon(0, 0, 1), expected.scale(&ratio(1, 4)));
        assert_eq!(epsilon(0, 0, 1).pole_set(Symbol::Alpha), vec![LinearFactor::symbol_plus(Symbol::Alpha, rat(0))]);
        let e2 = build_e(2);
        let ab = e2.coefficient(&Monomial::new(1, 1, 0)).unwrap();
        for f in ab.denominator() {
            assert!(in_family(f, 2, Symbol::Alpha) || in_family(f, 2, Symbol::Beta), "{f}");
        }
    }

    #[test]
    fn homogeneity_and_symmetry() {
        for m in 0..=4 {
            let e = build_e(m);
            assert!(e.is_homogeneous(m));
            assert_eq!(e.swap_factors(), e);
            assert!(build_m(m).is_homogeneous(m));
        }
    }

    #[test]
    fn apply_examples() {
        let base = KernelExpr::power_kernel();
        assert_eq!(apply_bidiff(&BidiffOp::identity(), &base), base);
        let m1 = apply_bidiff(&build_m(1), &base);
        let expected = scaled_power_kernel(RatFun::from_poly(alpha().mul(&beta()).scale(&rat(4))), 1, 1, 1);
        assert!(kernel_equal(&m1, &expected));
    }

    #[test]
    fn identities_hold_at_low_order() {
        assert!(verify_laplacian_power(4).all_passed());
        assert!(verify_m_on_kernel(3, RecursionRule::Verified).all_passed());
        assert!(verify_shifted_m(3).all_passed());
        assert!(verify_e_identity(3).all_passed());
    }

    #[test]
    fn alternative_recursions_fail_at_two() {
        for rule in [RecursionRule::ProofSign, RecursionRule::AsPrinted] {
            let report = verify_m_on_kernel(2, rule);
            assert!(report.checks[0].passed && report.checks[1].passed);
            let fail = report.first_failure().expect("must fail");
            assert_eq!(fail.label, "m=2");
            assert!(fail.difference.is_some());
        }
    }

    #[test]
    fn symbol_matches_e() {
        assert_eq!(fourier_symbol(0).numeric(0.3, 0.4, 3.0).unwrap().eval(5.0, 6.0, 7.0), 1.0);
        let q1 = fourier_symbol(1).numeric(0.3, 0.4, 3.0).unwrap();
        let p = [0.3, 0.4, 3.0];
        let e = |i, j, k| epsilon(i, j, k).eval_f64(&p).unwrap();
        let (u, v, w) = (0.7, -1.3, 0.2);
        let expected = e(0, 1, 0) * u + e(1, 0, 0) * v + e(0, 0, 1) * w;
        assert!((q1.eval(u, v, w) - expected).abs() < 1e-12);
        let q3 = fourier_symbol(3).numeric(0.3, 0.4, 3.0).unwrap();
        let lam: f64 = 1.7;
        let (a, b) = (q3.eval(lam * u, lam * v, lam * w), lam.powi(3) * q3.eval(u, v, w));
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn symbol_pole_is_reported() {
        // alpha = 0 is a pole of eps_{0,0,1}
        assert!(matches!(fourier_symbol(1).numeric(0.0, 0.4, 3.0), Err(Error::Pole(_))));
    }

    #[test]
    fn pole_audit_small_j() {
        let r0 = lambda_set(0);
        assert!(r0.computed_alpha.is_empty() && r0.computed_beta.is_empty());
        let r1 = lambda_set(1);
        assert!(r1.contained_in_family);
        let allowed = [LinearFactor::symbol_plus(Symbol::Alpha, rat(0)).to_string(), shifted_by_rho(Symbol::Alpha, 0).to_string()];
        assert!(r1.computed_alpha.iter().all(|f| allowed.contains(f)));
        let r3 = lambda_set(3);
        assert!(r3.contained_in_family);
        assert_eq!(r3.stated_alpha.len(), 5);
    }

    #[test]
    fn json_and_latex() {
        let e2 = build_e(2);
        let json = e2.to_json();
        assert_eq!(json.len(), 6);
        assert!(json.iter().all(|m| m.pow_a + m.pow_b + m.pow_c == 2));
        assert!(build_e(1).to_latex().contains("\\mathcal{L}_x"));
        assert_eq!(build_e(0).to_latex(), "1");
    }
}
