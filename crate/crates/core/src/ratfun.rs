//! Exact polynomials and rational functions in the three commuting symbols
//! `alpha`, `beta` and `d`.
//!
//! Denominators are never expanded: a [`RatFun`] keeps them as a sorted
//! multiset of [`LinearFactor`]s. Every coefficient the operator construction
//! produces is a ratio of Pochhammer-type products, so this representation is
//! closed under the operations we need, cancellation reduces to synthetic
//! division, and the pole set is read straight off the factor list.
//!
//! The half sum of positive roots never appears as a symbol of its own; callers
//! substitute `rho = d/2` when they build a coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Integer as an exact rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Alpha,
    Beta,
    Dim,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Alpha, Symbol::Beta, Symbol::Dim];

    pub fn index(self) -> usize {
        match self {
            Symbol::Alpha => 0,
            Symbol::Beta => 1,
            Symbol::Dim => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Alpha => "alpha",
            Symbol::Beta => "beta",
            Symbol::Dim => "d",
        }
    }

    fn latex(self) -> &'static str {
        match self {
            Symbol::Alpha => "\\alpha",
            Symbol::Beta => "\\beta",
            Symbol::Dim => "d",
        }
    }
}

/// Exponents of `(alpha, beta, d)` in a monomial.
pub type Exponents = [u32; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("polynomial is not divisible by the linear factor")]
pub struct NotDivisible;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pole: factor `{factor}` vanishes at the evaluation point")]
pub struct PoleError {
    pub factor: String,
}

/// Multivariate polynomial with exact rational coefficients.
///
/// Terms are stored in a `BTreeMap`, so iteration is in lexicographic order
/// with `alpha > beta > d`; the leading term is the last entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut e = [0; 3];
        e[s.index()] = 1;
        let mut p = Self::zero();
        p.add_term(e, Rational::one());
        p
    }

    /// `constant + a*alpha + b*beta + c*d`.
    pub fn linear(constant: Rational, a: Rational, b: Rational, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term([0, 0, 0], constant);
        p.add_term([1, 0, 0], a);
        p.add_term([0, 1, 0], b);
        p.add_term([0, 0, 1], c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponents, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c * monomial(e)` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is a constant (zero counts).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponents) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|e| e[s.index()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn involves(&self, s: Symbol) -> bool {
        self.terms.keys().any(|e| e[s.index()] > 0)
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self { terms: acc }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Replaces each symbol by the corresponding polynomial.
    pub fn substitute(&self, subs: &[Poly; 3]) -> Self {
        let mut powers: [Vec<Poly>; 3] = [vec![Poly::one()], vec![Poly::one()], vec![Poly::one()]];
        for (i, s) in subs.iter().enumerate() {
            let deg = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
            for k in 1..=deg {
                let next = powers[i][k - 1].mul(s);
                powers[i].push(next);
            }
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let term = powers[0][e[0] as usize]
                .mul(&powers[1][e[1] as usize])
                .mul(&powers[2][e[2] as usize])
                .scale(c);
            out = out.add(&term);
        }
        out
    }

    /// `alpha -> alpha + da`, `beta -> beta + db`.
    pub fn shift(&self, da: i64, db: i64) -> Self {
        if da == 0 && db == 0 {
            return self.clone();
        }
        let subs = [
            Poly::linear(rat(da), rat(1), rat(0), rat(0)),
            Poly::linear(rat(db), rat(0), rat(1), rat(0)),
            Poly::symbol(Symbol::Dim),
        ];
        self.substitute(&subs)
    }

    pub fn swap_alpha_beta(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| ([e[1], e[0], e[2]], c.clone())).collect(),
        }
    }

    /// Substitutes a rational value for one symbol.
    pub fn specialize(&self, s: Symbol, value: &Rational) -> Self {
        let mut subs = [Poly::symbol(Symbol::Alpha), Poly::symbol(Symbol::Beta), Poly::symbol(Symbol::Dim)];
        subs[s.index()] = Poly::constant(value.clone());
        self.substitute(&subs)
    }

    pub fn eval(&self, point: &[Rational; 3]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                to_f64(c) * point[0].powi(e[0] as i32) * point[1].powi(e[1] as i32) * point[2].powi(e[2] as i32)
            })
            .sum()
    }

    pub fn to_latex(&self) -> String {
        render(self, true)
    }
}

pub(crate) fn to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range; divide in two steps
        let n = c.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = c.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn fmt_rational(c: &Rational, latex: bool) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else if latex {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render(p: &Poly, latex: bool) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (e, c)) in p.terms.iter().rev().enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        for s in Symbol::ALL {
            let k = e[s.index()];
            if k == 0 {
                continue;
            }
            let name = if latex { s.latex() } else { s.name() };
            factors.push(match (k, latex) {
                (1, _) => name.to_string(),
                (_, true) => format!("{name}^{{{k}}}"),
                (_, false) => format!("{name}^{k}"),
            });
        }
        let sep = if latex { " " } else { "*" };
        if factors.is_empty() {
            out.push_str(&fmt_rational(&mag, latex));
        } else {
            if !mag.is_one() {
                out.push_str(&fmt_rational(&mag, latex));
                out.push_str(sep);
            }
            out.push_str(&factors.join(sep));
        }
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, false))
    }
}

/// `alpha*a + beta*b + d*c + constant`, kept in canonical form: the first
/// nonzero coefficient among `(a, b, c, constant)` equals one.
///
/// Field order makes the derived `Ord` compare the symbol coefficients first,
/// which is what fixes the ordering of denominator multisets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearFactor {
    alpha: Rational,
    beta: Rational,
    dim: Rational,
    constant: Rational,
}

impl LinearFactor {
    /// Normalizes `constant + a*alpha + b*beta + c*d`; returns the scale that was
    /// divided out together with the canonical factor, or `None` for zero.
    pub fn new(constant: Rational, a: Rational, b: Rational, c: Rational) -> Option<(Rational, LinearFactor)> {
        let lead = [&a, &b, &c, &constant].into_iter().find(|x| !x.is_zero())?.clone();
        let f = LinearFactor {
            alpha: &a / &lead,
            beta: &b / &lead,
            dim: &c / &lead,
            constant: &constant / &lead,
        };
        Some((lead, f))
    }

    /// `s + offset`.
    pub fn symbol_plus(s: Symbol, offset: Rational) -> Self {
        let mut coeffs = [rat(0), rat(0), rat(0)];
        coeffs[s.index()] = rat(1);
        let [a, b, c] = coeffs;
        LinearFactor {
            alpha: a,
            beta: b,
            dim: c,
            constant: offset,
        }
    }

    /// Accepts a polynomial of total degree at most one.
    pub fn from_poly(p: &Poly) -> Option<(Rational, LinearFactor)> {
        if p.total_degree() > 1 {
            return None;
        }
        Self::new(
            p.coefficient(&[0, 0, 0]),
            p.coefficient(&[1, 0, 0]),
            p.coefficient(&[0, 1, 0]),
            p.coefficient(&[0, 0, 1]),
        )
    }

    pub fn coefficient(&self, s: Symbol) -> &Rational {
        match s {
            Symbol::Alpha => &self.alpha,
            Symbol::Beta => &self.beta,
            Symbol::Dim => &self.dim,
        }
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.dim.is_zero()
    }

    pub fn involves(&self, s: Symbol) -> bool {
        !self.coefficient(s).is_zero()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(self.constant.clone(), self.alpha.clone(), self.beta.clone(), self.dim.clone())
    }

    /// Adds `p` to the constant term. The leading coefficient is untouched, so
    /// the result stays canonical unless the factor is a bare constant.
    pub fn offset(&self, p: &Rational) -> Self {
        let mut f = self.clone();
        f.constant += p;
        f
    }

    fn shift(&self, da: i64, db: i64) -> Self {
        let mut f = self.clone();
        f.constant += &f.alpha * rat(da) + &f.beta * rat(db);
        f
    }

    fn swap_alpha_beta(&self) -> (Rational, Self) {
        Self::new(self.constant.clone(), self.beta.clone(), self.alpha.clone(), self.dim.clone())
            .expect("swap of a nonzero factor is nonzero")
    }

    pub fn eval(&self, point: &[Rational; 3]) -> Rational {
        &self.constant + &self.alpha * &point[0] + &self.beta * &point[1] + &self.dim * &point[2]
    }

    /// Floating-point value together with the magnitude of its summands, which
    /// sets the scale for a zero test.
    fn eval_f64(&self, point: &[f64; 3]) -> (f64, f64) {
        let parts = [
            to_f64(&self.constant),
            to_f64(&self.alpha) * point[0],
            to_f64(&self.beta) * point[1],
            to_f64(&self.dim) * point[2],
        ];
        (parts.iter().sum(), parts.iter().map(|x| x.abs()).sum())
    }

    pub fn to_latex(&self) -> String {
        self.to_poly().to_latex()
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// Exact quotient `p / f`, or [`NotDivisible`].
///
/// Runs multivariate division in lex order. For a single divisor the remainder
/// vanishes exactly when `f` divides `p`, and the first leading term that the
/// leading monomial of `f` does not divide already lands in the remainder, so
/// the loop can stop there.
pub fn divide_by_linear(p: &Poly, f: &LinearFactor) -> Result<Poly, NotDivisible> {
    if f.is_constant() {
        // canonical constant factors are exactly one
        return Ok(p.scale(&(Rational::one() / &f.constant)));
    }
    let var = Symbol::ALL
        .into_iter()
        .find(|s| f.involves(*s))
        .expect("non-constant factor has a symbol")
        .index();
    let fpoly = f.to_poly();
    let mut rem = p.terms.clone();
    let mut quotient = Poly::zero();
    while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (*e, c.clone())) {
        if e[var] == 0 {
            return Err(NotDivisible);
        }
        let mut qe = e;
        qe[var] -= 1;
        quotient.add_term(qe, c.clone());
        for (fe, fc) in &fpoly.terms {
            let me = [qe[0] + fe[0], qe[1] + fe[1], qe[2] + fe[2]];
            let entry = rem.entry(me).or_insert_with(Rational::zero);
            *entry -= &c * fc;
            if entry.is_zero() {
                rem.remove(&me);
            }
        }
    }
    Ok(quotient)
}

/// Rising factorial `base (base+1) ... (base+j-1)`; the empty product is one.
pub fn pochhammer(base: &Poly, j: u32) -> Poly {
    let mut out = Poly::one();
    for i in 0..j {
        out = out.mul(&base.add(&Poly::constant(rat(i as i64))));
    }
    out
}

/// The `j` linear factors of `(f)_j`.
pub fn pochhammer_factors(f: &LinearFactor, j: u32) -> Vec<LinearFactor> {
    (0..j).map(|i| f.offset(&rat(i as i64))).collect()
}

/// `scalar * numerator / prod(denominator)` in canonical cancelled form.
///
/// Canonical means: zero is `0 / ()`, the numerator's leading coefficient is
/// one, the factor list is sorted and no factor divides the numerator. Linear
/// factors are irreducible, so this form is unique and structural equality is
/// equality of rational functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFun {
    scalar: Rational,
    numerator: Poly,
    denominator: Vec<LinearFactor>,
}

impl Default for RatFun {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFun {
    pub fn zero() -> Self {
        Self {
            scalar: Rational::zero(),
            numerator: Poly::zero(),
            denominator: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_parts(c, Poly::one(), Vec::new())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::from_parts(Rational::one(), p, Vec::new())
    }

    pub fn from_parts(scalar: Rational, numerator: Poly, mut denominator: Vec<LinearFactor>) -> Self {
        let mut extra = Rational::one();
        denominator.retain(|f| {
            if f.is_constant() {
                extra *= &f.constant;
                false
            } else {
                true
            }
        });
        denominator.sort();
        Self {
            scalar: scalar / extra,
            numerator,
            denominator,
        }
        .normalize()
    }

    fn normalize(mut self) -> Self {
        if self.scalar.is_zero() || self.numerator.is_zero() {
            return Self::zero();
        }
        let mut kept = Vec::with_capacity(self.denominator.len());
        for f in std::mem::take(&mut self.denominator) {
            match divide_by_linear(&self.numerator, &f) {
                Ok(q) => self.numerator = q,
                Err(NotDivisible) => kept.push(f),
            }
        }
        self.denominator = kept;
        let lc = self.numerator.leading().map(|(_, c)| c.clone()).expect("nonzero numerator");
        if !lc.is_one() {
            self.numerator = self.numerator.scale(&(Rational::one() / &lc));
            self.scalar *= lc;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_empty()
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &[LinearFactor] {
        &self.denominator
    }

    /// `scalar * numerator`, expanded.
    pub fn scaled_numerator(&self) -> Poly {
        self.numerator.scale(&self.scalar)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.denominator.is_empty() {
            self.numerator.as_constant().map(|c| c * &self.scalar)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.scalar = -out.scalar;
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        out.scalar *= k;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.denominator == other.denominator {
            let num = self.scaled_numerator().add(&other.scaled_numerator());
            return Self::from_parts(Rational::one(), num, self.denominator.clone());
        }
        // merge the two sorted multisets into their least common multiple
        let (a, b) = (&self.denominator, &other.denominator);
        let (mut i, mut j) = (0, 0);
        let mut lcm = Vec::with_capacity(a.len() + b.len());
        let mut missing_in_a = Vec::new();
        let mut missing_in_b = Vec::new();
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                lcm.push(a[i].clone());
                missing_in_b.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                lcm.push(b[j].clone());
                missing_in_a.push(b[j].clone());
                j += 1;
            } else {
                lcm.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
        let lift = |p: Poly, fs: &[LinearFactor]| fs.iter().fold(p, |acc, f| acc.mul(&f.to_poly()));
        let num = lift(self.scaled_numerator(), &missing_in_a).add(&lift(other.scaled_numerator(), &missing_in_b));
        Self::from_parts(Rational::one(), num, lcm)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut den = self.denominator.clone();
        den.extend(other.denominator.iter().cloned());
        Self::from_parts(&self.scalar * &other.scalar, self.numerator.mul(&other.numerator), den)
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        if self.is_zero() || p.is_zero() {
            return Self::zero();
        }
        Self::from_parts(self.scalar.clone(), self.numerator.mul(p), self.denominator.clone())
    }

    /// Divides by a product of linear factors.
    pub fn div_factors(&self, factors: &[LinearFactor]) -> Self {
        let mut den = self.denominator.clone();
        den.extend(factors.iter().cloned());
        Self::from_parts(self.scalar.clone(), self.numerator.clone(), den)
    }

    /// Substitutes `alpha -> alpha + da`, `beta -> beta + db` in the numerator
    /// and in every factor.
    pub fn shift(&self, da: i64, db: i64) -> Self {
        if self.is_zero() || (da == 0 && db == 0) {
            return self.clone();
        }
        Self::from_parts(
            self.scalar.clone(),
            self.numerator.shift(da, db),
            self.denominator.iter().map(|f| f.shift(da, db)).collect(),
        )
    }

    pub fn swap_alpha_beta(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut scalar = self.scalar.clone();
        let mut den = Vec::with_capacity(self.denominator.len());
        for f in &self.denominator {
            let (k, g) = f.swap_alpha_beta();
            scalar /= k;
            den.push(g);
        }
        Self::from_parts(scalar, self.numerator.swap_alpha_beta(), den)
    }

    /// Substitutes a rational value for one symbol. Fails if a denominator factor
    /// becomes identically zero.
    pub fn specialize(&self, s: Symbol, value: &Rational) -> Result<Self, PoleError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut scalar = self.scalar.clone();
        let mut den = Vec::with_capacity(self.denominator.len());
        for f in &self.denominator {
            match LinearFactor::from_poly(&f.to_poly().specialize(s, value)) {
                None => return Err(PoleError { factor: f.to_string() }),
                Some((k, g)) => {
                    scalar /= k;
                    den.push(g);
                }
            }
        }
        Ok(Self::from_parts(scalar, self.numerator.specialize(s, value), den))
    }

    pub fn eval(&self, point: &[Rational; 3]) -> Result<Rational, PoleError> {
        let mut den = Rational::one();
        for f in &self.denominator {
            let v = f.eval(point);
            if v.is_zero() {
                return Err(PoleError { factor: f.to_string() });
            }
            den *= v;
        }
        Ok(&self.scalar * self.numerator.eval(point) / den)
    }

    /// Floating-point evaluation. A factor counts as vanishing when its value is
    /// below `1e-12` relative to the size of its summands.
    pub fn eval_f64(&self, point: &[f64; 3]) -> Result<f64, PoleError> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let mut den = 1.0;
        for f in &self.denominator {
            let (v, scale) = f.eval_f64(point);
            if v.abs() <= 1e-12 * scale.max(1.0) {
                return Err(PoleError { factor: f.to_string() });
            }
            den *= v;
        }
        Ok(to_f64(&self.scalar) * self.numerator.eval_f64(point) / den)
    }

    /// Distinct denominator factors that involve `s`.
    pub fn pole_set(&self, s: Symbol) -> Vec<LinearFactor> {
        let mut out: Vec<LinearFactor> = self.denominator.iter().filter(|f| f.involves(s)).cloned().collect();
        out.dedup();
        out
    }

    /// Canonical numerator text (scalar folded in, expanded).
    pub fn numerator_text(&self) -> String {
        self.scaled_numerator().to_string()
    }

    /// One string per denominator factor, repeated according to multiplicity.
    pub fn denominator_texts(&self) -> Vec<String> {
        self.denominator.iter().map(|f| f.to_string()).collect()
    }

    pub fn to_latex(&self) -> String {
        let num = self.scaled_numerator().to_latex();
        if self.denominator.is_empty() {
            return num;
        }
        let mut groups: Vec<(&LinearFactor, usize)> = Vec::new();
        for f in &self.denominator {
            match groups.last_mut() {
                Some((g, k)) if *g == f => *k += 1,
                _ => groups.push((f, 1)),
            }
        }
        let den: String = groups
            .iter()
            .map(|(f, k)| {
                if *k == 1 {
                    format!("({})", f.to_latex())
                } else {
                    format!("({})^{{{k}}}", f.to_latex())
                }
            })
            .collect();
        format!("\\frac{{{num}}}{{{den}}}")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_empty() {
            return write!(f, "{}", self.scaled_numerator());
        }
        let den = match self.denominator.as_slice() {
            [g] => g.to_string(),
            many => many.iter().map(|g| format!("({g})")).collect::<Vec<_>>().join("*"),
        };
        write!(f, "({})/({})", self.scaled_numerator(), den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alpha() -> Poly {
        Poly::symbol(Symbol::Alpha)
    }
    fn beta() -> Poly {
        Poly::symbol(Symbol::Beta)
    }
    fn dim() -> Poly {
        Poly::symbol(Symbol::Dim)
    }
    fn c(n: i64) -> Poly {
        Poly::constant(rat(n))
    }
    /// alpha + 1 - d/2
    fn shifted_alpha() -> Poly {
        Poly::linear(rat(1), rat(1), rat(0), ratio(-1, 2))
    }
    fn factor(p: &Poly) -> LinearFactor {
        let (k, f) = LinearFactor::from_poly(p).unwrap();
        assert!(k.is_one());
        f
    }

    #[test]
    fn poly_add_and_mul() {
        assert_eq!(alpha().add(&alpha()), alpha().scale(&rat(2)));
        let prod = shifted_alpha().mul(&beta());
        let expected = alpha().mul(&beta()).add(&beta()).sub(&dim().mul(&beta()).scale(&ratio(1, 2)));
        assert_eq!(prod, expected);
        assert!(alpha().mul(&Poly::zero()).is_zero());
    }

    #[test]
    fn divide_examples() {
        let p = alpha().mul(&alpha()).add(&alpha());
        let f = factor(&alpha());
        assert_eq!(divide_by_linear(&p, &f), Ok(alpha().add(&c(1))));
        let p = alpha().mul(&alpha()).add(&c(1));
        assert_eq!(divide_by_linear(&p, &f), Err(NotDivisible));
        let p = shifted_alpha().mul(&beta().add(&c(2)));
        let g = factor(&shifted_alpha());
        let q = divide_by_linear(&p, &g).unwrap();
        assert_eq!(q, beta().add(&c(2)));
        assert_eq!(q.mul(&g.to_poly()), p);
    }

    #[test]
    fn factor_canonical_form() {
        // d/2 - 1 - alpha = -(alpha + 1 - d/2)
        let (k, f) = LinearFactor::new(rat(-1), rat(-1), rat(0), ratio(1, 2)).unwrap();
        assert_eq!(k, rat(-1));
        assert_eq!(f.to_poly(), shifted_alpha());
        assert!(LinearFactor::new(rat(0), rat(0), rat(0), rat(0)).is_none());
        let (k, f) = LinearFactor::new(rat(3), rat(0), rat(0), rat(0)).unwrap();
        assert_eq!(k, rat(3));
        assert!(f.is_constant());
    }

    #[test]
    fn ratfun_examples() {
        let fa = factor(&alpha());
        let x = RatFun::from_parts(rat(1), Poly::one(), vec![fa.clone()]);
        let y = RatFun::from_parts(rat(-1), Poly::one(), vec![fa.clone()]);
        assert!(x.add(&y).is_zero());

        let z = RatFun::from_parts(rat(1), Poly::one(), vec![factor(&shifted_alpha())]);
        let expected = RatFun::from_parts(rat(1), Poly::one(), vec![factor(&shifted_alpha().add(&c(1)))]);
        assert_eq!(z.shift(1, 0), expected);

        let p2 = pochhammer(&alpha(), 2);
        let quotient = RatFun::from_poly(p2).div_factors(&pochhammer_factors(&fa, 1));
        assert_eq!(quotient, RatFun::from_poly(alpha().add(&c(1))));
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&alpha(), 0), Poly::one());
        assert_eq!(pochhammer(&c(2), 3), c(24));
        let v = pochhammer(&shifted_alpha(), 1).eval(&[ratio(1, 2), rat(0), rat(3)]);
        assert!(v.is_zero());
    }

    #[test]
    fn pole_set_examples() {
        let fa = factor(&alpha());
        let fa1 = factor(&alpha().add(&c(1)));
        let x = RatFun::one().div_factors(&[fa.clone(), fa1.clone()]);
        assert_eq!(x.pole_set(Symbol::Alpha), vec![fa.clone(), fa1]);
        let y = RatFun::from_poly(alpha()).div_factors(&[fa.clone(), factor(&beta())]);
        assert!(y.pole_set(Symbol::Alpha).is_empty());
        assert_eq!(y.pole_set(Symbol::Beta).len(), 1);
    }

    #[test]
    fn specialize_and_eval() {
        let x = RatFun::from_poly(alpha()).div_factors(&[factor(&shifted_alpha())]);
        // d = 3: alpha / (alpha - 1/2)
        let y = x.specialize(Symbol::Dim, &rat(3)).unwrap();
        assert_eq!(y.eval(&[rat(1), rat(0), rat(99)]).unwrap(), rat(2));
        assert!(y.eval(&[ratio(1, 2), rat(0), rat(3)]).is_err());
        assert!(x.eval_f64(&[0.5, 0.0, 3.0]).is_err());
        assert!((x.eval_f64(&[1.0, 0.0, 3.0]).unwrap() - 2.0).abs() < 1e-15);
        // factor alpha, specialize alpha = 0 -> pole
        let z = RatFun::one().div_factors(&[factor(&alpha())]);
        assert!(z.specialize(Symbol::Alpha, &rat(0)).is_err());
    }

    #[test]
    fn rendering_is_stable() {
        let x = RatFun::from_poly(alpha().mul(&beta()).scale(&rat(4))).div_factors(&[factor(&shifted_alpha())]);
        assert_eq!(x.to_string(), "(4*alpha*beta)/(alpha - 1/2*d + 1)");
        assert_eq!(x.denominator_texts(), vec!["alpha - 1/2*d + 1".to_string()]);
        assert_eq!(x.to_latex(), "\\frac{4 \\alpha \\beta}{(\\alpha - \\frac{1}{2} d + 1)}");
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -5i64..6, 1i64..4), 0..5).prop_map(|ts| {
            Poly::from_terms(ts.into_iter().map(|((a, b, c), n, d)| ([a, b, c], ratio(n, d))))
        })
    }

    fn small_factor() -> impl Strategy<Value = LinearFactor> {
        (-3i64..4, -2i64..3, -2i64..3, -2i64..3).prop_filter_map("nonconstant", |(c0, a, b, d)| {
            let (_, f) = LinearFactor::new(rat(c0), rat(a), rat(b), ratio(d, 2))?;
            (!f.is_constant()).then_some(f)
        })
    }

    proptest! {
        #[test]
        fn distributivity(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(p.add(&q).mul(&r), p.mul(&r).add(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q), q.mul(&p));
        }

        #[test]
        fn divide_inverts_multiply(p in small_poly(), f in small_factor()) {
            prop_assert_eq!(divide_by_linear(&p.mul(&f.to_poly()), &f), Ok(p));
        }

        #[test]
        fn eval_is_multiplicative(p in small_poly(), q in small_poly(), f in small_factor(), g in small_factor()) {
            let x = RatFun::from_poly(p).div_factors(&[f]);
            let y = RatFun::from_poly(q).div_factors(&[g]);
            let pt = [ratio(7, 3), ratio(-5, 7), ratio(11, 5)];
            if let (Ok(a), Ok(b)) = (x.eval(&pt), y.eval(&pt)) {
                prop_assert_eq!(x.mul(&y).eval(&pt).unwrap(), &a * &b);
                prop_assert_eq!(x.add(&y).eval(&pt).unwrap(), a + b);
            }
        }

        #[test]
        fn shift_round_trip(p in small_poly(), f in small_factor()) {
            let x = RatFun::from_poly(p).div_factors(&[f]);
            prop_assert_eq!(x.shift(1, 0).shift(-1, 0), x.clone());
            prop_assert_eq!(x.swap_alpha_beta().swap_alpha_beta(), x);
        }
    }
}
