//! Multivariate Laurent polynomials over the rationals.
//!
//! On the standard covers of CP¹ and CP² every transition function is a
//! Laurent monomial, so all coefficient data of a thickening lives in
//! `ℚ[x₁^±1, …, x_p^±1]` and every computation here is exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Deref, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exterior::GrassmannElement;

/// Arbitrary-precision rational, always stored reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `"num/den"`, with the denominator omitted when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Exponent vector of a Laurent monomial; its length is the chart dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn new(exps: Vec<i32>) -> Self {
        ExponentVector(exps)
    }

    pub fn zero(dim: usize) -> Self {
        ExponentVector(vec![0; dim])
    }

    pub fn unit(dim: usize, var: usize) -> Self {
        let mut e = vec![0; dim];
        e[var] = 1;
        ExponentVector(e)
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: i32) -> Self {
        ExponentVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }
}

impl Deref for ExponentVector {
    type Target = [i32];
    fn deref(&self) -> &[i32] {
        &self.0
    }
}

impl From<Vec<i32>> for ExponentVector {
    fn from(v: Vec<i32>) -> Self {
        ExponentVector(v)
    }
}

/// A finite sum `Σ c_e x^e` with `e ∈ ℤ^dim`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(ExponentVector::zero(dim), c)
    }

    pub fn monomial(exps: impl Into<ExponentVector>, c: Rational) -> Self {
        let exps = exps.into();
        let dim = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { dim, terms }
    }

    /// The coordinate function `x_var`.
    pub fn variable(dim: usize, var: usize) -> Self {
        Self::monomial(ExponentVector::unit(dim, var), Rational::one())
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::mismatch("laurent term", dim, e.len()));
            }
            p.add_term(ExponentVector(e), c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms
            .get(&ExponentVector(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.dim])
    }

    /// `Some((e, c))` when the polynomial is the single term `c x^e`.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Smallest exponent of `var` among the terms, `None` for the zero polynomial.
    pub fn min_exponent(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[var]).min()
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: Rational) {
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

    fn check_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::mismatch(context, self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "laurent add")?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "laurent sub")?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "laurent mul")?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    /// Multiply by the monomial `x^e`.
    pub fn shift(&self, e: &ExponentVector) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.add(e), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power, allowing negative exponents when `self` is one invertible monomial.
    pub fn pow_signed(&self, k: i32) -> Result<Self> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        match self.as_monomial() {
            Some((e, c)) => {
                let inv = Rational::one() / c;
                Ok(Self::monomial(e.scaled(k), pow_rational(&inv, (-k) as u32)))
            }
            None if self.is_zero() => Err(Error::NonInvertibleBase(
                "negative power of the zero function".into(),
            )),
            None => Err(Error::NonInvertibleBase(format!(
                "negative power of the non-monomial {self}; only monomial bases are invertible"
            ))),
        }
    }

    /// Formal partial derivative in `var`; panics if `var >= dim`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.dim, "partial: variable {var} out of range for dim {}", self.dim);
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e[var];
            if k != 0 {
                let mut d = e.0.clone();
                d[var] -= 1;
                out.add_term(ExponentVector(d), c * rat(k as i64));
            }
        }
        out
    }

    /// The composite `self ∘ map`; negative exponents need monomial components.
    pub fn substitute(&self, map: &ChartMap) -> Result<Self> {
        if map.target_dim() != self.dim {
            return Err(Error::mismatch("substitute", self.dim, map.target_dim()));
        }
        let mut cache: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut out = Self::zero(map.source_dim());
        for (e, c) in &self.terms {
            let mut term = Self::constant(map.source_dim(), c.clone());
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = match cache.get(&(j, k)) {
                    Some(f) => f.clone(),
                    None => {
                        let f = map.components[j].pow_signed(k).map_err(|err| match err {
                            Error::NonInvertibleBase(msg) => Error::NonInvertibleBase(format!(
                                "component {j} of the base map: {msg}"
                            )),
                            other => other,
                        })?;
                        cache.insert((j, k), f.clone());
                        f
                    }
                };
                term = &term * &factor;
            }
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }

    /// Change the ambient dimension by embedding / projecting exponent vectors.
    pub fn map_exponents(&self, dim: usize, f: impl Fn(&ExponentVector) -> Vec<i32>) -> Self {
        let mut out = Self::zero(dim);
        for (e, c) in &self.terms {
            out.add_term(ExponentVector(f(e)), c.clone());
        }
        out
    }
}

fn pow_rational(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let is_const = e.iter().all(|&k| k == 0);
            if !mag.is_one() || is_const {
                write!(f, "{}", format_rational(&mag))?;
            }
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "x{j}")?,
                    _ => write!(f, "x{j}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.dim, self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("LaurentPoly + : dimension mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("LaurentPoly - : dimension mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("LaurentPoly * : dimension mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Rational::one())
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        assert_eq!(self.dim, rhs.dim, "LaurentPoly += : dimension mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        assert_eq!(self.dim, rhs.dim, "LaurentPoly -= : dimension mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

/// A map of charts `ℂ^source ⊃ U → ℂ^target`, one Laurent polynomial per target coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChartMap {
    source_dim: usize,
    components: Vec<LaurentPoly>,
}

impl ChartMap {
    pub fn new(source_dim: usize, components: Vec<LaurentPoly>) -> Result<Self> {
        for c in &components {
            if c.dim() != source_dim {
                return Err(Error::mismatch("chart map component", source_dim, c.dim()));
            }
        }
        Ok(ChartMap {
            source_dim,
            components,
        })
    }

    pub fn identity(dim: usize) -> Self {
        ChartMap {
            source_dim: dim,
            components: (0..dim).map(|j| LaurentPoly::variable(dim, j)).collect(),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LaurentPoly] {
        &self.components
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ChartMap) -> Result<ChartMap> {
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(inner))
            .collect::<Result<Vec<_>>>()?;
        ChartMap::new(inner.source_dim, components)
    }

    /// `J[i][j] = ∂(component i)/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<LaurentPoly>> {
        self.components
            .iter()
            .map(|c| (0..self.source_dim).map(|j| c.partial(j)).collect())
            .collect()
    }
}

/// `p(f(x) + n) = Σ_α (1/α!) ∂^α p(f(x)) · n^α`, truncated modulo `J^{m+1}`.
///
/// Each entry of `nilpotent` must be even with vanishing degree-0 part, so the
/// sum is finite: a multi-index contributes only while `2|α| ≤ m`.
pub fn substitute_nilpotent(
    p: &LaurentPoly,
    base: &ChartMap,
    nilpotent: &[GrassmannElement],
    q: usize,
    m: usize,
) -> Result<GrassmannElement> {
    if base.target_dim() != p.dim() {
        return Err(Error::mismatch("substitute_nilpotent base", p.dim(), base.target_dim()));
    }
    if nilpotent.len() != p.dim() {
        return Err(Error::mismatch("substitute_nilpotent shifts", p.dim(), nilpotent.len()));
    }
    let src = base.source_dim();
    for n in nilpotent {
        if n.q() != q || n.p() != src {
            return Err(Error::InvalidArgument(format!(
                "nilpotent shift lives in ({}|{}), expected ({}|{})",
                n.p(),
                n.q(),
                src,
                q
            )));
        }
        if !n.is_even() || !n.degree_part(0).is_zero() {
            return Err(Error::InvalidArgument(
                "nilpotent shift must be even with zero degree-0 part".into(),
            ));
        }
    }

    // powers[j][k] = n_j^k, truncated; stops once the power vanishes.
    let mut powers: Vec<Vec<GrassmannElement>> = Vec::with_capacity(p.dim());
    for n in nilpotent {
        let mut row = vec![GrassmannElement::one(q, src)];
        if !n.is_zero() {
            loop {
                let next = row.last().unwrap().wedge(n).truncate(m);
                if next.is_zero() {
                    break;
                }
                row.push(next);
            }
        }
        powers.push(row);
    }

    let mut out = GrassmannElement::zero(q, src);
    let mut alpha = vec![0usize; p.dim()];
    accumulate_taylor(p, base, &powers, m, 0, &mut alpha, q, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn accumulate_taylor(
    p: &LaurentPoly,
    base: &ChartMap,
    powers: &[Vec<GrassmannElement>],
    m: usize,
    var: usize,
    alpha: &mut Vec<usize>,
    q: usize,
    out: &mut GrassmannElement,
) -> Result<()> {
    if var == p.dim() {
        let mut deriv = p.clone();
        let mut fact = BigInt::one();
        for (j, &a) in alpha.iter().enumerate() {
            for i in 0..a {
                deriv = deriv.partial(j);
                fact *= BigInt::from(i + 1);
            }
        }
        if deriv.is_zero() {
            return Ok(());
        }
        let coeff = deriv
            .substitute(base)?
            .scale(&(Rational::one() / Rational::from_integer(fact)));
        if coeff.is_zero() {
            return Ok(());
        }
        let mut prod = GrassmannElement::one(q, base.source_dim());
        for (j, &a) in alpha.iter().enumerate() {
            if a > 0 {
                prod = prod.wedge(&powers[j][a]).truncate(m);
            }
        }
        *out = out.add(&prod.scale_poly(&coeff));
        return Ok(());
    }
    for a in 0..powers[var].len() {
        alpha[var] = a;
        accumulate_taylor(p, base, powers, m, var + 1, alpha, q, out)?;
    }
    alpha[var] = 0;
    Ok(())
}

/// Factorial as `u64`, used in tests and certificates.
pub fn factorial(k: u32) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}
