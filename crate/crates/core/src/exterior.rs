//! Grassmann algebra `∧•ℂ^q ⊗ ℚ[x^±1]` on odd generators θ₁,…,θ_q.
//!
//! A [`MultiIndex`] is a bitmask (bit `a-1` ↔ θ_a), so indices are always
//! ascending and θ_a² = 0 holds by construction. Signs are paid when two
//! monomials are merged and never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    /// Build from 1-based generator labels; `None` on repeats or labels outside 1..=32.
    pub fn from_indices(indices: &[usize]) -> Option<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > 32 {
                return None;
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return None;
            }
            bits |= b;
        }
        Some(MultiIndex(bits))
    }

    pub fn single(a: usize) -> Self {
        assert!((1..=32).contains(&a), "generator index {a} out of range");
        MultiIndex(1 << (a - 1))
    }

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, a: usize) -> bool {
        (1..=32).contains(&a) && self.0 & (1 << (a - 1)) != 0
    }

    pub fn max_generator(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Ascending 1-based labels.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    /// `θ_A ∧ θ_B = sign · θ_{A∪B}`, or `None` when they share a generator.
    pub fn merge(self, other: MultiIndex) -> Option<(MultiIndex, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each generator j of B must move past the generators of A above it.
        let mut swaps = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            swaps += (self.0 >> (j + 1)).count_ones();
            b &= b - 1;
        }
        Some((MultiIndex(self.0 | other.0), swaps % 2 == 1))
    }

    /// Left derivative: `∂/∂θ_a θ_I = ± θ_{I∖a}`, sign (−1)^{#{i ∈ I : i < a}}.
    pub fn remove(self, a: usize) -> Option<(MultiIndex, bool)> {
        if !self.contains(a) {
            return None;
        }
        let below = self.0 & ((1u32 << (a - 1)) - 1);
        Some((MultiIndex(self.0 & !(1 << (a - 1))), below.count_ones() % 2 == 1))
    }

    /// All multi-indices of length `len` over q generators, in ascending order.
    pub fn all_of_len(q: usize, len: usize) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = (0u32..(1u32 << q))
            .filter(|b| b.count_ones() as usize == len)
            .map(MultiIndex)
            .collect();
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {
                if self.0 == other.0 {
                    return Ordering::Equal;
                }
                // Lexicographic on ascending labels: whoever owns the lowest differing generator is smaller.
                let low = (self.0 ^ other.0).trailing_zeros();
                if self.0 & (1 << low) != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            o => o,
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "θ{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

/// `Σ_I c_I(x) θ_I` with `c_I ∈ ℚ[x₁^±1,…,x_p^±1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    q: usize,
    p: usize,
    terms: BTreeMap<MultiIndex, LaurentPoly>,
}

impl GrassmannElement {
    pub fn zero(q: usize, p: usize) -> Self {
        GrassmannElement {
            q,
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(q: usize, p: usize) -> Self {
        Self::scalar(q, p, LaurentPoly::one(p))
    }

    pub fn scalar(q: usize, p: usize, c: LaurentPoly) -> Self {
        debug_assert_eq!(c.dim(), p, "coefficient dimension");
        Self::monomial(q, MultiIndex::EMPTY, c)
    }

    pub fn monomial(q: usize, index: MultiIndex, c: LaurentPoly) -> Self {
        assert!(index.max_generator() <= q, "multi-index {index} exceeds q = {q}");
        let p = c.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(index, c);
        }
        GrassmannElement { q, p, terms }
    }

    /// The generator θ_a (1-based).
    pub fn generator(q: usize, p: usize, a: usize) -> Self {
        assert!(a >= 1 && a <= q, "generator θ{a} out of range for q = {q}");
        Self::monomial(q, MultiIndex::single(a), LaurentPoly::one(p))
    }

    pub fn from_terms<I>(q: usize, p: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, LaurentPoly)>,
    {
        let mut out = Self::zero(q, p);
        for (i, c) in terms {
            if c.dim() != p {
                return Err(Error::mismatch("grassmann coefficient", p, c.dim()));
            }
            if i.max_generator() > q {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {i} exceeds q = {q}"
                )));
            }
            out.add_term(i, &c);
        }
        Ok(out)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, index: MultiIndex) -> LaurentPoly {
        self.terms
            .get(&index)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(self.p))
    }

    /// `Some(Even)` / `Some(Odd)` for homogeneous parity; zero counts as both, reported `Even`.
    pub fn parity(&self) -> Option<Parity> {
        let even = self.terms.keys().all(|i| i.len() % 2 == 0);
        let odd = self.terms.keys().all(|i| i.len() % 2 == 1);
        match (even, odd) {
            (true, _) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|i| i.len() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|i| i.len() % 2 == 1)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.len()).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.len()).min()
    }

    fn add_term(&mut self, index: MultiIndex, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&index);
                }
            }
            None => {
                self.terms.insert(index, c.clone());
            }
        }
    }

    fn sub_term(&mut self, index: MultiIndex, c: &LaurentPoly) {
        self.add_term(index, &-c)
    }

    fn check(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.q != other.q {
            return Err(Error::mismatch(context, self.q, other.q));
        }
        if self.p != other.p {
            return Err(Error::mismatch(context, self.p, other.p));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other, "grassmann add")?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(*i, c);
        }
        Ok(out)
    }

    pub fn checked_wedge(&self, other: &Self) -> Result<Self> {
        self.check(other, "wedge")?;
        let mut out = Self::zero(self.q, self.p);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((idx, neg)) = ia.merge(*ib) {
                    let prod = ca * cb;
                    if neg {
                        out.sub_term(idx, &prod);
                    } else {
                        out.add_term(idx, &prod);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panics on mismatched `(p, q)`; see [`checked_wedge`](Self::checked_wedge).
    pub fn wedge(&self, other: &Self) -> Self {
        self.checked_wedge(other).expect("wedge: dimension mismatch")
    }

    /// `a ∧ b` dropping every term of degree above `m` before it is formed.
    pub fn wedge_trunc(&self, other: &Self, m: usize) -> Self {
        self.check(other, "wedge").expect("wedge: dimension mismatch");
        let mut out = Self::zero(self.q, self.p);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if ia.len() + ib.len() > m {
                    continue;
                }
                if let Some((idx, neg)) = ia.merge(*ib) {
                    let prod = ca * cb;
                    if neg {
                        out.sub_term(idx, &prod);
                    } else {
                        out.add_term(idx, &prod);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("grassmann add: dimension mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other, "grassmann sub").expect("grassmann sub: dimension mismatch");
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.sub_term(*i, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.q, self.p);
        }
        GrassmannElement {
            q: self.q,
            p: self.p,
            terms: self.terms.iter().map(|(i, a)| (*i, a.scale(c))).collect(),
        }
    }

    /// Multiply every coefficient by an even function of `x`.
    pub fn scale_poly(&self, f: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.q, self.p);
        for (i, c) in &self.terms {
            out.add_term(*i, &(c * f));
        }
        out
    }

    /// Drop all terms with `|I| > m`.
    pub fn truncate(&self, m: usize) -> Self {
        GrassmannElement {
            q: self.q,
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.len() <= m)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// The homogeneous component of θ-degree `d`.
    pub fn degree_part(&self, d: usize) -> Self {
        GrassmannElement {
            q: self.q,
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.len() == d)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Left odd derivation ∂/∂θ_a.
    pub fn odd_derivation(&self, a: usize) -> Self {
        let mut out = Self::zero(self.q, self.p);
        for (i, c) in &self.terms {
            if let Some((rest, neg)) = i.remove(a) {
                if neg {
                    out.sub_term(rest, c);
                } else {
                    out.add_term(rest, c);
                }
            }
        }
        out
    }

    /// Even derivation ∂/∂x_var acting on coefficients.
    pub fn even_derivation(&self, var: usize) -> Self {
        let mut out = Self::zero(self.q, self.p);
        for (i, c) in &self.terms {
            out.add_term(*i, &c.partial(var));
        }
        out
    }

    /// `a^k` truncated at order `m`.
    pub fn wedge_power(&self, k: usize, m: usize) -> Self {
        let mut acc = Self::one(self.q, self.p);
        for _ in 0..k {
            acc = acc.wedge_trunc(self, m);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Apply a fallible map to every coefficient; the output dimension is taken from `p`.
    pub fn try_map_coeffs<F>(&self, p: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&LaurentPoly) -> Result<LaurentPoly>,
    {
        let mut out = Self::zero(self.q, p);
        for (i, c) in &self.terms {
            let v = f(c)?;
            if v.dim() != p {
                return Err(Error::mismatch("coefficient map", p, v.dim()));
            }
            out.add_term(*i, &v);
        }
        Ok(out)
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}){i}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grassmann[q={}, p={}]({})", self.q, self.p, self)
    }
}
