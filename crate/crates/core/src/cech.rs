//! Čech complexes of the standard affine cover of CP¹ and CP².
//!
//! Chart `c` is `{X_c ≠ 0}` with coordinates `X_j/X_c` for `j ≠ c`, in
//! increasing `j`. A cochain value on a sorted simplex `(i₀ < i₁ < …)` is
//! stored in the coordinates and frame of chart `i₀`; alternation is then
//! a pure sign, and the coboundary only has to transport the one face that
//! omits `i₀`.
//!
//! Every sheaf handled here is equivariant for the diagonal torus, so a
//! complex splits into finite blocks indexed by a homogeneous weight
//! `W ∈ ℤ^{n+1}`. All rank, kernel and solve computations are done per block.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::bott;
use crate::error::{Error, Result};
use crate::laurent::{ChartMap, ExponentVector, LaurentPoly, Rational};
use crate::linalg::{complement, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub index: usize,
    /// Homogeneous index of each affine coordinate.
    pub vars: Vec<usize>,
}

impl Chart {
    pub fn position(&self, homogeneous: usize) -> Option<usize> {
        self.vars.iter().position(|&v| v == homogeneous)
    }
}

#[derive(Debug)]
pub struct Cover {
    n: usize,
    charts: Vec<Chart>,
    transitions: BTreeMap<(usize, usize), ChartMap>,
    jacobians: BTreeMap<(usize, usize), Vec<Vec<LaurentPoly>>>,
    inverse_jacobians: BTreeMap<(usize, usize), Vec<Vec<LaurentPoly>>>,
}

static CP1: OnceLock<Cover> = OnceLock::new();
static CP2: OnceLock<Cover> = OnceLock::new();

/// The standard cover of CP^n by `n + 1` affine charts.
pub fn standard_cover(n: usize) -> Result<&'static Cover> {
    match n {
        1 => Ok(CP1.get_or_init(|| Cover::build(1))),
        2 => Ok(CP2.get_or_init(|| Cover::build(2))),
        _ => Err(Error::Unsupported(format!(
            "projective dimension {n}; only CP¹ and CP² are supported"
        ))),
    }
}

impl Cover {
    fn build(n: usize) -> Cover {
        let charts: Vec<Chart> = (0..=n)
            .map(|c| Chart {
                index: c,
                vars: (0..=n).filter(|&j| j != c).collect(),
            })
            .collect();
        let mut transitions = BTreeMap::new();
        for c in 0..=n {
            for d in 0..=n {
                transitions.insert((c, d), Self::monomial_transition(&charts, c, d));
            }
        }
        let mut jacobians = BTreeMap::new();
        for (&k, f) in &transitions {
            jacobians.insert(k, f.jacobian());
        }
        let mut inverse_jacobians = BTreeMap::new();
        for c in 0..=n {
            for d in 0..=n {
                let back = &jacobians[&(d, c)];
                let f = &transitions[&(c, d)];
                let inv: Vec<Vec<LaurentPoly>> = back
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| e.substitute(f).expect("monomial transition"))
                            .collect()
                    })
                    .collect();
                inverse_jacobians.insert((c, d), inv);
            }
        }
        Cover {
            n,
            charts,
            transitions,
            jacobians,
            inverse_jacobians,
        }
    }

    /// `f_{cd}`: chart-d coordinate `X_j/X_d = x_j / x_d` in chart-c coordinates (`x_c = 1`).
    fn monomial_transition(charts: &[Chart], c: usize, d: usize) -> ChartMap {
        let src = &charts[c];
        let p = src.vars.len();
        let comps = charts[d]
            .vars
            .iter()
            .map(|&j| {
                let mut e = vec![0i32; p];
                if let Some(pj) = src.position(j) {
                    e[pj] += 1;
                }
                if let Some(pd) = src.position(d) {
                    e[pd] -= 1;
                }
                LaurentPoly::monomial(e, Rational::one())
            })
            .collect();
        ChartMap::new(p, comps).expect("chart dimensions agree")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn chart(&self, c: usize) -> &Chart {
        &self.charts[c]
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    /// Sorted simplices of the nerve of a given degree (0: charts, 1: pairs, 2: triples).
    pub fn simplices(&self, degree: usize) -> Vec<Vec<usize>> {
        let k = self.charts.len();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..k {
                cur.push(i);
                rec(i + 1, k, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(0, k, degree + 1, &mut cur, &mut out);
        out
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.simplices(1).into_iter().map(|s| (s[0], s[1])).collect()
    }

    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        self.simplices(2).into_iter().map(|s| (s[0], s[1], s[2])).collect()
    }

    /// `f_{cd}` from chart `c` coordinates to chart `d` coordinates.
    pub fn transition(&self, c: usize, d: usize) -> &ChartMap {
        &self.transitions[&(c, d)]
    }

    /// `J_{cd} = ∂f_{cd}/∂x`, in chart-c coordinates.
    pub fn jacobian(&self, c: usize, d: usize) -> &[Vec<LaurentPoly>] {
        &self.jacobians[&(c, d)]
    }

    /// `J_{cd}^{-1} = J_{dc} ∘ f_{cd}`, in chart-c coordinates.
    pub fn inverse_jacobian(&self, c: usize, d: usize) -> &[Vec<LaurentPoly>] {
        &self.inverse_jacobians[&(c, d)]
    }

    /// `t_{cd} = X_d / X_c` as a chart-c function (1 when `c = d`).
    pub fn ratio(&self, c: usize, d: usize) -> LaurentPoly {
        let p = self.n;
        match self.charts[c].position(d) {
            Some(pos) => LaurentPoly::variable(p, pos),
            None => LaurentPoly::one(p),
        }
    }

    /// `t_{cd}^k`, an invertible monomial.
    pub fn ratio_pow(&self, c: usize, d: usize, k: i64) -> LaurentPoly {
        let p = self.n;
        match self.charts[c].position(d) {
            Some(pos) => {
                let mut e = vec![0i32; p];
                e[pos] = k as i32;
                LaurentPoly::monomial(e, Rational::one())
            }
            None => LaurentPoly::one(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SheafKind {
    /// `⊕ O(k_i)`.
    LineSum(Vec<i64>),
    /// `⊕ T(k_i)`.
    TangentTwisted(Vec<i64>),
    /// `⊕ Ω¹(k_i)`.
    OneFormTwisted(Vec<i64>),
}

impl SheafKind {
    pub fn twists(&self) -> &[i64] {
        match self {
            SheafKind::LineSum(t) | SheafKind::TangentTwisted(t) | SheafKind::OneFormTwisted(t) => t,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SheafKind::LineSum(_) => "line-sum",
            SheafKind::TangentTwisted(_) => "tangent",
            SheafKind::OneFormTwisted(_) => "one-form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SheafSpec {
    pub n: usize,
    pub kind: SheafKind,
}

impl SheafSpec {
    pub fn new(n: usize, kind: SheafKind) -> Result<Self> {
        // An empty summand list is allowed: it is the zero sheaf (e.g. ∧^j E with j > rank).
        standard_cover(n)?;
        Ok(SheafSpec { n, kind })
    }

    pub fn line_sum(n: usize, twists: Vec<i64>) -> Result<Self> {
        Self::new(n, SheafKind::LineSum(twists))
    }

    pub fn tangent(n: usize, twists: Vec<i64>) -> Result<Self> {
        Self::new(n, SheafKind::TangentTwisted(twists))
    }

    pub fn one_form(n: usize, twists: Vec<i64>) -> Result<Self> {
        Self::new(n, SheafKind::OneFormTwisted(twists))
    }

    pub fn cover(&self) -> &'static Cover {
        standard_cover(self.n).expect("validated at construction")
    }

    pub fn twists(&self) -> &[i64] {
        self.kind.twists()
    }

    /// Components per summand: 1 for line bundles, `n` for (co)tangent.
    pub fn components_per_summand(&self) -> usize {
        match self.kind {
            SheafKind::LineSum(_) => 1,
            _ => self.n,
        }
    }

    /// Length of a section vector.
    pub fn width(&self) -> usize {
        self.twists().len() * self.components_per_summand()
    }

    pub fn zero_section(&self) -> Section {
        vec![LaurentPoly::zero(self.n); self.width()]
    }

    /// Rewrite a section on chart `u` (coordinates and frame of `u`) in chart `w`.
    pub fn transport(&self, section: &[LaurentPoly], u: usize, w: usize) -> Result<Section> {
        if section.len() != self.width() {
            return Err(Error::mismatch("section width", self.width(), section.len()));
        }
        if u == w {
            return Ok(section.to_vec());
        }
        let cover = self.cover();
        let back = cover.transition(w, u);
        let cps = self.components_per_summand();
        let mut out = Vec::with_capacity(section.len());
        for (s, &k) in self.twists().iter().enumerate() {
            let twist = cover.ratio_pow(w, u, k);
            let block = &section[s * cps..(s + 1) * cps];
            let moved: Vec<LaurentPoly> = match self.kind {
                SheafKind::LineSum(_) => vec![block[0].substitute(back)?],
                SheafKind::TangentTwisted(_) => {
                    let j = cover.jacobian(u, w);
                    let pushed: Vec<LaurentPoly> = (0..cps)
                        .map(|mu| {
                            let mut acc = LaurentPoly::zero(self.n);
                            for (l, v) in block.iter().enumerate() {
                                if !v.is_zero() {
                                    acc += &(&j[mu][l] * v);
                                }
                            }
                            acc
                        })
                        .collect();
                    pushed.iter().map(|v| v.substitute(back)).collect::<Result<_>>()?
                }
                SheafKind::OneFormTwisted(_) => {
                    let pulled: Vec<LaurentPoly> =
                        block.iter().map(|v| v.substitute(back)).collect::<Result<_>>()?;
                    let j = cover.jacobian(w, u);
                    (0..cps)
                        .map(|mu| {
                            let mut acc = LaurentPoly::zero(self.n);
                            for (l, v) in pulled.iter().enumerate() {
                                if !v.is_zero() {
                                    acc += &(&j[l][mu] * v);
                                }
                            }
                            acc
                        })
                        .collect()
                }
            };
            out.extend(moved.into_iter().map(|v| &v * &twist));
        }
        Ok(out)
    }

    /// Homogeneous weight of `x^a` in component `g` on chart `c`.
    pub fn weight_of(&self, chart: usize, g: usize, a: &[i32]) -> Weight {
        let cps = self.components_per_summand();
        let (s, l) = (g / cps, g % cps);
        let k = self.twists()[s];
        let ch = self.cover().chart(chart);
        let mut b = a.to_vec();
        match self.kind {
            SheafKind::LineSum(_) => {}
            SheafKind::TangentTwisted(_) => b[l] -= 1,
            SheafKind::OneFormTwisted(_) => b[l] += 1,
        }
        let mut w = vec![0i32; self.n + 1];
        let mut sum = 0i64;
        for (pos, &h) in ch.vars.iter().enumerate() {
            w[h] = b[pos];
            sum += b[pos] as i64;
        }
        w[chart] = (k - sum) as i32;
        Weight(w)
    }

    /// Chart-`c` exponent of component `g` carrying weight `w` (requires |w| = twist of g).
    pub fn exponent_for(&self, chart: usize, g: usize, w: &Weight) -> ExponentVector {
        let cps = self.components_per_summand();
        let l = g % cps;
        let ch = self.cover().chart(chart);
        let mut a: Vec<i32> = ch.vars.iter().map(|&h| w.0[h]).collect();
        match self.kind {
            SheafKind::LineSum(_) => {}
            SheafKind::TangentTwisted(_) => a[l] += 1,
            SheafKind::OneFormTwisted(_) => a[l] -= 1,
        }
        ExponentVector::new(a)
    }

    /// The Bott-formula dimension of H^q when the sheaf is expressible there.
    pub fn bott_dim(&self, q: usize) -> Option<u64> {
        let n = self.n;
        let mut total = 0u64;
        for &k in self.twists() {
            total += match self.kind {
                SheafKind::LineSum(_) => bott::bott_dim(n, 0, q, k),
                SheafKind::OneFormTwisted(_) => bott::bott_dim(n, 1, q, k),
                SheafKind::TangentTwisted(_) => bott::tangent_dim(n, q, k),
            };
        }
        Some(total)
    }
}

impl fmt::Display for SheafSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.kind {
            SheafKind::LineSum(_) => "O",
            SheafKind::TangentTwisted(_) => "T",
            SheafKind::OneFormTwisted(_) => "Ω¹",
        };
        let parts: Vec<String> = self.twists().iter().map(|k| format!("{sym}({k})")).collect();
        write!(f, "{} on CP{}", parts.join(" ⊕ "), self.n)
    }
}

/// Torus weight of a monomial section.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i32>);

impl Weight {
    pub fn total(&self) -> i64 {
        self.0.iter().map(|&w| w as i64).sum()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Bounds on every homogeneous weight coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub const DEFAULT: Window = Window { lo: -10, hi: 10 };

    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    /// The smallest window containing `self` and every weight carried by `c`.
    pub fn widened_for(&self, c: &Cochain) -> Window {
        let mut out = *self;
        for w in c.weights() {
            for &x in &w.0 {
                out.lo = out.lo.min(x);
                out.hi = out.hi.max(x);
            }
        }
        out
    }

    pub fn contains(&self, w: &Weight) -> bool {
        w.0.iter().all(|&x| x >= self.lo && x <= self.hi)
    }

    /// The smallest window that provably contains every cohomology-carrying weight of `O(k)`.
    pub fn complete_for_line(n: usize, k: i64) -> Window {
        let lo = (k + n as i64).min(0);
        Window {
            lo: lo as i32,
            hi: k.max(0) as i32,
        }
    }

    /// Weights of total `k` inside the window, in lexicographic order.
    pub fn weights(&self, n: usize, k: i64) -> Vec<Weight> {
        let mut out = Vec::new();
        let mut cur = vec![0i32; n + 1];
        fn rec(i: usize, left: i64, win: &Window, cur: &mut Vec<i32>, out: &mut Vec<Weight>) {
            let n1 = cur.len();
            if i == n1 - 1 {
                if left >= win.lo as i64 && left <= win.hi as i64 {
                    cur[i] = left as i32;
                    out.push(Weight(cur.clone()));
                }
                return;
            }
            for v in win.lo..=win.hi {
                cur[i] = v;
                rec(i + 1, left - v as i64, win, cur, out);
            }
        }
        rec(0, k, self, &mut cur, &mut out);
        out
    }
}

pub type Section = Vec<LaurentPoly>;

/// An alternating Čech cochain, stored on sorted simplices.
#[derive(Clone, PartialEq, Eq)]
pub struct Cochain {
    sheaf: SheafSpec,
    degree: usize,
    values: BTreeMap<Vec<usize>, Section>,
}

/// Sort a simplex, returning the permutation sign; `None` on a repeated chart.
pub fn sort_simplex(simplex: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut s = simplex.to_vec();
    let mut odd = false;
    for i in 0..s.len() {
        for j in 0..s.len().saturating_sub(1 + i) {
            if s[j] == s[j + 1] {
                return None;
            }
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                odd = !odd;
            }
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((s, odd))
}

impl Cochain {
    pub fn zero(sheaf: SheafSpec, degree: usize) -> Self {
        Cochain {
            sheaf,
            degree,
            values: BTreeMap::new(),
        }
    }

    pub fn sheaf(&self) -> &SheafSpec {
        &self.sheaf
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cover(&self) -> &'static Cover {
        self.sheaf.cover()
    }

    pub fn simplices(&self) -> Vec<Vec<usize>> {
        self.cover().simplices(self.degree)
    }

    /// Nonzero stored values, keyed by sorted simplex.
    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &Section)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Set the value on a simplex given in any order (the sign of the reordering is applied).
    pub fn set(&mut self, simplex: &[usize], section: Section) -> Result<()> {
        if simplex.len() != self.degree + 1 {
            return Err(Error::mismatch("simplex length", self.degree + 1, simplex.len()));
        }
        if section.len() != self.sheaf.width() {
            return Err(Error::mismatch("section width", self.sheaf.width(), section.len()));
        }
        if let Some(p) = section.iter().find(|p| p.dim() != self.sheaf.n) {
            return Err(Error::mismatch("section coefficient dim", self.sheaf.n, p.dim()));
        }
        let k = self.cover().num_charts();
        if simplex.iter().any(|&c| c >= k) {
            return Err(Error::InvalidArgument(format!("simplex {simplex:?} not in nerve")));
        }
        let (sorted, odd) = sort_simplex(simplex)
            .ok_or_else(|| Error::InvalidArgument(format!("degenerate simplex {simplex:?}")))?;
        let section = if odd { negate(&section) } else { section };
        if section.iter().all(|p| p.is_zero()) {
            self.values.remove(&sorted);
        } else {
            self.values.insert(sorted, section);
        }
        Ok(())
    }

    /// Value on a sorted simplex (zero if unset).
    pub fn value(&self, sorted: &[usize]) -> Section {
        self.values
            .get(sorted)
            .cloned()
            .unwrap_or_else(|| self.sheaf.zero_section())
    }

    /// Value on a simplex in any order: sign(σ)·value(sorted), zero on degenerate simplices.
    pub fn value_at(&self, simplex: &[usize]) -> Section {
        match sort_simplex(simplex) {
            None => self.sheaf.zero_section(),
            Some((s, odd)) => {
                let v = self.value(&s);
                if odd {
                    negate(&v)
                } else {
                    v
                }
            }
        }
    }

    fn check_same(&self, other: &Cochain) -> Result<()> {
        if self.sheaf != other.sheaf {
            return Err(Error::InvalidArgument(format!(
                "cochains on different sheaves: {} vs {}",
                self.sheaf, other.sheaf
            )));
        }
        if self.degree != other.degree {
            return Err(Error::mismatch("cochain degree", self.degree, other.degree));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (s, v) in &other.values {
            let cur = out.value(s);
            let sum: Section = cur.iter().zip(v).map(|(a, b)| a + b).collect();
            out.set(s, sum)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.checked_add(other).expect("cochain add")
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Cochain {
        let mut out = Cochain::zero(self.sheaf.clone(), self.degree);
        if c.is_zero() {
            return out;
        }
        for (s, v) in &self.values {
            out.values.insert(s.clone(), v.iter().map(|p| p.scale(c)).collect());
        }
        out
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Rational::one())
    }

    /// A nonzero term on a simplex where it is not a regular section, if any.
    pub fn irregularity(&self) -> Option<(Vec<usize>, String)> {
        let cover = self.cover();
        for (s, v) in &self.values {
            let ch = cover.chart(s[0]);
            for (g, p) in v.iter().enumerate() {
                for (pos, &h) in ch.vars.iter().enumerate() {
                    if s.contains(&h) {
                        continue;
                    }
                    if let Some(e) = p.min_exponent(pos) {
                        if e < 0 {
                            return Some((
                                s.clone(),
                                format!("component {g} has a pole along X_{h} = 0: {p}"),
                            ));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn check_regular(&self) -> Result<()> {
        match self.irregularity() {
            None => Ok(()),
            Some((simplex, detail)) => Err(Error::IrregularSection { simplex, detail }),
        }
    }

    /// Set of weights carried by the nonzero terms.
    pub fn weights(&self) -> BTreeSet<Weight> {
        let mut out = BTreeSet::new();
        for (s, v) in &self.values {
            for (g, p) in v.iter().enumerate() {
                for (e, _) in p.terms() {
                    out.insert(self.sheaf.weight_of(s[0], g, e));
                }
            }
        }
        out
    }

    /// The part of the cochain carried by weight `w`.
    pub fn weight_part(&self, w: &Weight) -> Cochain {
        let mut out = Cochain::zero(self.sheaf.clone(), self.degree);
        for (s, v) in &self.values {
            let sec: Section = v
                .iter()
                .enumerate()
                .map(|(g, p)| {
                    let mut q = LaurentPoly::zero(self.sheaf.n);
                    for (e, c) in p.terms() {
                        if &self.sheaf.weight_of(s[0], g, e) == w {
                            q += &LaurentPoly::monomial(e.clone(), c.clone());
                        }
                    }
                    q
                })
                .collect();
            out.set(s, sec).expect("same shape");
        }
        out
    }
}

fn negate(v: &[LaurentPoly]) -> Section {
    v.iter().map(|p| -p).collect()
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain[{}; deg {}]{{", self.sheaf, self.degree)?;
        for (s, v) in &self.values {
            write!(f, " {s:?}: {v:?};")?;
        }
        write!(f, " }}")
    }
}

/// The alternating Čech differential `(δc)_{i₀…i_{d+1}} = Σ_l (−1)^l c_{i₀…î_l…}`.
pub fn coboundary(c: &Cochain) -> Result<Cochain> {
    let cover = c.cover();
    let sheaf = c.sheaf();
    let mut out = Cochain::zero(sheaf.clone(), c.degree + 1);
    for simplex in cover.simplices(c.degree + 1) {
        let mut acc = sheaf.zero_section();
        for l in 0..simplex.len() {
            let mut face = simplex.clone();
            face.remove(l);
            let raw = c.value(&face);
            if raw.iter().all(|p| p.is_zero()) {
                continue;
            }
            let v = if l == 0 {
                sheaf.transport(&raw, face[0], simplex[0])?
            } else {
                raw
            };
            for (a, b) in acc.iter_mut().zip(&v) {
                if l % 2 == 0 {
                    *a += b;
                } else {
                    *a -= b;
                }
            }
        }
        out.set(&simplex, acc)?;
    }
    Ok(out)
}

/// One basis monomial of a weight block.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BlockCell {
    simplex: Vec<usize>,
    component: usize,
    exponent: ExponentVector,
}

fn block_basis(sheaf: &SheafSpec, degree: usize, w: &Weight) -> Vec<BlockCell> {
    let cover = sheaf.cover();
    let cps = sheaf.components_per_summand();
    let total = w.total();
    let mut out = Vec::new();
    for simplex in cover.simplices(degree) {
        let c = simplex[0];
        let ch = cover.chart(c);
        for g in 0..sheaf.width() {
            if sheaf.twists()[g / cps] != total {
                continue;
            }
            let a = sheaf.exponent_for(c, g, w);
            let regular = ch
                .vars
                .iter()
                .enumerate()
                .all(|(pos, h)| simplex.contains(h) || a[pos] >= 0);
            if regular {
                out.push(BlockCell {
                    simplex: simplex.clone(),
                    component: g,
                    exponent: a,
                });
            }
        }
    }
    out
}

fn cell_cochain(sheaf: &SheafSpec, degree: usize, cell: &BlockCell, coef: Rational) -> Cochain {
    let mut c = Cochain::zero(sheaf.clone(), degree);
    let mut sec = sheaf.zero_section();
    sec[cell.component] = LaurentPoly::monomial(cell.exponent.clone(), coef);
    c.set(&cell.simplex, sec).expect("cell shape");
    c
}

fn read_block(c: &Cochain, basis: &[BlockCell]) -> Vec<Rational> {
    basis
        .iter()
        .map(|cell| c.value(&cell.simplex)[cell.component].coeff(&cell.exponent))
        .collect()
}

fn assemble(sheaf: &SheafSpec, degree: usize, basis: &[BlockCell], coords: &[Rational]) -> Cochain {
    let mut c = Cochain::zero(sheaf.clone(), degree);
    for (cell, x) in basis.iter().zip(coords) {
        if x.is_zero() {
            continue;
        }
        c = c.add(&cell_cochain(sheaf, degree, cell, x.clone()));
    }
    c
}

/// The differential `C^d(W) → C^{d+1}(W)` of one weight block.
struct BlockMap {
    source: Vec<BlockCell>,
    target: Vec<BlockCell>,
    matrix: Matrix,
}

fn block_map(sheaf: &SheafSpec, degree: usize, w: &Weight) -> Result<BlockMap> {
    let source = block_basis(sheaf, degree, w);
    let target = block_basis(sheaf, degree + 1, w);
    let mut cols = Vec::with_capacity(source.len());
    for cell in &source {
        let img = coboundary(&cell_cochain(sheaf, degree, cell, Rational::one()))?;
        let col = read_block(&img, &target);
        debug_assert_eq!(
            assemble(sheaf, degree + 1, &target, &col),
            img,
            "coboundary left its weight block"
        );
        cols.push(col);
    }
    Ok(BlockMap {
        source,
        target: target.clone(),
        matrix: Matrix::from_columns(target.len(), &cols),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    MonomialOracle,
    WindowedLinearAlgebra,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonomialOracle => "monomial-oracle",
            Method::WindowedLinearAlgebra => "windowed-linear-algebra",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub sheaf: SheafSpec,
    pub dims: BTreeMap<usize, usize>,
    /// Verified cocycle representatives per degree, each tagged by its weight block.
    pub representatives: BTreeMap<usize, Vec<(Weight, Cochain)>>,
    pub method: Method,
    pub window: Window,
    /// Whether the window provably contains every contributing weight.
    pub complete: bool,
}

impl CohomologyReport {
    pub fn dim(&self, q: usize) -> usize {
        self.dims.get(&q).copied().unwrap_or(0)
    }

    pub fn reps(&self, q: usize) -> Vec<&Cochain> {
        self.representatives
            .get(&q)
            .map(|v| v.iter().map(|(_, c)| c).collect())
            .unwrap_or_default()
    }
}

/// Harmonic basis of one weight block in degree `q`: kernel of δ_q modulo image of δ_{q−1}.
fn block_cohomology(sheaf: &SheafSpec, q: usize, w: &Weight) -> Result<Vec<Cochain>> {
    let basis = block_basis(sheaf, q, w);
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let kernel = if q < 2 {
        block_map(sheaf, q, w)?.matrix.kernel()
    } else {
        identity_columns(basis.len())
    };
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let image: Vec<Vec<Rational>> = if q == 0 {
        Vec::new()
    } else {
        let m = block_map(sheaf, q - 1, w)?;
        (0..m.matrix.cols()).map(|j| m.matrix.column(j)).collect()
    };
    let extra = complement(basis.len(), &image, &kernel);
    Ok(extra
        .iter()
        .map(|v| assemble(sheaf, q, &basis, v))
        .collect())
}

fn identity_columns(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        })
        .collect()
}

/// Every weight of the sheaf's summands inside a window.
fn all_weights(sheaf: &SheafSpec, window: &Window) -> Vec<Weight> {
    let twists: BTreeSet<i64> = sheaf.twists().iter().copied().collect();
    twists
        .into_iter()
        .flat_map(|k| window.weights(sheaf.n, k))
        .collect()
}

fn cohomology_in_window(sheaf: &SheafSpec, q: usize, window: Window, method: Method, complete: bool) -> Result<CohomologyReport> {
    if q > sheaf.n {
        return Err(Error::InvalidArgument(format!(
            "cohomological degree {q} exceeds dimension {}",
            sheaf.n
        )));
    }
    let mut reps = Vec::new();
    for w in all_weights(sheaf, &window) {
        for c in block_cohomology(sheaf, q, &w)? {
            reps.push((w.clone(), c));
        }
    }
    let mut dims = BTreeMap::new();
    dims.insert(q, reps.len());
    let mut representatives = BTreeMap::new();
    representatives.insert(q, reps);
    Ok(CohomologyReport {
        sheaf: sheaf.clone(),
        dims,
        representatives,
        method,
        window,
        complete,
    })
}

/// `H^q(CP^n, O(k))` from the Čech complex restricted to the provably complete weight window.
pub fn line_bundle_cohomology(n: usize, k: i64, q: usize) -> Result<CohomologyReport> {
    let sheaf = SheafSpec::line_sum(n, vec![k])?;
    let window = Window::complete_for_line(n, k);
    cohomology_in_window(&sheaf, q, window, Method::MonomialOracle, true)
}

/// Sign-pattern rule for one weight of `O(k)`: which degree it contributes to, if any.
pub fn sign_pattern_degree(n: usize, w: &Weight) -> Option<usize> {
    let neg = w.0.iter().filter(|&&x| x < 0).count();
    if neg == 0 {
        Some(0)
    } else if neg == n + 1 {
        Some(n)
    } else {
        None
    }
}

/// Windowed `H^q` of any supported sheaf, checked against the Bott formula.
pub fn cohomology(sheaf: &SheafSpec, q: usize, window: Window) -> Result<CohomologyReport> {
    let mut report = cohomology_in_window(sheaf, q, window, Method::WindowedLinearAlgebra, false)?;
    if let Some(expected) = sheaf.bott_dim(q) {
        let got = report.dim(q);
        if got as u64 != expected {
            return Err(Error::WindowIncomplete {
                computed: got,
                expected,
            });
        }
        report.complete = true;
    }
    Ok(report)
}

/// `H¹` representatives (the degree-1 case of [`cohomology`]).
pub fn h1_representatives(sheaf: &SheafSpec, window: Window) -> Result<CohomologyReport> {
    cohomology(sheaf, 1, window)
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solved(Cochain),
    /// No preimage exists; `blocks` lists the weights where the system is inconsistent.
    Infeasible { blocks: Vec<Weight> },
    /// Some target weight lies outside the window, so nothing was decided there.
    OutsideWindow { blocks: Vec<Weight> },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&Cochain> {
        match self {
            SolveOutcome::Solved(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, SolveOutcome::Solved(_))
    }
}

/// Find `x` with `δx = target`, block by block.
pub fn solve_coboundary(target: &Cochain, window: Window) -> Result<SolveOutcome> {
    if target.degree() == 0 {
        return Err(Error::InvalidArgument("a 0-cochain is never a coboundary target".into()));
    }
    target.check_regular()?;
    if target.degree() < 2 {
        let d = coboundary(target)?;
        if !d.is_zero() {
            return Err(Error::NotCocycle(format!("{d:?}")));
        }
    }
    let sheaf = target.sheaf().clone();
    let deg = target.degree() - 1;
    let weights = target.weights();
    let outside: Vec<Weight> = weights.iter().filter(|w| !window.contains(w)).cloned().collect();
    if !outside.is_empty() {
        return Ok(SolveOutcome::OutsideWindow { blocks: outside });
    }
    let mut solution = Cochain::zero(sheaf.clone(), deg);
    let mut bad = Vec::new();
    for w in &weights {
        let m = block_map(&sheaf, deg, w)?;
        let z = read_block(&target.weight_part(w), &m.target);
        match m.matrix.solve(&z) {
            Some(x) => solution = solution.add(&assemble(&sheaf, deg, &m.source, &x)),
            None => bad.push(w.clone()),
        }
    }
    if !bad.is_empty() {
        return Ok(SolveOutcome::Infeasible { blocks: bad });
    }
    debug_assert_eq!(&coboundary(&solution)?, target);
    Ok(SolveOutcome::Solved(solution))
}

/// Coordinates of a cocycle's class in the basis of `report`'s degree-`q` representatives.
pub fn class_coordinates(z: &Cochain, report: &CohomologyReport) -> Result<Vec<Rational>> {
    let q = z.degree();
    if z.sheaf() != &report.sheaf {
        return Err(Error::InvalidArgument("cocycle and report are on different sheaves".into()));
    }
    let reps = report.representatives.get(&q).cloned().unwrap_or_default();
    if q < 2 && !coboundary(z)?.is_zero() {
        return Err(Error::NotCocycle("class_coordinates needs a cocycle".into()));
    }
    z.check_regular()?;
    let sheaf = z.sheaf().clone();
    let mut coords = vec![Rational::zero(); reps.len()];
    for w in z.weights() {
        if !report.window.contains(&w) && !report.complete {
            return Err(Error::InvalidArgument(format!("weight {w} outside the report window")));
        }
        let basis = block_basis(&sheaf, q, &w);
        let mut cols: Vec<Vec<Rational>> = if q == 0 {
            Vec::new()
        } else {
            let m = block_map(&sheaf, q - 1, &w)?;
            (0..m.matrix.cols()).map(|j| m.matrix.column(j)).collect()
        };
        let offset = cols.len();
        let idx: Vec<usize> = reps
            .iter()
            .enumerate()
            .filter(|(_, (rw, _))| rw == &w)
            .map(|(i, _)| i)
            .collect();
        for &i in &idx {
            cols.push(read_block(&reps[i].1, &basis));
        }
        let m = Matrix::from_columns(basis.len(), &cols);
        let rhs = read_block(&z.weight_part(&w), &basis);
        let x = m.solve(&rhs).ok_or_else(|| {
            Error::WindowIncomplete {
                computed: idx.len(),
                expected: idx.len() as u64 + 1,
            }
        })?;
        for (j, &i) in idx.iter().enumerate() {
            coords[i] = x[offset + j].clone();
        }
    }
    Ok(coords)
}
