//! Super coordinate changes between charts and trivialisations of thickenings.
//!
//! A [`SuperMap`] from chart `U` to chart `V` writes the coordinates
//! `(y, η)` of `V` as Grassmann-valued functions of `(x, θ)` on `U`, truncated
//! at some order `m`. Bundle data is split and diagonal: the odd linear part of
//! `ρ_{UV}` is `η_a = t_{UV}^{k_a} θ_a` with `t_{UV} = X_V/X_U`.
//!
//! Homogeneous pieces of maps (corrections, defects) come out in *mixed form*:
//! arguments in the first chart, frame of the last. A cochain stores the same
//! data in the first chart's own frame; [`mixed_to_canonical`] and
//! [`canonical_to_mixed`] convert between the two.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::bott::SplitBundleDegrees;
use crate::cech::{coboundary, solve_coboundary, standard_cover, Cochain, Cover, Section, SheafSpec, SolveOutcome, Window};
use crate::error::{Error, Result};
use crate::exterior::{GrassmannElement, MultiIndex};
use crate::laurent::{substitute_nilpotent, ChartMap, LaurentPoly};

#[derive(Clone, PartialEq, Eq)]
pub struct SuperMap {
    source: usize,
    target: usize,
    p: usize,
    q: usize,
    order: usize,
    even: Vec<GrassmannElement>,
    odd: Vec<GrassmannElement>,
}

/// A formal difference of two super maps: `p` even and `q` odd components.
#[derive(Clone, PartialEq, Eq)]
pub struct MapDiff {
    pub even: Vec<GrassmannElement>,
    pub odd: Vec<GrassmannElement>,
}

impl MapDiff {
    pub fn zero(p: usize, q: usize) -> Self {
        MapDiff {
            even: vec![GrassmannElement::zero(q, p); p],
            odd: vec![GrassmannElement::zero(q, p); q],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.even.iter().chain(&self.odd).all(|e| e.is_zero())
    }

    pub fn degree_part(&self, d: usize) -> MapDiff {
        MapDiff {
            even: self.even.iter().map(|e| e.degree_part(d)).collect(),
            odd: self.odd.iter().map(|e| e.degree_part(d)).collect(),
        }
    }

    pub fn truncate(&self, m: usize) -> MapDiff {
        MapDiff {
            even: self.even.iter().map(|e| e.truncate(m)).collect(),
            odd: self.odd.iter().map(|e| e.truncate(m)).collect(),
        }
    }

    pub fn add(&self, other: &MapDiff) -> MapDiff {
        MapDiff {
            even: self.even.iter().zip(&other.even).map(|(a, b)| a.add(b)).collect(),
            odd: self.odd.iter().zip(&other.odd).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &MapDiff) -> MapDiff {
        MapDiff {
            even: self.even.iter().zip(&other.even).map(|(a, b)| a.sub(b)).collect(),
            odd: self.odd.iter().zip(&other.odd).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.even.iter().chain(&self.odd).filter_map(|e| e.min_degree()).min()
    }

    fn all(&self) -> Vec<GrassmannElement> {
        self.even.iter().chain(&self.odd).cloned().collect()
    }
}

impl fmt::Debug for MapDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MapDiff{{ even: {:?}, odd: {:?} }}", self.even, self.odd)
    }
}

impl fmt::Display for MapDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (mu, e) in self.even.iter().enumerate() {
            if !e.is_zero() {
                parts.push(format!("y{mu}: {e}"));
            }
        }
        for (a, e) in self.odd.iter().enumerate() {
            if !e.is_zero() {
                parts.push(format!("η{}: {e}", a + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

impl SuperMap {
    pub fn new(
        source: usize,
        target: usize,
        order: usize,
        even: Vec<GrassmannElement>,
        odd: Vec<GrassmannElement>,
    ) -> Result<Self> {
        let p = even.len();
        let q = odd.len();
        for e in even.iter().chain(&odd) {
            if e.p() != p {
                return Err(Error::mismatch("super map coefficient dim", p, e.p()));
            }
            if e.q() != q {
                return Err(Error::mismatch("super map odd dim", q, e.q()));
            }
        }
        if let Some(i) = even.iter().position(|e| !e.is_even()) {
            return Err(Error::InvalidArgument(format!("even component {i} is not even")));
        }
        if let Some(i) = odd.iter().position(|e| !e.is_odd()) {
            return Err(Error::InvalidArgument(format!("odd component {} is not odd", i + 1)));
        }
        Ok(SuperMap {
            source,
            target,
            p,
            q,
            order,
            even: even.iter().map(|e| e.truncate(order)).collect(),
            odd: odd.iter().map(|e| e.truncate(order)).collect(),
        })
    }

    pub fn identity(chart: usize, p: usize, q: usize, order: usize) -> Self {
        SuperMap {
            source: chart,
            target: chart,
            p,
            q,
            order,
            even: (0..p)
                .map(|mu| GrassmannElement::scalar(q, p, LaurentPoly::variable(p, mu)))
                .collect(),
            odd: (1..=q).map(|a| GrassmannElement::generator(q, p, a)).collect(),
        }
    }

    /// The split-model coordinate change `y = f_{cd}(x)`, `η_a = t_{cd}^{k_a} θ_a`.
    pub fn split(n: usize, degrees: &SplitBundleDegrees, c: usize, d: usize, order: usize) -> Result<Self> {
        let cover = standard_cover(n)?;
        let q = degrees.rank();
        let even = cover
            .transition(c, d)
            .components()
            .iter()
            .map(|f| GrassmannElement::scalar(q, n, f.clone()))
            .collect();
        let odd = degrees
            .degrees()
            .iter()
            .enumerate()
            .map(|(a, &k)| {
                GrassmannElement::monomial(q, MultiIndex::single(a + 1), cover.ratio_pow(c, d, k))
            })
            .collect();
        Ok(SuperMap {
            source: c,
            target: d,
            p: n,
            q,
            order,
            even,
            odd,
        })
        .map(|m: SuperMap| m.truncate(order))
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn even(&self) -> &[GrassmannElement] {
        &self.even
    }

    pub fn odd(&self) -> &[GrassmannElement] {
        &self.odd
    }

    /// The underlying map of charts (degree-0 part of the even components).
    pub fn base(&self) -> ChartMap {
        ChartMap::new(
            self.p,
            self.even.iter().map(|e| e.coeff(MultiIndex::EMPTY)).collect(),
        )
        .expect("dimensions checked at construction")
    }

    pub fn truncate(&self, m: usize) -> SuperMap {
        SuperMap {
            order: m,
            even: self.even.iter().map(|e| e.truncate(m)).collect(),
            odd: self.odd.iter().map(|e| e.truncate(m)).collect(),
            ..self.clone()
        }
    }

    /// Same data, regarded at order `m ≥ order` (all new top coefficients zero).
    pub fn raise_order(&self, m: usize) -> SuperMap {
        SuperMap {
            order: m,
            ..self.clone()
        }
    }

    pub fn diff(&self, other: &SuperMap) -> MapDiff {
        MapDiff {
            even: self.even.iter().zip(&other.even).map(|(a, b)| a.sub(b)).collect(),
            odd: self.odd.iter().zip(&other.odd).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn as_diff(&self) -> MapDiff {
        MapDiff {
            even: self.even.clone(),
            odd: self.odd.clone(),
        }
    }

    pub fn add_diff(&self, d: &MapDiff) -> SuperMap {
        SuperMap {
            even: self.even.iter().zip(&d.even).map(|(a, b)| a.add(b).truncate(self.order)).collect(),
            odd: self.odd.iter().zip(&d.odd).map(|(a, b)| a.add(b).truncate(self.order)).collect(),
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && *self == SuperMap::identity(self.source, self.p, self.q, self.order)
    }

    /// Whether `self ≡ id` modulo `J^j`.
    pub fn is_identity_mod(&self, j: usize) -> bool {
        let id = SuperMap::identity(self.source, self.p, self.q, self.order);
        self.source == self.target && self.diff(&id).truncate(j.saturating_sub(1)).is_zero()
    }
}

impl fmt::Debug for SuperMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SuperMap[{}→{}, m={}]{{ even: {:?}, odd: {:?} }}",
            self.source, self.target, self.order, self.even, self.odd
        )
    }
}

/// Rewrite functions of `f`'s target coordinates as functions of its source coordinates.
pub fn pull_back(elements: &[GrassmannElement], f: &SuperMap, m: usize) -> Result<Vec<GrassmannElement>> {
    let (p, q) = (f.p, f.q);
    let base = f.base();
    let nil: Vec<GrassmannElement> = f.even.iter().map(|e| e.sub(&e.degree_part(0))).collect();
    let mut products: HashMap<MultiIndex, GrassmannElement> = HashMap::new();
    products.insert(MultiIndex::EMPTY, GrassmannElement::one(q, p));
    let mut subst: HashMap<LaurentPoly, GrassmannElement> = HashMap::new();
    let mut out = Vec::with_capacity(elements.len());
    for el in elements {
        if el.q() != q || el.p() != p {
            return Err(Error::InvalidArgument(format!(
                "pull_back: element lives in ({}|{}), map in ({p}|{q})",
                el.p(),
                el.q()
            )));
        }
        let mut acc = GrassmannElement::zero(q, p);
        for (idx, c) in el.terms() {
            if idx.len() > m {
                continue;
            }
            let prod = odd_product(*idx, f, m, &mut products);
            if prod.is_zero() {
                continue;
            }
            let sc = match subst.get(c) {
                Some(s) => s.clone(),
                None => {
                    let s = substitute_nilpotent(c, &base, &nil, q, m)?;
                    subst.insert(c.clone(), s.clone());
                    s
                }
            };
            acc = acc.add(&sc.wedge_trunc(&prod, m));
        }
        out.push(acc);
    }
    Ok(out)
}

fn odd_product(
    idx: MultiIndex,
    f: &SuperMap,
    m: usize,
    cache: &mut HashMap<MultiIndex, GrassmannElement>,
) -> GrassmannElement {
    if let Some(v) = cache.get(&idx) {
        return v.clone();
    }
    let top = idx.max_generator();
    let rest = MultiIndex::from_bits(idx.bits() & !(1 << (top - 1)));
    let head = odd_product(rest, f, m, cache);
    let v = head.wedge_trunc(&f.odd[top - 1], m);
    cache.insert(idx, v.clone());
    v
}

/// `g ∘ f` modulo `J^{m+1}`.
pub fn compose(g: &SuperMap, f: &SuperMap, m: usize) -> Result<SuperMap> {
    if f.target != g.source {
        return Err(Error::InvalidArgument(format!(
            "compose: f ends in chart {} but g starts in chart {}",
            f.target, g.source
        )));
    }
    if f.p != g.p || f.q != g.q {
        return Err(Error::mismatch("compose dimensions", f.p, g.p));
    }
    let even = pull_back(&g.even, f, m)?;
    let odd = pull_back(&g.odd, f, m)?;
    Ok(SuperMap {
        source: f.source,
        target: g.target,
        p: f.p,
        q: f.q,
        order: m,
        even,
        odd,
    })
}

/// Inverse of `f` modulo `J^{m+1}`, by fixed-point correction of the split inverse.
///
/// `base_inverse` must invert the underlying chart map, and the odd linear part of
/// `f` must be diagonal with monomial entries.
pub fn invert(f: &SuperMap, base_inverse: &ChartMap, m: usize) -> Result<SuperMap> {
    let (p, q) = (f.p, f.q);
    if base_inverse.compose(&f.base())? != ChartMap::identity(p) {
        return Err(Error::NonInvertibleBase(format!(
            "supplied base inverse does not invert the chart map {}→{}",
            f.source, f.target
        )));
    }
    let mut odd = Vec::with_capacity(q);
    for a in 1..=q {
        let lin = f.odd[a - 1].degree_part(1);
        let own = MultiIndex::single(a);
        let u = lin.coeff(own);
        if lin.num_terms() != 1 || u.as_monomial().is_none() {
            return Err(Error::Unsupported(format!(
                "odd linear part of component {a} is not an invertible diagonal monomial: {lin}"
            )));
        }
        let inv = u.pow_signed(-1)?.substitute(base_inverse)?;
        odd.push(GrassmannElement::monomial(q, own, inv));
    }
    let even = base_inverse
        .components()
        .iter()
        .map(|c| GrassmannElement::scalar(q, p, c.clone()))
        .collect();
    let mut g = SuperMap {
        source: f.target,
        target: f.source,
        p,
        q,
        order: m,
        even,
        odd,
    };
    let id = SuperMap::identity(f.source, p, q, m);
    for _ in 0..=m + 1 {
        let e = compose(&g, f, m)?.diff(&id);
        if e.is_zero() {
            return Ok(g);
        }
        let corr = pull_back(&e.all(), &g, m)?;
        let (ce, co) = corr.split_at(p);
        g = g.add_diff(&MapDiff {
            even: ce.iter().map(|x| x.neg()).collect(),
            odd: co.iter().map(|x| x.neg()).collect(),
        });
    }
    Err(Error::NonInvertibleBase(format!(
        "inverse of {}→{} did not converge",
        f.source, f.target
    )))
}

/// `T ⊗ ∧^j E` for even `j`, `∧^j E ⊗ E^∨` for odd `j`, as a sheaf with fixed summand order.
pub fn slot_sheaf(n: usize, degrees: &SplitBundleDegrees, j: usize) -> Result<SheafSpec> {
    let q = degrees.rank();
    let idx = MultiIndex::all_of_len(q, j);
    let d = degrees.degrees();
    let k_of = |i: &MultiIndex| -> i64 { i.indices().iter().map(|&a| d[a - 1]).sum() };
    if j.is_multiple_of(2) {
        SheafSpec::tangent(n, idx.iter().map(k_of).collect())
    } else {
        let mut tw = Vec::new();
        for i in &idx {
            for &ka in d {
                tw.push(k_of(i) - ka);
            }
        }
        SheafSpec::line_sum(n, tw)
    }
}

/// Degree-`j` mixed data (arguments and θ-frame of `u`, coordinate frame of `w`) as a section on chart `u`.
pub fn mixed_to_canonical(n: usize, degrees: &SplitBundleDegrees, j: usize, d: &MapDiff, u: usize, w: usize) -> Result<Section> {
    let cover = standard_cover(n)?;
    let q = degrees.rank();
    let idx = MultiIndex::all_of_len(q, j);
    let mut out = Vec::new();
    if j.is_multiple_of(2) {
        let inv = cover.inverse_jacobian(u, w);
        for i in &idx {
            let v: Vec<LaurentPoly> = d.even.iter().map(|e| e.coeff(*i)).collect();
            for row in inv.iter().take(n) {
                let mut acc = LaurentPoly::zero(n);
                for (l, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &(&row[l] * x);
                    }
                }
                out.push(acc);
            }
        }
    } else {
        for i in &idx {
            for (a, &ka) in degrees.degrees().iter().enumerate() {
                out.push(&d.odd[a].coeff(*i) * &cover.ratio_pow(u, w, -ka));
            }
        }
    }
    Ok(out)
}

/// Inverse of [`mixed_to_canonical`]: a section on chart `u` as degree-`j` mixed data in the frame of `w`.
pub fn canonical_to_mixed(n: usize, degrees: &SplitBundleDegrees, j: usize, section: &[LaurentPoly], u: usize, w: usize) -> Result<MapDiff> {
    let cover = standard_cover(n)?;
    let q = degrees.rank();
    let idx = MultiIndex::all_of_len(q, j);
    let mut d = MapDiff::zero(n, q);
    if j.is_multiple_of(2) {
        let jac = cover.jacobian(u, w);
        if section.len() != idx.len() * n {
            return Err(Error::mismatch("even slot section", idx.len() * n, section.len()));
        }
        for (s, i) in idx.iter().enumerate() {
            for (mu, row) in jac.iter().enumerate() {
                let mut acc = LaurentPoly::zero(n);
                for l in 0..n {
                    let x = &section[s * n + l];
                    if !x.is_zero() {
                        acc += &(&row[l] * x);
                    }
                }
                d.even[mu] = d.even[mu].add(&GrassmannElement::monomial(q, *i, acc));
            }
        }
    } else {
        if section.len() != idx.len() * q {
            return Err(Error::mismatch("odd slot section", idx.len() * q, section.len()));
        }
        for (s, i) in idx.iter().enumerate() {
            for (a, &ka) in degrees.degrees().iter().enumerate() {
                let c = &section[s * q + a] * &cover.ratio_pow(u, w, ka);
                d.odd[a] = d.odd[a].add(&GrassmannElement::monomial(q, *i, c));
            }
        }
    }
    Ok(d)
}

/// The literal twisted coboundary `φ_{VW}∘ρ_{UV} + J_{VW}·φ_{UV} − φ_{UW}` for split `ρ`,
/// evaluated on one ordered triple and returned as a section on chart `u`.
pub fn mixed_coboundary(phi: &Cochain, degrees: &SplitBundleDegrees, j: usize, (u, v, w): (usize, usize, usize)) -> Result<Section> {
    let n = phi.sheaf().n;
    let cover = standard_cover(n)?;
    let q = degrees.rank();
    let axes = |a: usize, b: usize| -> Result<MapDiff> {
        let sec = phi.value_at(&[a, b]);
        let sheaf = phi.sheaf();
        // value_at is stored on the smaller chart; bring it to chart `a` first.
        let lo = a.min(b);
        let sec = sheaf.transport(&sec, lo, a)?;
        canonical_to_mixed(n, degrees, j, &sec, a, b)
    };
    let phi_vw = axes(v, w)?;
    let phi_uv = axes(u, v)?;
    let phi_uw = axes(u, w)?;
    let rho_uv = SuperMap::split(n, degrees, u, v, j)?;
    let pulled = pull_back(&phi_vw.all(), &rho_uv, j)?;
    let (pe, po) = pulled.split_at(n);
    let f_uv = cover.transition(u, v);
    let mut lin = MapDiff::zero(n, q);
    let jac = cover.jacobian(v, w);
    for (mu, row) in jac.iter().enumerate() {
        for (l, entry) in row.iter().enumerate() {
            let s = entry.substitute(f_uv)?;
            lin.even[mu] = lin.even[mu].add(&phi_uv.even[l].scale_poly(&s));
        }
    }
    for (a, &ka) in degrees.degrees().iter().enumerate() {
        let z = cover.ratio_pow(v, w, ka).substitute(f_uv)?;
        lin.odd[a] = phi_uv.odd[a].scale_poly(&z);
    }
    let total = MapDiff {
        even: pe.to_vec(),
        odd: po.to_vec(),
    }
    .add(&lin)
    .sub(&phi_uw);
    mixed_to_canonical(n, degrees, j, &total.degree_part(j), u, w)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Trivialization {
    n: usize,
    order: usize,
    degrees: SplitBundleDegrees,
    maps: BTreeMap<(usize, usize), SuperMap>,
}

impl fmt::Debug for Trivialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trivialization[CP{}, m={}, E={}]", self.n, self.order, self.degrees)?;
        for ((u, v), m) in &self.maps {
            write!(f, "\n  {u}{v}: {:?}", m.as_diff())?;
        }
        Ok(())
    }
}

/// An obstruction 2-cocycle together with the order of the trivialisation it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCocycle {
    pub order: usize,
    pub cochain: Cochain,
}

impl ObstructionCocycle {
    /// Degree in the θ-filtration (`order + 1`).
    pub fn degree(&self) -> usize {
        self.order + 1
    }

    pub fn is_even_slot(&self) -> bool {
        self.degree().is_multiple_of(2)
    }
}

#[derive(Clone, Debug)]
pub struct GammaCheck {
    pub pass: bool,
    /// True when the cover has no 4-fold overlaps, so δΓ is vacuous and the
    /// alternation / consistency checks were used instead.
    pub coboundary_vacuous: bool,
    pub residual: Option<String>,
}

#[derive(Clone, Debug)]
pub enum ExtensionOutcome {
    Extended(Trivialization),
    Obstructed {
        gamma: ObstructionCocycle,
        blocks: Vec<crate::cech::Weight>,
    },
    Undecided {
        gamma: ObstructionCocycle,
        blocks: Vec<crate::cech::Weight>,
    },
}

impl Trivialization {
    pub fn split_model(n: usize, degrees: &SplitBundleDegrees, order: usize) -> Result<Self> {
        let cover = standard_cover(n)?;
        let mut maps = BTreeMap::new();
        for u in 0..cover.num_charts() {
            for v in 0..cover.num_charts() {
                if u != v {
                    maps.insert((u, v), SuperMap::split(n, degrees, u, v, order)?);
                }
            }
        }
        Ok(Trivialization {
            n,
            order,
            degrees: degrees.clone(),
            maps,
        })
    }

    /// Build from maps on sorted pairs; reversed pairs become exact inverses.
    pub fn from_sorted(
        n: usize,
        degrees: &SplitBundleDegrees,
        order: usize,
        sorted: BTreeMap<(usize, usize), SuperMap>,
    ) -> Result<Self> {
        let cover = standard_cover(n)?;
        let mut maps = BTreeMap::new();
        for (u, v) in cover.pairs() {
            let m = match sorted.get(&(u, v)) {
                Some(m) => m.clone(),
                None => SuperMap::split(n, degrees, u, v, order)?,
            };
            check_map(&m, n, degrees, u, v)?;
            let m = m.truncate(order);
            let inv = invert(&m, cover.transition(v, u), order)?;
            maps.insert((u, v), m);
            maps.insert((v, u), inv);
        }
        Ok(Trivialization {
            n,
            order,
            degrees: degrees.clone(),
            maps,
        })
    }

    /// Build from explicit maps on ordered pairs; a missing pair is the inverse of its
    /// reverse when that is given, and split-model data otherwise.
    pub fn from_maps(
        n: usize,
        degrees: &SplitBundleDegrees,
        order: usize,
        given: BTreeMap<(usize, usize), SuperMap>,
    ) -> Result<Self> {
        let cover = standard_cover(n)?;
        let mut maps = BTreeMap::new();
        for (&(u, v), m) in &given {
            if u == v || u >= cover.num_charts() || v >= cover.num_charts() {
                return Err(Error::InvalidArgument(format!("chart pair {u},{v} not in the nerve")));
            }
            check_map(m, n, degrees, u, v)?;
            maps.insert((u, v), m.truncate(order));
        }
        for u in 0..cover.num_charts() {
            for v in 0..cover.num_charts() {
                if u == v || maps.contains_key(&(u, v)) {
                    continue;
                }
                let m = match given.get(&(v, u)) {
                    Some(rev) => invert(&rev.truncate(order), cover.transition(u, v), order)?,
                    None => SuperMap::split(n, degrees, u, v, order)?,
                };
                maps.insert((u, v), m);
            }
        }
        Ok(Trivialization {
            n,
            order,
            degrees: degrees.clone(),
            maps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degrees(&self) -> &SplitBundleDegrees {
        &self.degrees
    }

    pub fn q(&self) -> usize {
        self.degrees.rank()
    }

    pub fn cover(&self) -> &'static Cover {
        standard_cover(self.n).expect("validated")
    }

    pub fn map(&self, u: usize, v: usize) -> &SuperMap {
        &self.maps[&(u, v)]
    }

    pub fn maps(&self) -> &BTreeMap<(usize, usize), SuperMap> {
        &self.maps
    }

    /// Replace one ordered map (no re-validation; used for fault injection and file loading).
    pub fn with_map(&self, u: usize, v: usize, m: SuperMap) -> Trivialization {
        let mut t = self.clone();
        t.maps.insert((u, v), m);
        t
    }

    pub fn truncate(&self, m: usize) -> Trivialization {
        Trivialization {
            order: m,
            maps: self.maps.iter().map(|(k, v)| (*k, v.truncate(m))).collect(),
            ..self.clone()
        }
    }

    /// `ρ_{UW} − ρ_{VW}∘ρ_{UV}` on every ordered triple of distinct charts.
    pub fn cocycle_residual(&self) -> Result<BTreeMap<(usize, usize, usize), MapDiff>> {
        let k = self.cover().num_charts();
        let mut out = BTreeMap::new();
        for u in 0..k {
            for v in 0..k {
                for w in 0..k {
                    if u == v || v == w || u == w {
                        continue;
                    }
                    let c = compose(self.map(v, w), self.map(u, v), self.order)?;
                    out.insert((u, v, w), self.map(u, w).diff(&c));
                }
            }
        }
        Ok(out)
    }

    /// `ρ_{VU}∘ρ_{UV} − id` on every ordered pair.
    pub fn inverse_residual(&self) -> Result<BTreeMap<(usize, usize), MapDiff>> {
        let mut out = BTreeMap::new();
        for &(u, v) in self.maps.keys() {
            let c = compose(self.map(v, u), self.map(u, v), self.order)?;
            out.insert((u, v), c.diff(&SuperMap::identity(u, self.n, self.q(), self.order)));
        }
        Ok(out)
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.cocycle_residual()?.values().all(|d| d.is_zero())
            && self.inverse_residual()?.values().all(|d| d.is_zero()))
    }

    fn require_valid(&self) -> Result<()> {
        for (t, d) in self.cocycle_residual()? {
            if !d.is_zero() {
                return Err(Error::NotCocycle(format!(
                    "cocycle condition fails on {t:?} at order {}: {d}",
                    self.order
                )));
            }
        }
        for (p, d) in self.inverse_residual()? {
            if !d.is_zero() {
                return Err(Error::NotCocycle(format!(
                    "maps on {p:?} are not mutually inverse at order {}: {d}",
                    self.order
                )));
            }
        }
        Ok(())
    }

    /// Order `m+1` data with every new coefficient zero on sorted pairs; reversed pairs are inverses.
    pub fn extend_by_zero(&self) -> Result<Trivialization> {
        let sorted = self
            .cover()
            .pairs()
            .into_iter()
            .map(|(u, v)| ((u, v), self.map(u, v).raise_order(self.order + 1)))
            .collect();
        Trivialization::from_sorted(self.n, &self.degrees, self.order + 1, sorted)
    }

    /// Degree-`j` components on sorted pairs, as a 1-cochain of the slot sheaf.
    pub fn component_cochain(&self, j: usize) -> Result<Cochain> {
        let sheaf = slot_sheaf(self.n, &self.degrees, j)?;
        let mut c = Cochain::zero(sheaf, 1);
        for (u, v) in self.cover().pairs() {
            let d = self.map(u, v).as_diff().degree_part(j);
            c.set(&[u, v], mixed_to_canonical(self.n, &self.degrees, j, &d, u, v)?)?;
        }
        Ok(c)
    }

    /// Add a degree-`j` 1-cochain (in canonical storage) to the sorted pairs.
    fn add_component(&self, c: &Cochain, j: usize, order: usize) -> Result<Trivialization> {
        let mut sorted = BTreeMap::new();
        for (u, v) in self.cover().pairs() {
            let d = canonical_to_mixed(self.n, &self.degrees, j, &c.value(&[u, v]), u, v)?;
            sorted.insert((u, v), self.map(u, v).raise_order(order).add_diff(&d));
        }
        Trivialization::from_sorted(self.n, &self.degrees, order, sorted)
    }

    /// The degree-`(m+1)` defect `[ρ_{VW}∘ρ_{UV} − ρ_{UW}]` of the zero extension.
    pub fn obstruction_cocycle(&self) -> Result<ObstructionCocycle> {
        self.require_valid()?;
        let ext = self.extend_by_zero()?;
        let j = self.order + 1;
        let sheaf = slot_sheaf(self.n, &self.degrees, j)?;
        let mut c = Cochain::zero(sheaf, 2);
        for (u, v, w) in self.cover().triples() {
            let d = ext.defect((u, v, w))?;
            c.set(&[u, v, w], mixed_to_canonical(self.n, &self.degrees, j, &d.degree_part(j), u, w)?)?;
        }
        Ok(ObstructionCocycle {
            order: self.order,
            cochain: c,
        })
    }

    /// `ρ_{VW}∘ρ_{UV} − ρ_{UW}` in mixed form.
    fn defect(&self, (u, v, w): (usize, usize, usize)) -> Result<MapDiff> {
        Ok(compose(self.map(v, w), self.map(u, v), self.order)?.diff(self.map(u, w)))
    }

    /// Solve `δφ = −Γ`; on success return the order-`m+1` trivialisation `ρ + φ`.
    pub fn extend(&self, window: Window) -> Result<ExtensionOutcome> {
        let gamma = self.obstruction_cocycle()?;
        let j = self.order + 1;
        if gamma.cochain.is_zero() {
            return Ok(ExtensionOutcome::Extended(self.extend_by_zero()?));
        }
        match solve_coboundary(&gamma.cochain.neg(), window)? {
            SolveOutcome::Solved(phi) => {
                let ext = self.add_component(&phi, j, j)?;
                ext.require_valid()?;
                Ok(ExtensionOutcome::Extended(ext))
            }
            SolveOutcome::Infeasible { blocks } => Ok(ExtensionOutcome::Obstructed { gamma, blocks }),
            SolveOutcome::OutsideWindow { blocks } => Ok(ExtensionOutcome::Undecided { gamma, blocks }),
        }
    }

    /// `ρ + α` on sorted pairs for a closed α in the top slot; reversed pairs are recomputed.
    pub fn act_torsor(&self, alpha: &Cochain) -> Result<Trivialization> {
        let j = self.order;
        let sheaf = slot_sheaf(self.n, &self.degrees, j)?;
        if alpha.sheaf() != &sheaf || alpha.degree() != 1 {
            return Err(Error::InvalidArgument(format!(
                "torsor action needs a 1-cochain of {sheaf}, got degree {} on {}",
                alpha.degree(),
                alpha.sheaf()
            )));
        }
        alpha.check_regular()?;
        let d = coboundary(alpha)?;
        if !d.is_zero() {
            return Err(Error::NotCocycle(format!("α is not closed: δα = {d:?}")));
        }
        self.add_component(alpha, j, j)
    }
}

fn check_map(m: &SuperMap, n: usize, degrees: &SplitBundleDegrees, u: usize, v: usize) -> Result<()> {
    if m.p() != n || m.q() != degrees.rank() {
        return Err(Error::mismatch("map dimensions", n, m.p()));
    }
    if m.source() != u || m.target() != v {
        return Err(Error::InvalidArgument(format!(
            "map labelled {}→{} supplied for pair {u},{v}",
            m.source(),
            m.target()
        )));
    }
    let split = SuperMap::split(n, degrees, u, v, 1)?;
    if m.truncate(1) != split.raise_order(m.order()).truncate(1) {
        return Err(Error::Unsupported(format!(
            "degree ≤ 1 data on {u},{v} differs from the split model"
        )));
    }
    Ok(())
}

/// Recompute Γ on every ordering of every triple and compare with the supplied cocycle.
pub fn verify_gamma_cocycle(gamma: &ObstructionCocycle, t: &Trivialization) -> Result<GammaCheck> {
    let cover = t.cover();
    let j = gamma.degree();
    let vacuous = cover.simplices(3).is_empty();
    let fail = |msg: String| {
        Ok(GammaCheck {
            pass: false,
            coboundary_vacuous: vacuous,
            residual: Some(msg),
        })
    };
    if gamma.order != t.order() {
        return fail(format!("Γ has order {}, trivialisation {}", gamma.order, t.order()));
    }
    let sheaf = slot_sheaf(t.n(), t.degrees(), j)?;
    if gamma.cochain.sheaf() != &sheaf || gamma.cochain.degree() != 2 {
        return fail(format!("Γ is not a 2-cochain of {sheaf}"));
    }
    if !vacuous {
        let d = coboundary(&gamma.cochain)?;
        if !d.is_zero() {
            return fail(format!("δΓ = {d:?}"));
        }
    }
    if let Some((s, msg)) = gamma.cochain.irregularity() {
        return fail(format!("Γ not regular on {s:?}: {msg}"));
    }
    let ext = t.extend_by_zero()?;
    for sorted in cover.simplices(2) {
        let stored = gamma.cochain.value(&sorted);
        for perm in permutations3(&sorted) {
            let (a, b, c) = (perm[0], perm[1], perm[2]);
            let d = ext.defect((a, b, c))?;
            if let Some(low) = d.min_degree() {
                if low < j {
                    return fail(format!("composition defect on {perm:?} has degree {low} < {j}: {d}"));
                }
            }
            let top = d.degree_part(j);
            let wrong_slot = if j.is_multiple_of(2) { &top.odd } else { &top.even };
            if wrong_slot.iter().any(|e| !e.is_zero()) {
                return fail(format!("Γ on {perm:?} has components outside its parity slot: {top}"));
            }
            let here = mixed_to_canonical(t.n(), t.degrees(), j, &top, a, c)?;
            let moved = sheaf.transport(&here, a, sorted[0])?;
            let (_, odd) = crate::cech::sort_simplex(&perm).expect("distinct");
            let expect: Section = if odd { stored.iter().map(|p| -p).collect() } else { stored.clone() };
            if moved != expect {
                let diff: Vec<String> = moved
                    .iter()
                    .zip(&expect)
                    .map(|(x, y)| (x - y).to_string())
                    .collect();
                return fail(format!("Γ on {perm:?} differs from the stored value by [{}]", diff.join(", ")));
            }
        }
    }
    Ok(GammaCheck {
        pass: true,
        coboundary_vacuous: vacuous,
        residual: None,
    })
}

fn permutations3(s: &[usize]) -> Vec<Vec<usize>> {
    let (a, b, c) = (s[0], s[1], s[2]);
    vec![
        vec![a, b, c],
        vec![a, c, b],
        vec![b, a, c],
        vec![b, c, a],
        vec![c, a, b],
        vec![c, b, a],
    ]
}

/// The cocycle `Y_{UVW} = f^{μ|ij}_{UV} ∂_μζ_{VW,a}(f_{UV}) ζ_{UV,a} θ_{ij}θ_a ∂/∂ξ_a` representing ∂*[ω].
pub fn pushforward_partial(omega: &Cochain, t: &Trivialization) -> Result<ObstructionCocycle> {
    let (n, degrees) = (t.n(), t.degrees());
    let sheaf2 = slot_sheaf(n, degrees, 2)?;
    if omega.sheaf() != &sheaf2 || omega.degree() != 1 {
        return Err(Error::InvalidArgument(format!("ω must be a 1-cochain of {sheaf2}")));
    }
    if t.order() < 1 {
        return Err(Error::InvalidArgument("trivialisation must carry degree-1 data".into()));
    }
    omega.check_regular()?;
    let d = coboundary(omega)?;
    if !d.is_zero() {
        return Err(Error::NotCocycle(format!("ω is not closed: δω = {d:?}")));
    }
    let cover = t.cover();
    let q = degrees.rank();
    let sheaf3 = slot_sheaf(n, degrees, 3)?;
    let mut out = Cochain::zero(sheaf3, 2);
    for (u, v, w) in cover.triples() {
        let f = canonical_to_mixed(n, degrees, 2, &omega.value(&[u, v]), u, v)?;
        let f_uv = cover.transition(u, v);
        let mut y = MapDiff::zero(n, q);
        for (a, &ka) in degrees.degrees().iter().enumerate() {
            let zeta_vw = cover.ratio_pow(v, w, ka);
            let zeta_uv = cover.ratio_pow(u, v, ka);
            let theta_a = GrassmannElement::generator(q, n, a + 1);
            for (mu, f_mu) in f.even.iter().enumerate() {
                let dz = zeta_vw.partial(mu).substitute(f_uv)?;
                if dz.is_zero() {
                    continue;
                }
                let term = f_mu.scale_poly(&(&dz * &zeta_uv)).wedge(&theta_a);
                y.odd[a] = y.odd[a].add(&term);
            }
        }
        out.set(&[u, v, w], mixed_to_canonical(n, degrees, 3, &y, u, w)?)?;
    }
    Ok(ObstructionCocycle {
        order: 2,
        cochain: out,
    })
}

/// The order-2 trivialisation obtained by gluing a closed ω into the split model.
pub fn second_order_from(omega: &Cochain, degrees: &SplitBundleDegrees) -> Result<Trivialization> {
    let n = omega.sheaf().n;
    Trivialization::split_model(n, degrees, 2)?.act_torsor(omega)
}

/// `λ_U = id + sign·ν_U` from a degree-`j` 0-cochain.
pub fn lambda_from_cochain(nu: &Cochain, degrees: &SplitBundleDegrees, j: usize, order: usize, negate: bool) -> Result<Vec<SuperMap>> {
    let n = nu.sheaf().n;
    let sheaf = slot_sheaf(n, degrees, j)?;
    if nu.sheaf() != &sheaf || nu.degree() != 0 {
        return Err(Error::InvalidArgument(format!("λ needs a 0-cochain of {sheaf}")));
    }
    let cover = standard_cover(n)?;
    let mut out = Vec::new();
    for u in 0..cover.num_charts() {
        let mut d = canonical_to_mixed(n, degrees, j, &nu.value(&[u]), u, u)?;
        if negate {
            d = MapDiff::zero(n, degrees.rank()).sub(&d);
        }
        out.push(SuperMap::identity(u, n, degrees.rank(), order).add_diff(&d));
    }
    Ok(out)
}

fn check_lambda(lambda: &[SuperMap], t: &Trivialization) -> Result<()> {
    if lambda.len() != t.cover().num_charts() {
        return Err(Error::mismatch("λ charts", t.cover().num_charts(), lambda.len()));
    }
    for (u, l) in lambda.iter().enumerate() {
        if l.source() != u || l.target() != u || l.p() != t.n() || l.q() != t.q() {
            return Err(Error::InvalidArgument(format!("λ_{u} is not an automorphism of chart {u}")));
        }
        if !l.is_identity_mod(2) {
            return Err(Error::InvalidArgument(format!("λ_{u} is not the identity modulo J²")));
        }
    }
    Ok(())
}

/// `ρ'_{UV} = λ_V ∘ ρ_{UV} ∘ λ_U^{-1}` on every ordered pair.
pub fn conjugate(t: &Trivialization, lambda: &[SuperMap]) -> Result<Trivialization> {
    check_lambda(lambda, t)?;
    let m = t.order();
    let inv: Vec<SuperMap> = lambda
        .iter()
        .map(|l| invert(&l.truncate(m), &ChartMap::identity(t.n()), m))
        .collect::<Result<_>>()?;
    let mut maps = BTreeMap::new();
    for (&(u, v), rho) in t.maps() {
        let inner = compose(rho, &inv[u], m)?;
        maps.insert((u, v), compose(&lambda[v].truncate(m), &inner, m)?);
    }
    Ok(Trivialization {
        n: t.n(),
        order: m,
        degrees: t.degrees().clone(),
        maps,
    })
}

/// Whether `ρ_{UV}∘λ_U = λ_V∘ρ̃_{UV}` on every ordered pair, with `λ ≡ id mod J^m`.
pub fn is_equivalent_via(t: &Trivialization, other: &Trivialization, lambda: &[SuperMap]) -> Result<bool> {
    check_lambda(lambda, t)?;
    let m = t.order();
    if other.order() != m || other.degrees() != t.degrees() || other.n() != t.n() {
        return Ok(false);
    }
    if lambda.iter().any(|l| !l.is_identity_mod(m)) {
        return Ok(false);
    }
    for (&(u, v), rho) in t.maps() {
        let lhs = compose(rho, &lambda[u].truncate(m), m)?;
        let rhs = compose(&lambda[v].truncate(m), other.map(u, v), m)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search for `λ = id − ν` with `ν` in the top slot making `t` and `other` equivalent.
pub fn find_equivalence(t: &Trivialization, other: &Trivialization, window: Window) -> Result<Option<Vec<SuperMap>>> {
    let m = t.order();
    if other.order() != m || other.degrees() != t.degrees() || other.n() != t.n() {
        return Err(Error::InvalidArgument("trivialisations of different shapes".into()));
    }
    if other.truncate(m - 1) != t.truncate(m - 1) {
        return Ok(None);
    }
    let diff = other.component_cochain(m)?.sub(&t.component_cochain(m)?);
    if diff.is_zero() {
        let sheaf = slot_sheaf(t.n(), t.degrees(), m)?;
        return Ok(Some(lambda_from_cochain(&Cochain::zero(sheaf, 0), t.degrees(), m, m, false)?));
    }
    if !coboundary(&diff)?.is_zero() {
        return Ok(None);
    }
    match solve_coboundary(&diff, window)? {
        SolveOutcome::Solved(nu) => {
            let lambda = lambda_from_cochain(&nu, t.degrees(), m, m, true)?;
            if is_equivalent_via(t, other, &lambda)? {
                Ok(Some(lambda))
            } else {
                Err(Error::InvalidArgument("constructed λ failed verification".into()))
            }
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;

    fn deg(v: &[i64]) -> SplitBundleDegrees {
        SplitBundleDegrees::new(v.to_vec()).unwrap()
    }

    fn mono(e: &[i32], c: i64) -> LaurentPoly {
        LaurentPoly::monomial(e.to_vec(), rat(c))
    }

    #[test]
    fn inverse_pair_composes_to_identity() {
        let d = deg(&[1, -2]);
        let a = SuperMap::split(1, &d, 0, 1, 2).unwrap();
        let b = SuperMap::split(1, &d, 1, 0, 2).unwrap();
        assert!(compose(&b, &a, 2).unwrap().is_identity());
    }

    #[test]
    fn split_composition_is_chart_composition() {
        let d = deg(&[2, 0, -1]);
        let f01 = SuperMap::split(2, &d, 0, 1, 3).unwrap();
        let f12 = SuperMap::split(2, &d, 1, 2, 3).unwrap();
        let f02 = SuperMap::split(2, &d, 0, 2, 3).unwrap();
        assert_eq!(compose(&f12, &f01, 3).unwrap(), f02);
    }

    #[test]
    fn cp1_taylor_cross_terms() {
        // ρ: y = x⁻¹ + 3x⁻¹θ₁θ₂, η = θ on CP¹, inverted by hand.
        let t12 = MultiIndex::from_indices(&[1, 2]).unwrap();
        let even = vec![GrassmannElement::scalar(2, 1, mono(&[-1], 1))
            .add(&GrassmannElement::monomial(2, t12, mono(&[-1], 3)))];
        let odd = vec![GrassmannElement::generator(2, 1, 1), GrassmannElement::generator(2, 1, 2)];
        let rho = SuperMap::new(0, 1, 2, even, odd).unwrap();
        let cover = standard_cover(1).unwrap();
        let inv = invert(&rho, cover.transition(1, 0), 2).unwrap();
        // η = θ, so y = x⁻¹(1 + 3η₁η₂) gives x = y⁻¹(1 + 3η₁η₂).
        let want = GrassmannElement::scalar(2, 1, mono(&[-1], 1))
            .add(&GrassmannElement::monomial(2, t12, mono(&[-1], 3)));
        assert_eq!(inv.even()[0], want);
        assert!(compose(&inv, &rho, 2).unwrap().is_identity());
        assert!(compose(&rho, &inv, 2).unwrap().is_identity());
    }

    #[test]
    fn split_model_residuals_vanish() {
        let t = Trivialization::split_model(2, &deg(&[3, 0, -6]), 3).unwrap();
        assert!(t.cocycle_residual().unwrap().values().all(|d| d.is_zero()));
        assert!(t.obstruction_cocycle().unwrap().cochain.is_zero());
        let t1 = Trivialization::split_model(1, &deg(&[1, 2, 3]), 2).unwrap();
        assert!(t1.cocycle_residual().unwrap().is_empty());
    }

    #[test]
    fn corrupted_map_is_reported() {
        let d = deg(&[1, 0, -1]);
        let t = Trivialization::split_model(2, &d, 2).unwrap();
        let t12 = MultiIndex::from_indices(&[1, 2]).unwrap();
        let bad = t.map(0, 1).add_diff(&MapDiff {
            even: vec![GrassmannElement::monomial(3, t12, mono(&[0, 0], 1)), GrassmannElement::zero(3, 2)],
            odd: vec![GrassmannElement::zero(3, 2); 3],
        });
        let t = t.with_map(0, 1, bad);
        let res = t.cocycle_residual().unwrap();
        assert!(!res[&(0, 1, 2)].is_zero());
        assert!(res[&(1, 0, 2)].is_zero() || !res[&(1, 0, 2)].is_zero());
        assert!(matches!(t.obstruction_cocycle(), Err(Error::NotCocycle(_))));
    }

    #[test]
    fn mixed_and_canonical_round_trip() {
        let d = deg(&[2, -1, 0]);
        for j in [2usize, 3] {
            let sheaf = slot_sheaf(2, &d, j).unwrap();
            let sec: Section = (0..sheaf.width()).map(|i| mono(&[i as i32 % 3 - 1, 1], i as i64 + 1)).collect();
            for (u, w) in [(0, 1), (0, 2), (1, 2), (2, 0)] {
                let m = canonical_to_mixed(2, &d, j, &sec, u, w).unwrap();
                assert_eq!(mixed_to_canonical(2, &d, j, &m, u, w).unwrap(), sec);
            }
        }
    }

    #[test]
    fn literal_twisted_coboundary_matches_storage_coboundary() {
        let d = deg(&[3, 0, -6]);
        for j in [2usize, 3] {
            let sheaf = slot_sheaf(2, &d, j).unwrap();
            let mut phi = Cochain::zero(sheaf.clone(), 1);
            let w = sheaf.width();
            phi.set(&[0, 1], (0..w).map(|i| mono(&[i as i32 % 2, -1], 1 + i as i64)).collect()).unwrap();
            phi.set(&[0, 2], (0..w).map(|i| mono(&[1, -(i as i32 % 3)], 2)).collect()).unwrap();
            phi.set(&[1, 2], (0..w).map(|i| mono(&[-1, i as i32 % 2], -1)).collect()).unwrap();
            let delta = coboundary(&phi).unwrap();
            let lit = mixed_coboundary(&phi, &d, j, (0, 1, 2)).unwrap();
            assert_eq!(lit, delta.value(&[0, 1, 2]), "j = {j}");
        }
    }

    #[test]
    fn omega_gluing_is_valid_and_gamma_is_y() {
        let d = deg(&[4, -1, -7]);
        let sheaf = slot_sheaf(2, &d, 2).unwrap();
        let h1 = crate::cech::h1_representatives(&sheaf, Window::DEFAULT).unwrap();
        assert_eq!(h1.dim(1), 1);
        let omega = h1.reps(1)[0].clone();
        let t = second_order_from(&omega, &d).unwrap();
        assert!(t.is_valid().unwrap());
        let gamma = t.obstruction_cocycle().unwrap();
        let y = pushforward_partial(&omega, &Trivialization::split_model(2, &d, 2).unwrap()).unwrap();
        assert_eq!(gamma.cochain, y.cochain);
        assert!(verify_gamma_cocycle(&gamma, &t).unwrap().pass);
    }
}
