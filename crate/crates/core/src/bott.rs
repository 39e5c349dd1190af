//! Closed-form cohomology dimensions on CP^n.

use std::fmt;

use crate::error::{Error, Result};

/// `C(a, b)`, zero whenever `a < b` or `b < 0`.
pub fn binomial(a: i64, b: i64) -> u64 {
    if b < 0 || a < b {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BottQuery {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k: i64,
}

impl BottQuery {
    pub fn new(n: usize, p: usize, q: usize, k: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("projective dimension must be positive".into()));
        }
        if p > n || q > n {
            return Err(Error::InvalidArgument(format!(
                "need 0 ≤ p, q ≤ n; got n={n}, p={p}, q={q}"
            )));
        }
        Ok(BottQuery { n, p, q, k })
    }

    pub fn dim(&self) -> u64 {
        bott_dim(self.n, self.p, self.q, self.k)
    }
}

/// `h^q(CP^n, Ω^p(k))`.
pub fn bott_dim(n: usize, p: usize, q: usize, k: i64) -> u64 {
    assert!(p <= n && q <= n, "bott_dim: p = {p}, q = {q} out of range for n = {n}");
    let (n, p) = (n as i64, p as i64);
    if q == 0 && k > p {
        binomial(k + n - p, k) * binomial(k - 1, p)
    } else if k == 0 && p == q as i64 {
        1
    } else if q as i64 == n && k < p - n {
        binomial(-k + p, -k) * binomial(-k - 1, n - p)
    } else {
        0
    }
}

/// `h^i(Ω^p(k))` computed as `h^{n-i}(Ω^{n-p}(-k))`.
pub fn serre_dual_dim(n: usize, p: usize, i: usize, k: i64) -> u64 {
    bott_dim(n, n - p, n - i, -k)
}

/// `h^q(T(s))` via `T ≅ Ω^{n-1}(n+1)` (so `T(s) = O(s+2)` on CP¹, `Ω¹(s+3)` on CP²).
pub fn tangent_dim(n: usize, q: usize, s: i64) -> u64 {
    bott_dim(n, n - 1, q, s + n as i64 + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitBundleDegrees {
    degrees: Vec<i64>,
}

impl SplitBundleDegrees {
    pub fn new(degrees: Vec<i64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidArgument("a bundle needs rank ≥ 1".into()));
        }
        if degrees.len() > 16 {
            return Err(Error::InvalidArgument("rank above 16 is not supported".into()));
        }
        Ok(SplitBundleDegrees { degrees })
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn total(&self) -> i64 {
        self.degrees.iter().sum()
    }

    /// Twists of `∧^m E`, one per ascending `m`-subset, in lexicographic order.
    pub fn wedge_twists(&self, m: usize) -> Vec<(Vec<usize>, i64)> {
        let r = self.rank();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, d: &[i64], out: &mut Vec<(Vec<usize>, i64)>) {
            if left == 0 {
                let s = cur.iter().map(|&a| d[a - 1]).sum();
                out.push((cur.clone(), s));
                return;
            }
            for a in start..=r {
                cur.push(a);
                rec(a + 1, r, left - 1, cur, d, out);
                cur.pop();
            }
        }
        rec(1, r, m, &mut cur, &self.degrees, &mut out);
        out
    }
}

impl fmt::Display for SplitBundleDegrees {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.degrees.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitTarget {
    /// `T ⊗ ∧^m E`.
    TangentWedge(usize),
    /// `∧^m E ⊗ E^∨`.
    WedgeDual(usize),
    /// `E^∨(k)`.
    DualTwist(i64),
}

impl fmt::Display for SplitTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitTarget::TangentWedge(m) => write!(f, "T⊗∧^{m}E"),
            SplitTarget::WedgeDual(m) => write!(f, "∧^{m}E⊗E^∨"),
            SplitTarget::DualTwist(k) => write!(f, "E^∨({k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummandKind {
    Line,
    Tangent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub label: String,
    pub kind: SummandKind,
    pub twist: i64,
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimBreakdown {
    pub total: u64,
    pub summands: Vec<Summand>,
}

impl DimBreakdown {
    /// Line-bundle twists of the summands, for multiset comparisons.
    pub fn twists(&self) -> Vec<i64> {
        self.summands.iter().map(|s| s.twist).collect()
    }
}

/// `h^q` of a sheaf built from a split bundle, summed over its line-bundle pieces.
pub fn split_sheaf_dims(n: usize, e: &SplitBundleDegrees, target: SplitTarget, q: usize) -> Result<DimBreakdown> {
    if !(1..=2).contains(&n) {
        return Err(Error::Unsupported(format!("CP{n}")));
    }
    if q > n {
        return Err(Error::InvalidArgument(format!("degree {q} exceeds dimension {n}")));
    }
    let mut summands = Vec::new();
    match target {
        SplitTarget::TangentWedge(m) => {
            for (idx, s) in e.wedge_twists(m) {
                summands.push(Summand {
                    label: format!("T({s})[θ{}]", join(&idx)),
                    kind: SummandKind::Tangent,
                    twist: s,
                    dim: tangent_dim(n, q, s),
                });
            }
        }
        SplitTarget::WedgeDual(m) => {
            for (idx, s) in e.wedge_twists(m) {
                for (a, ka) in e.degrees().iter().enumerate() {
                    let t = s - ka;
                    summands.push(Summand {
                        label: format!("O({t})[θ{}∂{}]", join(&idx), a + 1),
                        kind: SummandKind::Line,
                        twist: t,
                        dim: bott_dim(n, 0, q, t),
                    });
                }
            }
        }
        SplitTarget::DualTwist(k) => {
            for (a, ka) in e.degrees().iter().enumerate() {
                let t = k - ka;
                summands.push(Summand {
                    label: format!("O({t})[∂{}]", a + 1),
                    kind: SummandKind::Line,
                    twist: t,
                    dim: bott_dim(n, 0, q, t),
                });
            }
        }
    }
    Ok(DimBreakdown {
        total: summands.iter().map(|s| s.dim).sum(),
        summands,
    })
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("")
}

/// Bounds `[lower, upper]` on `h^q` of the middle term of `0 → ∧^{k+1}E⊗E^∨ → 𝔗[k] → T⊗∧^kE → 0`.
pub fn filtered_tangent_dims(n: usize, e: &SplitBundleDegrees, k: i64, q: usize) -> Result<(u64, u64)> {
    if k < -1 || k > e.rank() as i64 {
        return Err(Error::InvalidArgument(format!(
            "level {k} outside [-1, {}]",
            e.rank()
        )));
    }
    let sub = |d: i64| -> Result<u64> {
        if d < 0 || d > n as i64 || k + 1 < 0 {
            return Ok(0);
        }
        Ok(split_sheaf_dims(n, e, SplitTarget::WedgeDual((k + 1) as usize), d as usize)?.total)
    };
    let quot = |d: i64| -> Result<u64> {
        if d < 0 || d > n as i64 || k < 0 {
            return Ok(0);
        }
        Ok(split_sheaf_dims(n, e, SplitTarget::TangentWedge(k as usize), d as usize)?.total)
    };
    let q = q as i64;
    let (s, t) = (sub(q)?, quot(q)?);
    let lower = s.saturating_sub(quot(q - 1)?) + t.saturating_sub(sub(q + 1)?);
    Ok((lower, s + t))
}

/// The three nonvanishing rules on CP² in their stated iff form, and as Bott + Serre give them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `h⁰(T(l)) ≠ 0`.
    H0Tangent,
    /// `h¹(T(l)) ≠ 0`.
    H1Tangent,
    /// `h²(O(l)) ≠ 0`.
    H2Line,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::H0Tangent, Rule::H1Tangent, Rule::H2Line];

    pub fn name(self) -> &'static str {
        match self {
            Rule::H0Tangent => "h0(T(l))",
            Rule::H1Tangent => "h1(T(l))",
            Rule::H2Line => "h2(O(l))",
        }
    }

    /// The literal statement: `l > 2`, `l = −3`, `l < −3`.
    pub fn literal(self, l: i64) -> bool {
        match self {
            Rule::H0Tangent => l > 2,
            Rule::H1Tangent => l == -3,
            Rule::H2Line => l < -3,
        }
    }

    pub fn dim(self, l: i64) -> u64 {
        match self {
            Rule::H0Tangent => tangent_dim(2, 0, l),
            Rule::H1Tangent => tangent_dim(2, 1, l),
            Rule::H2Line => bott_dim(2, 0, 2, l),
        }
    }

    pub fn direct(self, l: i64) -> bool {
        self.dim(l) != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleRow {
    pub rule: Rule,
    pub l: i64,
    pub literal: bool,
    pub direct: bool,
    pub dim: u64,
}

/// Every `l` in `[lo, hi]` where the literal rule and the computed dimension disagree.
pub fn rule_discrepancies(lo: i64, hi: i64) -> Vec<RuleRow> {
    let mut out = Vec::new();
    for rule in Rule::ALL {
        for l in lo..=hi {
            let row = RuleRow {
                rule,
                l,
                literal: rule.literal(l),
                direct: rule.direct(l),
                dim: rule.dim(l),
            };
            if row.literal != row.direct {
                out.push(row);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(3, -1), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(-1, 0), 0);
    }

    #[test]
    fn bott_examples() {
        assert_eq!(bott_dim(2, 1, 1, 0), 1);
        assert_eq!(bott_dim(2, 0, 0, 1), 3);
        assert_eq!(bott_dim(2, 0, 2, -4), 3);
    }

    #[test]
    fn serre_examples() {
        assert_eq!(serre_dual_dim(2, 0, 2, -3), 1);
        assert_eq!(serre_dual_dim(2, 0, 2, -3), bott_dim(2, 0, 2, -3));
        assert_eq!(tangent_dim(2, 1, -3), 1);
        assert_eq!(bott_dim(2, 1, 1, 0), 1);
        assert_eq!(tangent_dim(2, 0, 0), 8);
        assert_eq!(bott_dim(2, 1, 0, 3), 8);
    }

    #[test]
    fn serre_agrees_with_direct_for_all_forms() {
        for n in 1..=2usize {
            for p in 0..=n {
                for i in 0..=n {
                    for k in -9..=9 {
                        assert_eq!(serre_dual_dim(n, p, i, k), bott_dim(n, p, i, k), "n={n} p={p} i={i} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_count_for_global_sections() {
        // h⁰(O(k)) on CP² counts degree-k monomials in three variables.
        for k in 0..8i64 {
            let mut count = 0;
            for a in 0..=k {
                for b in 0..=k - a {
                    let _ = b;
                    count += 1;
                }
            }
            assert_eq!(bott_dim(2, 0, 0, k), count);
        }
    }

    #[test]
    fn split_examples() {
        let e = SplitBundleDegrees::new(vec![3, 0, -6]).unwrap();
        let h1 = split_sheaf_dims(2, &e, SplitTarget::TangentWedge(2), 1).unwrap();
        assert_eq!(h1.total, 1);
        assert_eq!(h1.summands.iter().filter(|s| s.dim > 0).map(|s| s.twist).collect::<Vec<_>>(), vec![-3]);
        let h2 = split_sheaf_dims(2, &e, SplitTarget::WedgeDual(3), 2).unwrap();
        assert_eq!(h2.total, 11);
        assert_eq!(h2.summands.iter().map(|s| s.dim).collect::<Vec<_>>(), vec![10, 1, 0]);
        let z = SplitBundleDegrees::new(vec![0, 0, 0]).unwrap();
        assert_eq!(split_sheaf_dims(2, &z, SplitTarget::TangentWedge(2), 1).unwrap().total, 0);
        assert_eq!(split_sheaf_dims(2, &e, SplitTarget::WedgeDual(4), 2).unwrap().total, 0);
    }

    #[test]
    fn filtered_bounds() {
        let z = SplitBundleDegrees::new(vec![0, 0, 0]).unwrap();
        assert_eq!(filtered_tangent_dims(2, &z, 2, 1).unwrap(), (0, 0));
        let e = SplitBundleDegrees::new(vec![3, 0, -6]).unwrap();
        let sub1 = split_sheaf_dims(2, &e, SplitTarget::WedgeDual(3), 1).unwrap().total;
        assert_eq!(sub1, 0);
        let (lo, hi) = filtered_tangent_dims(2, &e, 2, 1).unwrap();
        assert!(lo <= hi);
        assert_eq!(hi, 1);
        // k = rank: the sub-sheaf ∧^{rank+1}E⊗E^∨ vanishes, so the bound is exact.
        let (lo, hi) = filtered_tangent_dims(2, &e, 3, 1).unwrap();
        assert_eq!(lo, hi);
        assert_eq!(hi, split_sheaf_dims(2, &e, SplitTarget::TangentWedge(3), 1).unwrap().total);
    }

    #[test]
    fn documented_rule_discrepancies() {
        let rows = rule_discrepancies(-8, 8);
        assert!(rows.iter().any(|r| r.rule == Rule::H0Tangent && r.l == 0 && r.dim == 8));
        assert!(rows.iter().any(|r| r.rule == Rule::H2Line && r.l == -3 && r.dim == 1));
        assert!(!rows.iter().any(|r| r.rule == Rule::H1Tangent));
    }
}
