//! Existence conditions for obstructed second-order thickenings of CP² with rank-3 split bundles.
//!
//! Three conditions are evaluated side by side: the literal nonvanishing rules
//! applied to the pair sums of `∧²E`, and the dimensions themselves computed by
//! Bott and Serre duality. [`pipeline_obstructed_cp2`] then decides the question
//! outright for one bundle by computing `∂*` on `H¹(T⊗∧²E)`.

use std::fmt;

use crate::bott::{bott_dim, split_sheaf_dims, Rule, SplitBundleDegrees, SplitTarget};
use crate::cech::{class_coordinates, cohomology, h1_representatives, Window};
use crate::error::{Error, Result};
use crate::laurent::Rational;
use crate::supermap::{pushforward_partial, second_order_from, slot_sheaf, ExtensionOutcome, Trivialization};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witnessed {
    pub holds: bool,
    pub witness: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma71Report {
    pub degrees: SplitBundleDegrees,
    /// Literal rules on pair sums: some sum `= −3`, some sum `> 2`, some sum `< −3`.
    pub literal: [bool; 3],
    /// `h¹(T⊗∧²E)`, `h²(T⊗∧²E)`, `h²(E^∨(k))`.
    pub direct: [Witnessed; 3],
    /// `k₁+k₂ > 2`, `k₁+k₃ = −3`, `k₂+k₃ < −3` for this ordering.
    pub eq74: bool,
    pub flags: Vec<String>,
}

impl Lemma71Report {
    pub fn all_direct(&self) -> bool {
        self.direct.iter().all(|w| w.holds)
    }

    pub fn all_literal(&self) -> bool {
        self.literal.iter().all(|&b| b)
    }

    /// The same bundle with its degrees sorted descending.
    pub fn canonical(&self) -> Vec<i64> {
        let mut d = self.degrees.degrees().to_vec();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

impl fmt::Display for Lemma71Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E = {}:", self.degrees)?;
        for i in 0..3 {
            write!(
                f,
                " c{}[literal {} | direct {} ({})]",
                i + 1,
                self.literal[i],
                self.direct[i].holds,
                self.direct[i].witness
            )?;
        }
        write!(f, " eq74 {}", self.eq74)
    }
}

pub fn check_lemma71(degrees: &SplitBundleDegrees) -> Result<Lemma71Report> {
    if degrees.rank() != 3 {
        return Err(Error::InvalidArgument(format!(
            "the three conditions are for rank 3, got rank {}",
            degrees.rank()
        )));
    }
    let k = degrees.degrees();
    let sums: Vec<i64> = degrees.wedge_twists(2).into_iter().map(|(_, s)| s).collect();
    let literal = [
        sums.iter().any(|&s| Rule::H1Tangent.literal(s)),
        sums.iter().any(|&s| Rule::H0Tangent.literal(s)),
        sums.iter().any(|&s| Rule::H2Line.literal(s)),
    ];
    let h1 = split_sheaf_dims(2, degrees, SplitTarget::TangentWedge(2), 1)?;
    let h2 = split_sheaf_dims(2, degrees, SplitTarget::TangentWedge(2), 2)?;
    let h2d = split_sheaf_dims(2, degrees, SplitTarget::DualTwist(degrees.total()), 2)?;

    let mut a = h2d.twists();
    let mut b = degrees.wedge_twists(2).into_iter().map(|(_, s)| s).collect::<Vec<_>>();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b, "E^∨(k) and ∧²E must agree in rank 3");

    let w = |t: u64| Witnessed {
        holds: t > 0,
        witness: t,
    };
    let direct = [w(h1.total), w(h2.total), w(h2d.total)];
    let eq74 = k[0] + k[1] > 2 && k[0] + k[2] == -3 && k[1] + k[2] < -3;
    let mut flags = Vec::new();
    let names = ["h1(T⊗∧²E)", "h2(T⊗∧²E)", "h2(E^∨(k))"];
    for i in 0..3 {
        if literal[i] != direct[i].holds {
            flags.push(format!(
                "c{}: literal rule says {}, {} = {}",
                i + 1,
                literal[i],
                names[i],
                direct[i].witness
            ));
        }
    }
    if eq74 {
        for i in 0..3 {
            if !direct[i].holds {
                flags.push(format!("eq74 holds but c{} fails: {} = 0", i + 1, names[i]));
            }
        }
    }
    Ok(Lemma71Report {
        degrees: degrees.clone(),
        literal,
        direct,
        eq74,
        flags,
    })
}

/// Ordered triples in `[lo, hi]³` satisfying the linear constraint system, lexicographically.
pub fn search_split_triples(lo: i64, hi: i64) -> Result<Vec<Lemma71Report>> {
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    let mut out = Vec::new();
    for k1 in lo..=hi {
        for k2 in lo..=hi {
            let k3 = -3 - k1;
            if k3 < lo || k3 > hi || k1 + k2 <= 2 || k2 + k3 >= -3 {
                continue;
            }
            let r = check_lemma71(&SplitBundleDegrees::new(vec![k1, k2, k3])?)?;
            debug_assert!(r.eq74);
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub condition: usize,
    pub statement: String,
    /// Bott dimension bounding the condition's cohomology group from below.
    pub witness: u64,
    pub l_independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdCertificate {
    pub k_prime: i64,
    pub l0: i64,
    pub bounds: Vec<Bound>,
    pub flags: Vec<String>,
}

/// Largest `l₀` such that all three conditions provably hold for `E = F_{k′} ⊕ O(l)` and all `l ≤ l₀`.
///
/// Only `k′ = −3` is handled. The bounds are one-sided: an `l` above `l₀` is
/// "not provable by these bounds", never "false".
pub fn sufficient_l_nonsplit(k_prime: i64) -> Result<ThresholdCertificate> {
    if k_prime != -3 {
        return Err(Error::Unsupported(format!(
            "k' = {k_prime}: only the k' = -3 case of the non-split decomposable family is certified"
        )));
    }
    // Condition 2 needs h⁰(Ω¹(−l)) > 0. h⁰(Ω¹(m)) is nondecreasing in m, so the
    // threshold is the first m where it turns positive.
    let m0 = (-20..=20)
        .find(|&m| bott_dim(2, 1, 0, m) > 0)
        .expect("h0(Ω¹(m)) is positive for large m");
    debug_assert!((m0..m0 + 40).all(|m| bott_dim(2, 1, 0, m) > 0));
    let l0 = -m0;
    let bounds = vec![
        Bound {
            condition: 1,
            statement: "h1(T⊗∧²E) ≥ h1(Ω¹(0))".into(),
            witness: bott_dim(2, 1, 1, 0),
            l_independent: true,
        },
        Bound {
            condition: 2,
            statement: format!("h2(T⊗∧²E) ≥ h0(Ω¹⊗F(-l)) ≥ h0(Ω¹(-l)), positive for -l ≥ {m0}"),
            witness: bott_dim(2, 1, 0, m0),
            l_independent: false,
        },
        Bound {
            condition: 3,
            statement: "h2(E^∨(-3+l)) ≥ h2(O(-3))".into(),
            witness: bott_dim(2, 0, 2, -3),
            l_independent: true,
        },
    ];
    let flags = vec![
        "the O(-3) summand of E^∨(-3+l) has h2 = 1; an equality chain treating it as 0 understates condition 3".into(),
    ];
    Ok(ThresholdCertificate {
        k_prime,
        l0,
        bounds,
        flags,
    })
}

/// Witness for condition 2 at one `l`, if the bound proves it there.
pub fn condition2_bound_at(l: i64) -> Option<u64> {
    let d = bott_dim(2, 1, 0, -l);
    (d > 0).then_some(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `∂*` is nonzero on the listed generator(s): the order-2 thickening built from it is obstructed.
    ObstructedExhibited,
    /// `∂*` vanishes on all of `H¹(T⊗∧²E)`.
    Unobstructed,
    /// CP¹: no triple overlaps.
    VacuouslyUnobstructed,
    /// A windowed stage could not be completed.
    Inconclusive(String),
    /// The direct conditions fail.
    Refused(String),
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ObstructedExhibited => "obstructed thickening exhibited",
            Verdict::Unobstructed => "partial_* vanishes on H1",
            Verdict::VacuouslyUnobstructed => "vacuously unobstructed",
            Verdict::Inconclusive(_) => "inconclusive",
            Verdict::Refused(_) => "refused",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineCertificate {
    pub degrees: SplitBundleDegrees,
    pub verdict: Verdict,
    pub h1_dim: usize,
    pub h2_dim: usize,
    /// Class coordinates of `∂*` of each `H¹` generator in the chosen `H²` basis.
    pub coordinates: Vec<Vec<Rational>>,
    /// Weights (H² basis labels), aligned with each coordinate vector.
    pub basis_labels: Vec<String>,
    /// Whether the explicit formula matched the composition defect of the glued thickening.
    pub gamma_matches_formula: bool,
    /// Whether the extension solver agreed with the class computation.
    pub extension_consistent: bool,
    pub literal_predicts_nonzero: bool,
}

impl PipelineCertificate {
    pub fn agrees_with_prediction(&self) -> Option<bool> {
        match self.verdict {
            Verdict::ObstructedExhibited => Some(self.literal_predicts_nonzero),
            Verdict::Unobstructed => Some(!self.literal_predicts_nonzero),
            _ => None,
        }
    }
}

/// Decide `∂* ≠ 0` on `H¹(T⊗∧²E)` exactly, with class coordinates in `H²(∧³E⊗E^∨)`.
pub fn pipeline_obstructed_cp2(n: usize, degrees: &SplitBundleDegrees, window: Window) -> Result<PipelineCertificate> {
    let blank = |verdict| PipelineCertificate {
        degrees: degrees.clone(),
        verdict,
        h1_dim: 0,
        h2_dim: 0,
        coordinates: Vec::new(),
        basis_labels: Vec::new(),
        gamma_matches_formula: true,
        extension_consistent: true,
        literal_predicts_nonzero: false,
    };
    if degrees.rank() != 3 {
        return Err(Error::InvalidArgument(format!("rank {} bundle; rank 3 expected", degrees.rank())));
    }
    if n == 1 {
        return Ok(blank(Verdict::VacuouslyUnobstructed));
    }
    if n != 2 {
        return Err(Error::Unsupported(format!("CP{n}")));
    }
    let report = check_lemma71(degrees)?;
    if !report.all_direct() {
        let failed: Vec<String> = (0..3)
            .filter(|&i| !report.direct[i].holds)
            .map(|i| format!("c{}", i + 1))
            .collect();
        return Ok(blank(Verdict::Refused(format!("direct conditions fail: {}", failed.join(", ")))));
    }
    let literal_predicts_nonzero = report.all_literal();
    let h1 = match h1_representatives(&slot_sheaf(2, degrees, 2)?, window) {
        Ok(r) => r,
        Err(Error::WindowIncomplete { computed, expected }) => {
            return Ok(PipelineCertificate {
                literal_predicts_nonzero,
                ..blank(Verdict::Inconclusive(format!("H1 stage found {computed} of {expected} classes")))
            })
        }
        Err(e) => return Err(e),
    };
    let target = slot_sheaf(2, degrees, 3)?;
    let h2 = match cohomology(&target, 2, window) {
        Ok(r) => r,
        Err(Error::WindowIncomplete { computed, expected }) => {
            return Ok(PipelineCertificate {
                literal_predicts_nonzero,
                h1_dim: h1.dim(1),
                ..blank(Verdict::Inconclusive(format!("H2 stage found {computed} of {expected} classes")))
            })
        }
        Err(e) => return Err(e),
    };
    let split = Trivialization::split_model(2, degrees, 2)?;
    let mut coordinates = Vec::new();
    let mut gamma_matches_formula = true;
    let mut extension_consistent = true;
    for omega in h1.reps(1) {
        let y = pushforward_partial(omega, &split)?;
        let glued = second_order_from(omega, degrees)?;
        let gamma = glued.obstruction_cocycle()?;
        gamma_matches_formula &= gamma.cochain == y.cochain;
        let coords = class_coordinates(&y.cochain, &h2)?;
        let nonzero = coords.iter().any(|c| *c != Rational::from_integer(0.into()));
        let ext = glued.extend(window)?;
        extension_consistent &= match ext {
            ExtensionOutcome::Extended(_) => !nonzero,
            ExtensionOutcome::Obstructed { .. } => nonzero,
            ExtensionOutcome::Undecided { .. } => false,
        };
        coordinates.push(coords);
    }
    let basis_labels = h2
        .representatives
        .get(&2)
        .map(|v| v.iter().map(|(w, _)| w.to_string()).collect())
        .unwrap_or_default();
    let any_nonzero = coordinates
        .iter()
        .any(|c| c.iter().any(|x| *x != Rational::from_integer(0.into())));
    Ok(PipelineCertificate {
        degrees: degrees.clone(),
        verdict: if any_nonzero {
            Verdict::ObstructedExhibited
        } else {
            Verdict::Unobstructed
        },
        h1_dim: h1.dim(1),
        h2_dim: h2.dim(2),
        coordinates,
        basis_labels,
        gamma_matches_formula,
        extension_consistent,
        literal_predicts_nonzero,
    })
}
