//! Acceptance run: one line per criterion, exit status nonzero on any unexpected result.
//!
//! Criteria with a documented, reproducible failure are listed in `KNOWN_FAILURES`.
//! For those the run checks that the failure happens in exactly the documented way
//! and prints a FAIL line with the reason; anything else is an error.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;
use superthick::bott::{bott_dim, tangent_dim, Rule, SplitBundleDegrees};
use superthick::cech::{
    coboundary, cohomology, h1_representatives, line_bundle_cohomology, solve_coboundary, Cochain, SheafSpec,
    Window,
};
use superthick::exterior::{GrassmannElement, MultiIndex};
use superthick::laurent::{rat, LaurentPoly};
use superthick::obstruct::{
    check_lemma71, condition2_bound_at, pipeline_obstructed_cp2, search_split_triples, sufficient_l_nonsplit, Verdict,
};
use superthick::sample::{
    random_closed_one_cochain, random_degrees, random_exact_one_cochain, random_lambda, random_one_cochain_cp1,
    random_order2, random_poly, random_zero_cochain, rng, H1Cache, SampleRng,
};
use superthick::supermap::{
    conjugate, is_equivalent_via, lambda_from_cochain, pushforward_partial, slot_sheaf, verify_gamma_cocycle,
    ExtensionOutcome, Trivialization,
};

const KNOWN_FAILURES: &[(u32, &str)] = &[(
    7,
    "conjugation by λ ≡ id mod J^m is computed mod J^{m+1}, so ρ' = ρ + δμ in degree m and \
     Γ shifts by the pushforward of δμ: a nonzero coboundary, not zero term by term",
)];

struct Line {
    pass: bool,
    detail: String,
}

type Check = Result<Line, String>;

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        Err(format!("{what} took {e:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn deg(v: &[i64]) -> SplitBundleDegrees {
    SplitBundleDegrees::new(v.to_vec()).unwrap()
}

fn wide(c: &Cochain) -> Window {
    Window::DEFAULT.widened_for(c)
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn c1_bott_oracle() -> Check {
    let t = Instant::now();
    let mut n_checked = 0;
    for n in 1..=2usize {
        for k in -8..=8i64 {
            for q in 0..=n {
                let oracle = line_bundle_cohomology(n, k, q).map_err(e)?.dim(q) as u64;
                ensure(bott_dim(n, 0, q, k) == oracle, || format!("h^{q}(CP{n}, O({k})): bott {} oracle {oracle}", bott_dim(n, 0, q, k)))?;
                n_checked += 1;
            }
        }
    }
    within(t, Duration::from_secs(1), "grid")?;
    Ok(Line {
        pass: true,
        detail: format!("{n_checked} (n,k,q) exact, {:?}", t.elapsed()),
    })
}

fn c2_serre() -> Check {
    let t = Instant::now();
    let mut n_checked = 0;
    for n in 1..=2usize {
        for k in -8..=8i64 {
            for i in 0..=n {
                let dual = -k - n as i64 - 1;
                ensure(bott_dim(n, 0, i, k) == bott_dim(n, 0, n - i, dual), || format!("bott fails duality at n={n} k={k} i={i}"))?;
                let a = line_bundle_cohomology(n, k, i).map_err(e)?.dim(i);
                let b = line_bundle_cohomology(n, dual, n - i).map_err(e)?.dim(n - i);
                ensure(a == b, || format!("oracle fails duality at n={n} k={k} i={i}: {a} vs {b}"))?;
                n_checked += 1;
            }
        }
    }
    within(t, Duration::from_secs(1), "grid")?;
    Ok(Line {
        pass: true,
        detail: format!("{n_checked} pairs exact, {:?}", t.elapsed()),
    })
}

fn c3_rules() -> Check {
    let rows = superthick::bott::rule_discrepancies(-8, 8);
    for l in -8..=8i64 {
        let sheaf = SheafSpec::tangent(2, vec![l]).map_err(e)?;
        let h1 = cohomology(&sheaf, 1, Window::DEFAULT).map_err(e)?.dim(1) as u64;
        ensure(h1 == tangent_dim(2, 1, l), || format!("h1(T({l})) Čech {h1} vs Bott {}", tangent_dim(2, 1, l)))?;
        ensure((h1 != 0) == (l == -3), || format!("h1(T({l})) = {h1}"))?;
        let h0 = cohomology(&sheaf, 0, Window::DEFAULT).map_err(e)?.dim(0) as u64;
        ensure(h0 == Rule::H0Tangent.dim(l), || format!("h0(T({l})) Čech {h0}"))?;
    }
    ensure(rows.iter().all(|r| r.rule != Rule::H1Tangent), || "h1 rule reported as discrepant".into())?;
    let h0 = rows.iter().find(|r| r.rule == Rule::H0Tangent && r.l == 0);
    let h2 = rows.iter().find(|r| r.rule == Rule::H2Line && r.l == -3);
    ensure(h0.map(|r| r.dim) == Some(8), || "h0(T(0)) = 8 discrepancy not emitted".into())?;
    ensure(h2.map(|r| r.dim) == Some(1), || "h2(O(-3)) = 1 discrepancy not emitted".into())?;
    let oracle_h2 = line_bundle_cohomology(2, -3, 2).map_err(e)?.dim(2);
    ensure(oracle_h2 == 1, || format!("oracle h2(O(-3)) = {oracle_h2}"))?;
    let listed: Vec<String> = rows.iter().map(|r| format!("{}@{}={}", r.rule.name(), r.l, r.dim)).collect();
    Ok(Line {
        pass: true,
        detail: format!(
            "h1(T(l))≠0 iff l=-3 on [-8,8]; {} discrepancies emitted incl. h0(T(0))=8, h2(O(-3))=1 [{}]",
            rows.len(),
            listed.join(" ")
        ),
    })
}

/// Witnesses recomputed from windowed Čech cohomology of the summands.
fn cech_witnesses(k: &[i64]) -> Result<[u64; 3], String> {
    let pair_sums = vec![k[0] + k[1], k[0] + k[2], k[1] + k[2]];
    let t = SheafSpec::tangent(2, pair_sums).map_err(e)?;
    let total: i64 = k.iter().sum();
    let dual = SheafSpec::line_sum(2, k.iter().map(|a| total - a).collect()).map_err(e)?;
    Ok([
        cohomology(&t, 1, Window::DEFAULT).map_err(e)?.dim(1) as u64,
        cohomology(&t, 2, Window::DEFAULT).map_err(e)?.dim(2) as u64,
        cohomology(&dual, 2, Window::DEFAULT).map_err(e)?.dim(2) as u64,
    ])
}

fn c4_search() -> Check {
    let t = Instant::now();
    let found = search_split_triples(-8, 8).map_err(e)?;
    let got: BTreeSet<Vec<i64>> = found.iter().map(|r| r.degrees.degrees().to_vec()).collect();
    let mut brute = BTreeSet::new();
    for a in -8..=8i64 {
        for b in -8..=8i64 {
            for c in -8..=8i64 {
                if a + b > 2 && a + c == -3 && b + c < -3 {
                    brute.insert(vec![a, b, c]);
                }
            }
        }
    }
    ensure(got == brute, || format!("search {} triples, brute force {}", got.len(), brute.len()))?;
    ensure(got.len() == found.len(), || "duplicate triples".into())?;
    for v in [[3, 0, -6], [4, -1, -7], [2, 1, -5]] {
        ensure(got.contains(v.as_slice()), || format!("{v:?} missing"))?;
    }
    let r = check_lemma71(&deg(&[3, 0, -6])).map_err(e)?;
    let w = [r.direct[0].witness, r.direct[1].witness, r.direct[2].witness];
    ensure(r.all_direct(), || "(3,0,-6) fails a direct condition".into())?;
    let oracle = cech_witnesses(&[3, 0, -6])?;
    ensure(w == oracle, || format!("witnesses {w:?}, Čech oracle {oracle:?}"))?;
    let stated: [u64; 3] = [1, 2, 11];
    let r2 = check_lemma71(&deg(&[2, 1, -5])).map_err(e)?;
    ensure(r2.eq74 && !r2.direct[1].holds, || "(2,1,-5) not failing condition 2".into())?;
    ensure(r2.flags.iter().any(|f| f.contains("eq74 holds but c2 fails")), || "(2,1,-5) not flagged".into())?;
    within(t, Duration::from_secs(5), "search")?;
    Ok(Line {
        pass: true,
        detail: format!(
            "{} triples = brute force; (3,0,-6) witnesses {:?} (= Čech oracle; stated {:?} is a known arithmetic defect, h2(T(-6)) = 8); (2,1,-5) flagged; {:?}",
            got.len(),
            w,
            stated,
            t.elapsed()
        ),
    })
}

fn c5_gamma_cocycle() -> Check {
    let t = Instant::now();
    let mut r = rng(0xC5);
    let mut cache = H1Cache::default();
    let mut nonzero = 0;
    for i in 0..100 {
        let d = random_degrees(&mut r);
        let (tr, _) = random_order2(&mut r, 2, &d, &mut cache).map_err(e)?;
        let g = tr.obstruction_cocycle().map_err(e)?;
        if !g.cochain.is_zero() {
            nonzero += 1;
        }
        let check = verify_gamma_cocycle(&g, &tr).map_err(e)?;
        ensure(check.pass, || format!("case {i} {:?}: {:?}", d.degrees(), check.residual))?;
    }
    within(t, Duration::from_secs(60), "100 cases")?;
    Ok(Line {
        pass: true,
        detail: format!("100/100 pass ({nonzero} with Γ ≠ 0), {:?}", t.elapsed()),
    })
}

fn c6_torsor() -> Check {
    let mut r = rng(0xC6);
    let mut cache = H1Cache::default();
    let mut literal_equal = 0;
    for i in 0..100 {
        let d = random_degrees(&mut r);
        let (tr, _) = random_order2(&mut r, 2, &d, &mut cache).map_err(e)?;
        let sheaf = slot_sheaf(2, &d, 2).map_err(e)?;
        let alpha = random_closed_one_cochain(&mut r, &sheaf, &mut cache).map_err(e)?;
        let moved = tr.act_torsor(&alpha).map_err(e)?;
        ensure(moved.is_valid().map_err(e)?, || format!("case {i}: t·α invalid"))?;
        let low = tr.truncate(1).obstruction_cocycle().map_err(e)?;
        let low_moved = moved.truncate(1).obstruction_cocycle().map_err(e)?;
        ensure(low.cochain == low_moved.cochain, || format!("case {i}: degree-m defect changed"))?;

        let g = tr.obstruction_cocycle().map_err(e)?.cochain;
        let gm = moved.obstruction_cocycle().map_err(e)?.cochain;
        if g == gm {
            literal_equal += 1;
        }
        let split = Trivialization::split_model(2, &d, 2).map_err(e)?;
        let y = pushforward_partial(&alpha, &split).map_err(e)?.cochain;
        ensure(gm.sub(&g) == y, || format!("case {i}: ΔΓ is not the pushforward of α"))?;

        let (exact, nu) = random_exact_one_cochain(&mut r, &sheaf).map_err(e)?;
        let shifted = tr.act_torsor(&exact).map_err(e)?;
        let lambda = lambda_from_cochain(&nu, &d, 2, 2, true).map_err(e)?;
        ensure(is_equivalent_via(&tr, &shifted, &lambda).map_err(e)?, || format!("case {i}: id − ν is not an equivalence"))?;
    }
    Ok(Line {
        pass: true,
        detail: format!(
            "100/100: t·α valid, degree-m defect unchanged, ΔΓ_(m+1) = ∂*α exactly, t·δν ≅ t via id−ν (Γ_(m+1) literally equal in {literal_equal}/100)"
        ),
    })
}

/// Returns (literally unchanged count, certified count) for part 1 and the certified count for part 2.
fn c7_invariance() -> Result<(usize, usize, usize), String> {
    let mut r = rng(0xC7);
    let mut cache = H1Cache::default();
    let (mut unchanged, mut certified) = (0, 0);
    for i in 0..50 {
        let d = random_degrees(&mut r);
        let (tr, _) = random_order2(&mut r, 2, &d, &mut cache).map_err(e)?;
        let lambda = random_lambda(&mut r, 2, &d, &[2], 2).map_err(e)?;
        ensure(lambda.iter().all(|l| l.is_identity_mod(2)), || "λ not ≡ id mod J^2".into())?;
        let c = conjugate(&tr, &lambda).map_err(e)?;
        ensure(c.is_valid().map_err(e)?, || format!("case {i}: conjugate invalid"))?;
        let g = tr.obstruction_cocycle().map_err(e)?.cochain;
        let gc = c.obstruction_cocycle().map_err(e)?.cochain;
        if g == gc {
            unchanged += 1;
        }
        let diff = gc.sub(&g);
        if solve_coboundary(&diff, wide(&diff)).map_err(e)?.is_solved() {
            certified += 1;
        }
    }

    let pool: [[i64; 4]; 4] = [[1, 0, -1, 2], [2, -1, 0, 1], [0, 0, 1, -2], [1, 1, -1, -1]];
    let mut general = 0;
    for i in 0..50 {
        let d = deg(&pool[r.gen_range(0..pool.len())]);
        let s2 = slot_sheaf(2, &d, 2).map_err(e)?;
        let (w, _) = random_exact_one_cochain(&mut r, &s2).map_err(e)?;
        let t2 = Trivialization::split_model(2, &d, 2).map_err(e)?.act_torsor(&w).map_err(e)?;
        let g2 = t2.obstruction_cocycle().map_err(e)?.cochain;
        let t3 = match t2.extend(wide(&g2)).map_err(e)? {
            ExtensionOutcome::Extended(t) => t,
            other => return Err(format!("case {i}: exact data did not extend: {other:?}")),
        };
        let s3 = slot_sheaf(2, &d, 3).map_err(e)?;
        let alpha = random_closed_one_cochain(&mut r, &s3, &mut cache).map_err(e)?;
        let t3 = t3.act_torsor(&alpha).map_err(e)?;
        let lambda = random_lambda(&mut r, 2, &d, &[2, 3], 3).map_err(e)?;
        let c = conjugate(&t3, &lambda).map_err(e)?;
        ensure(c.is_valid().map_err(e)?, || format!("order-3 case {i}: conjugate invalid"))?;
        let diff = c.obstruction_cocycle().map_err(e)?.cochain.sub(&t3.obstruction_cocycle().map_err(e)?.cochain);
        if solve_coboundary(&diff, wide(&diff)).map_err(e)?.is_solved() {
            general += 1;
        }
    }
    Ok((unchanged, certified, general))
}

fn c8_cp1() -> Check {
    let mut r = rng(0xC8);
    let mut cache = H1Cache::default();
    let mut orders = [0usize; 2];
    for i in 0..50 {
        let d = random_degrees(&mut r);
        let (mut tr, _) = random_order2(&mut r, 1, &d, &mut cache).map_err(e)?;
        if i % 2 == 1 {
            tr = match tr.extend(Window::DEFAULT).map_err(e)? {
                ExtensionOutcome::Extended(t) => t,
                other => return Err(format!("case {i}: {other:?}")),
            };
            let a = random_one_cochain_cp1(&mut r, &slot_sheaf(1, &d, 3).map_err(e)?).map_err(e)?;
            tr = tr.act_torsor(&a).map_err(e)?;
        }
        orders[tr.order() - 2] += 1;
        let up = match tr.extend(Window::DEFAULT).map_err(e)? {
            ExtensionOutcome::Extended(t) => t,
            other => return Err(format!("case {i}: order {} did not extend: {other:?}", tr.order())),
        };
        ensure(up.order() == tr.order() + 1 && up.truncate(tr.order()) == tr, || format!("case {i}: bad extension"))?;
        let cocycle = up.cocycle_residual().map_err(e)?;
        let inverse = up.inverse_residual().map_err(e)?;
        ensure(cocycle.values().all(|d| d.is_zero()) && inverse.values().all(|d| d.is_zero()), || format!("case {i}: nonzero residual"))?;
    }
    Ok(Line {
        pass: true,
        detail: format!("50/50 extend with zero residuals ({} from order 2, {} from order 3)", orders[0], orders[1]),
    })
}

fn c9_pipeline() -> Check {
    let t = Instant::now();
    let d = deg(&[3, 0, -6]);
    let c = pipeline_obstructed_cp2(2, &d, Window::DEFAULT).map_err(e)?;
    ensure(c.h1_dim == 1 && c.h2_dim == 11, || format!("dims h1={} h2={}", c.h1_dim, c.h2_dim))?;
    ensure(c.coordinates.len() == 1 && c.coordinates[0].len() == 11, || "coordinate shape".into())?;
    ensure(c.gamma_matches_formula && c.extension_consistent, || "internal cross-checks failed".into())?;
    ensure(c.verdict == Verdict::Unobstructed, || format!("verdict {:?}", c.verdict))?;
    ensure(c.coordinates[0].iter().all(|x| *x == rat(0)), || "nonzero coordinates with a zero verdict".into())?;

    // Independent of the class coordinates: the glued thickening itself extends.
    let sheaf = slot_sheaf(2, &d, 2).map_err(e)?;
    let h1 = h1_representatives(&sheaf, Window::DEFAULT).map_err(e)?;
    let tr = superthick::supermap::second_order_from(h1.reps(1)[0], &d).map_err(e)?;
    let g = tr.obstruction_cocycle().map_err(e)?.cochain;
    match tr.extend(wide(&g)).map_err(e)? {
        ExtensionOutcome::Extended(up) => ensure(up.is_valid().map_err(e)?, || "extension invalid".into())?,
        other => return Err(format!("(3,0,-6) generator did not extend: {other:?}")),
    }

    let other = pipeline_obstructed_cp2(2, &deg(&[4, -1, -7]), Window::DEFAULT).map_err(e)?;
    ensure(other.verdict == Verdict::ObstructedExhibited, || format!("(4,-1,-7) verdict {:?}", other.verdict))?;
    within(t, Duration::from_secs(120), "pipeline")?;
    let agrees = c.agrees_with_prediction();
    let coords: Vec<String> = c.coordinates[0].iter().map(|x| x.to_string()).collect();
    Ok(Line {
        pass: true,
        detail: format!(
            "(3,0,-6): {}, h1=1, h2=11, coordinates [{}], prediction (nonzero) {}; (4,-1,-7): {} with coordinates {}; {:?}",
            c.verdict.as_str(),
            coords.join(","),
            if agrees == Some(true) { "agreed" } else { "DISAGREED" },
            other.verdict.as_str(),
            other.coordinates.iter().map(|v| format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect::<Vec<_>>().join(" "),
            t.elapsed()
        ),
    })
}

fn c10_threshold() -> Check {
    let t = Instant::now();
    let cert = sufficient_l_nonsplit(-3).map_err(e)?;
    ensure(cert.l0 == -2 && cert.bounds.len() == 3, || format!("l0 {} with {} bounds", cert.l0, cert.bounds.len()))?;
    let oracle = [
        cohomology(&SheafSpec::one_form(2, vec![0]).map_err(e)?, 1, Window::DEFAULT).map_err(e)?.dim(1) as u64,
        cohomology(&SheafSpec::one_form(2, vec![2]).map_err(e)?, 0, Window::DEFAULT).map_err(e)?.dim(0) as u64,
        line_bundle_cohomology(2, -3, 2).map_err(e)?.dim(2) as u64,
    ];
    let w: Vec<u64> = cert.bounds.iter().map(|b| b.witness).collect();
    ensure(w == oracle, || format!("witnesses {w:?}, Čech oracle {oracle:?}"))?;
    ensure(w.iter().all(|&x| x > 0), || "zero witness".into())?;
    ensure(condition2_bound_at(-2).is_some() && condition2_bound_at(-1).is_none(), || "threshold not sharp for the bound".into())?;
    ensure(sufficient_l_nonsplit(-2).is_err(), || "k' = -2 accepted".into())?;
    within(t, Duration::from_secs(1), "threshold")?;
    Ok(Line {
        pass: true,
        detail: format!("l0 = -2, witnesses {w:?} (= Čech oracle), {:?}", t.elapsed()),
    })
}

fn grassmann(r: &mut SampleRng, parity: Option<u32>) -> GrassmannElement {
    let n = r.gen_range(0..4);
    let terms: Vec<(MultiIndex, LaurentPoly)> = (0..n)
        .map(|_| (r.gen_range(0u32..8), random_poly(r, 2, -2, 2, 3)))
        .filter(|(b, _)| parity.is_none_or(|p| b.count_ones() % 2 == p))
        .map(|(b, c)| (MultiIndex::from_bits(b), c))
        .collect();
    GrassmannElement::from_terms(3, 2, terms).unwrap()
}

fn c11_laws() -> Check {
    let t = Instant::now();
    let mut r = rng(0xC11);
    for i in 0..1000 {
        let (a, b, c) = (
            random_poly(&mut r, 2, -3, 3, 4),
            random_poly(&mut r, 2, -3, 3, 4),
            random_poly(&mut r, 2, -3, 3, 4),
        );
        ensure(&(&a * &b) * &c == &a * &(&b * &c), || format!("laurent associativity, case {i}"))?;
        ensure(&a * &b == &b * &a, || format!("laurent commutativity, case {i}"))?;
        let v = i % 2;
        ensure((&a * &b).partial(v) == &(&a.partial(v) * &b) + &(&a * &b.partial(v)), || format!("laurent Leibniz, case {i}"))?;

        let (pa, pb) = (r.gen_range(0..2u32), r.gen_range(0..2u32));
        let (x, y, z) = (grassmann(&mut r, Some(pa)), grassmann(&mut r, Some(pb)), grassmann(&mut r, None));
        ensure(x.wedge(&y).wedge(&z) == x.wedge(&y.wedge(&z)), || format!("wedge associativity, case {i}"))?;
        let yx = y.wedge(&x);
        ensure(x.wedge(&y) == if pa * pb == 1 { yx.neg() } else { yx }, || format!("graded commutativity, case {i}"))?;
        let g = 1 + i % 3;
        let second = x.wedge(&y.odd_derivation(g));
        let rhs = x.odd_derivation(g).wedge(&y).add(&if pa == 1 { second.neg() } else { second });
        ensure(x.wedge(&y).odd_derivation(g) == rhs, || format!("odd Leibniz, case {i}"))?;
        let m = i % 4;
        ensure(x.wedge(&z).truncate(m) == x.truncate(m).wedge(&z.truncate(m)).truncate(m), || format!("truncation, case {i}"))?;

        let kind = i % 3;
        let tw = vec![r.gen_range(-4..=4), r.gen_range(-4..=4)];
        let sheaf = match kind {
            0 => SheafSpec::line_sum(2, tw),
            1 => SheafSpec::tangent(2, tw),
            _ => SheafSpec::one_form(2, tw),
        }
        .map_err(e)?;
        let c0 = random_zero_cochain(&mut r, &sheaf, 2, 0.5).map_err(e)?;
        let d1 = coboundary(&c0).map_err(e)?;
        ensure(coboundary(&d1).map_err(e)?.is_zero(), || format!("δδ ≠ 0 on {sheaf}, case {i}"))?;
    }
    within(t, Duration::from_secs(30), "1000 cases")?;
    Ok(Line {
        pass: true,
        detail: format!("1000 cases each: laurent assoc/comm/Leibniz, wedge assoc, graded comm, odd Leibniz, truncation, δδ=0; {:?}", t.elapsed()),
    })
}

fn main() {
    let mut unexpected = 0;
    let mut report = |id: u32, name: &str, outcome: Check| {
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (outcome, known) {
            (Ok(l), None) if l.pass => println!("criterion {id:>2} PASS  {name}: {}", l.detail),
            (Ok(l), Some((_, why))) if !l.pass => println!("criterion {id:>2} FAIL  {name}: {} [known: {why}]", l.detail),
            (Ok(l), _) => {
                unexpected += 1;
                println!("criterion {id:>2} UNEXPECTED  {name}: pass={} {}", l.pass, l.detail);
            }
            (Err(msg), _) => {
                unexpected += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg}");
            }
        }
    };

    report(1, "Bott = Čech oracle", c1_bott_oracle());
    report(2, "Serre duality", c2_serre());
    report(3, "vanishing rules on CP2", c3_rules());
    report(4, "split triple search", c4_search());
    report(5, "Γ is a cocycle", c5_gamma_cocycle());
    report(6, "torsor action", c6_torsor());
    let c7 = c7_invariance().map(|(unchanged, certified, general)| {
        // Documented failure: part 1 changes term by term, yet every change is a certified coboundary.
        let documented = unchanged < 50 && certified == 50;
        Line {
            pass: unchanged == 50 && general == 50,
            detail: format!(
                "λ ≡ id mod J^m: Γ unchanged term-by-term {unchanged}/50, ΔΓ certified coboundary {certified}/50; general λ at order 3: certified {general}/50{}",
                if documented && general == 50 { "" } else { " (NOT the documented failure)" }
            ),
        }
    });
    let c7 = match c7 {
        Ok(l) if !l.pass && l.detail.ends_with("NOT the documented failure)") => Err(l.detail),
        other => other,
    };
    report(7, "isomorphism invariance", c7);
    report(8, "CP1 vacuity", c8_cp1());
    report(9, "end-to-end pipeline", c9_pipeline());
    report(10, "non-split threshold", c10_threshold());
    report(11, "algebra laws", c11_laws());

    if unexpected > 0 {
        println!("{unexpected} unexpected result(s)");
        std::process::exit(1);
    }
    println!("all criteria as expected ({} known failure(s))", KNOWN_FAILURES.len());
}
