//! Seeded random inputs for the randomized suites.
//!
//! Closed cochains on CP² are drawn as `δν + Σ cᵢhᵢ` (a random 0-cochain's
//! coboundary plus an integer combination of `H¹` representatives), so every
//! sample satisfies its cocycle precondition by construction. On CP¹ every
//! 1-cochain is closed and raw monomials are used.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bott::SplitBundleDegrees;
use crate::cech::{coboundary, h1_representatives, Cochain, CohomologyReport, SheafSpec, Window};
use crate::error::Result;
use crate::laurent::{rat, LaurentPoly};
use crate::supermap::{lambda_from_cochain, slot_sheaf, SuperMap, Trivialization};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Degree triples used by the randomized suites: a mix of bundles with and without `H¹(T⊗∧²E)`.
pub const RANK3_POOL: [[i64; 3]; 8] = [
    [3, 0, -6],
    [4, -1, -7],
    [1, 0, -1],
    [2, 1, -5],
    [0, 0, 0],
    [1, -4, 2],
    [-1, 2, -2],
    [0, -3, 1],
];

pub fn random_degrees(rng: &mut SampleRng) -> SplitBundleDegrees {
    let d = RANK3_POOL[rng.gen_range(0..RANK3_POOL.len())];
    SplitBundleDegrees::new(d.to_vec()).expect("rank 3")
}

fn small_coeff(rng: &mut SampleRng) -> i64 {
    let c = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        c
    } else {
        -c
    }
}

/// A sparse polynomial in `dim` variables with exponents in `[lo, hi]`.
pub fn random_poly(rng: &mut SampleRng, dim: usize, lo: i32, hi: i32, max_terms: usize) -> LaurentPoly {
    let mut p = LaurentPoly::zero(dim);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let e: Vec<i32> = (0..dim).map(|_| rng.gen_range(lo..=hi)).collect();
        p += &LaurentPoly::monomial(e, rat(small_coeff(rng)));
    }
    p
}

/// A 0-cochain whose values are polynomial (regular) on each chart.
pub fn random_zero_cochain(rng: &mut SampleRng, sheaf: &SheafSpec, max_exp: i32, density: f64) -> Result<Cochain> {
    let mut c = Cochain::zero(sheaf.clone(), 0);
    for u in 0..sheaf.cover().num_charts() {
        let sec = (0..sheaf.width())
            .map(|_| {
                if rng.gen_bool(density) {
                    random_poly(rng, sheaf.n, 0, max_exp, 2)
                } else {
                    LaurentPoly::zero(sheaf.n)
                }
            })
            .collect();
        c.set(&[u], sec)?;
    }
    Ok(c)
}

/// Arbitrary 1-cochain on the CP¹ cover (one overlap, any Laurent exponents).
pub fn random_one_cochain_cp1(rng: &mut SampleRng, sheaf: &SheafSpec) -> Result<Cochain> {
    let mut c = Cochain::zero(sheaf.clone(), 1);
    let sec = (0..sheaf.width()).map(|_| random_poly(rng, 1, -3, 3, 2)).collect();
    c.set(&[0, 1], sec)?;
    Ok(c)
}

/// Caches `H¹` representatives per sheaf.
#[derive(Default)]
pub struct H1Cache {
    map: HashMap<SheafSpec, CohomologyReport>,
}

impl H1Cache {
    pub fn get(&mut self, sheaf: &SheafSpec) -> Result<&CohomologyReport> {
        if !self.map.contains_key(sheaf) {
            let r = h1_representatives(sheaf, Window::DEFAULT)?;
            self.map.insert(sheaf.clone(), r);
        }
        Ok(&self.map[sheaf])
    }
}

/// `δν + Σ cᵢhᵢ` on CP², or a raw cochain on CP¹. Never identically zero unless the sheaf is.
pub fn random_closed_one_cochain(rng: &mut SampleRng, sheaf: &SheafSpec, cache: &mut H1Cache) -> Result<Cochain> {
    if sheaf.n == 1 {
        return random_one_cochain_cp1(rng, sheaf);
    }
    let mut c = Cochain::zero(sheaf.clone(), 1);
    for _ in 0..4 {
        let nu = random_zero_cochain(rng, sheaf, 2, 0.4)?;
        c = coboundary(&nu)?;
        let h1 = cache.get(sheaf)?;
        for rep in h1.reps(1) {
            let k = rng.gen_range(-2..=2);
            if k != 0 {
                c = c.add(&rep.scale(&rat(k)));
            }
        }
        if !c.is_zero() {
            break;
        }
    }
    Ok(c)
}

/// An exact 1-cochain `δν` together with `ν`.
pub fn random_exact_one_cochain(rng: &mut SampleRng, sheaf: &SheafSpec) -> Result<(Cochain, Cochain)> {
    let nu = random_zero_cochain(rng, sheaf, 2, 0.5)?;
    Ok((coboundary(&nu)?, nu))
}

/// Split model plus a random closed degree-2 cochain; returns the cochain too.
pub fn random_order2(rng: &mut SampleRng, n: usize, degrees: &SplitBundleDegrees, cache: &mut H1Cache) -> Result<(Trivialization, Cochain)> {
    let sheaf = slot_sheaf(n, degrees, 2)?;
    let omega = random_closed_one_cochain(rng, &sheaf, cache)?;
    let t = Trivialization::split_model(n, degrees, 2)?.act_torsor(&omega)?;
    Ok((t, omega))
}

/// Chart automorphisms `id + μ_j` with `μ_j` random of degree `j`, for each listed `j`.
pub fn random_lambda(rng: &mut SampleRng, n: usize, degrees: &SplitBundleDegrees, slots: &[usize], order: usize) -> Result<Vec<SuperMap>> {
    let charts = n + 1;
    let mut lambda: Vec<SuperMap> = (0..charts)
        .map(|u| SuperMap::identity(u, n, degrees.rank(), order))
        .collect();
    for &j in slots {
        let sheaf = slot_sheaf(n, degrees, j)?;
        let nu = random_zero_cochain(rng, &sheaf, 2, 0.5)?;
        let piece = lambda_from_cochain(&nu, degrees, j, order, false)?;
        for (l, p) in lambda.iter_mut().zip(piece) {
            let id = SuperMap::identity(l.source(), n, degrees.rank(), order);
            *l = l.add_diff(&p.diff(&id));
        }
    }
    Ok(lambda)
}
