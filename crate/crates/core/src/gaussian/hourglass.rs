//! Hourglass candidates: the sum-of-two-squares guess and the searches driven
//! by the fourth-power criterion.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    chi, gaussian_factor, pow4_parts, t41_construct, t41_holds, t41_holds_fourth_i128, GaussianInt,
};
use crate::algebra::Integers;
use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::grid::{validate_hourglass, ValidationReport};

/// `4·24³`: every `4·Im[x⁴]·Im[y⁴]·Im[z⁴]` is a multiple of this.
pub const PRODUCT_SIEVE_MODULUS: i128 = 4 * 24 * 24 * 24;

/// All unordered `{u, v}` with `u² + v² = s`, as `(u, v)` with `u ≤ v`, ascending in `u`.
pub fn two_square_reps(s: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut u = 0u64;
    while u
        .checked_mul(u)
        .is_some_and(|u2| 2 * (u2 as u128) <= s as u128)
    {
        let rest = s - u * u;
        let v = isqrt(rest);
        if v * v == rest {
            out.push((u, v));
        }
        u += 1;
    }
    out
}

/// Seven hourglass cells `(a, b, c, e, g, h, i)` before squaring, from three
/// generators of equal norm: `(a, e, i) = χ(α)`, `(b, e, h) = χ(β)`, `(c, e, g) = χ(γ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HourglassCandidate {
    pub center: BigInt,
    pub generators: [GaussianInt; 3],
    pub cells: [BigInt; 7],
    pub report: ValidationReport<BigInt>,
}

impl HourglassCandidate {
    pub fn squared_cells(&self) -> [BigInt; 7] {
        self.cells.clone().map(|c| &c * &c)
    }
}

pub fn hourglass_from_generators(generators: [GaussianInt; 3]) -> Result<HourglassCandidate> {
    let [ca, cb, cc] = [&generators[0], &generators[1], &generators[2]].map(chi);
    if ca.s != cb.s || cb.s != cc.s {
        return Err(Error::Invariant(format!(
            "hourglass generators have unequal norms {}, {}, {}",
            ca.s, cb.s, cc.s
        )));
    }
    let cells = [ca.r, cb.r, cc.r, ca.s.clone(), cc.t, cb.t, ca.t];
    let squared = cells.clone().map(|c| &c * &c);
    let report = validate_hourglass(&squared, &Integers)?;
    Ok(HourglassCandidate {
        center: ca.s,
        generators,
        cells,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HourglassGuess {
    Candidate(Box<HourglassCandidate>),
    /// Fewer than three representations with nonzero, distinct parts.
    InsufficientRepresentations {
        usable: usize,
    },
}

fn usable_reps(s: u64) -> Vec<(u64, u64)> {
    two_square_reps(s)
        .into_iter()
        .filter(|&(u, v)| u != 0 && u != v)
        .collect()
}

/// The classical guess: take the first three ways of writing `s` as a sum of
/// two squares and let each one generate a center line.
pub fn hourglass_guess(s: u64) -> Result<HourglassGuess> {
    let usable = usable_reps(s);
    if usable.len() < 3 {
        return Ok(HourglassGuess::InsufficientRepresentations {
            usable: usable.len(),
        });
    }
    let generators = std::array::from_fn(|k| GaussianInt::new(usable[k].0, usable[k].1));
    Ok(HourglassGuess::Candidate(Box::new(
        hourglass_from_generators(generators)?,
    )))
}

/// One candidate per 3-subset of the usable representations of `s`, subsets in
/// lexicographic order. Empty when `s` has fewer than three.
pub fn hourglass_guesses(s: u64) -> Result<Vec<HourglassCandidate>> {
    let usable = usable_reps(s);
    let mut out = Vec::new();
    for i in 0..usable.len() {
        for j in i + 1..usable.len() {
            for k in j + 1..usable.len() {
                let generators = [i, j, k].map(|t| GaussianInt::new(usable[t].0, usable[t].1));
                out.push(hourglass_from_generators(generators)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every triple of first-quadrant `x, y, z` with `0 < N ≤ bound`,
    /// `N(x) ≤ N(y) ≤ N(z)`.
    Exhaustive,
    /// Products `w = xyz` with `N(w) ≤ bound` passing the divisibility sieve,
    /// split along their prime factorizations.
    ProductFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HourglassHit {
    pub x: GaussianInt,
    pub y: GaussianInt,
    pub z: GaussianInt,
    pub cells: [BigInt; 7],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HourglassSearch {
    pub hits: Vec<HourglassHit>,
    pub triples_tested: u64,
    /// Exhaustive: inputs dropped for a real fourth power. Product-first:
    /// products that failed the sieve.
    pub skipped: u64,
}

fn verify_hit(x: &GaussianInt, y: &GaussianInt, z: &GaussianInt) -> Result<HourglassHit> {
    let hourglass = hourglass_from_generators(t41_construct(x, y, z))?;
    if !hourglass.report.is_magic_square_of_squares {
        return Err(Error::Invariant(format!(
            "({x}, {y}, {z}) passes the fourth-power criterion but its hourglass has {}/5 equal sums and {} distinct cells",
            hourglass.report.sums_equal_count, hourglass.report.distinct_entries
        )));
    }
    Ok(HourglassHit {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        cells: hourglass.cells,
    })
}

struct Candidate {
    value: GaussianInt,
    fourth: Option<(i128, i128)>,
}

impl Candidate {
    fn new(value: GaussianInt) -> Self {
        let (re, im) = pow4_parts(&value);
        let fourth = GaussianInt { re, im }.to_i128_pair();
        Candidate { value, fourth }
    }
}

fn check(x: &Candidate, y: &Candidate, z: &Candidate) -> bool {
    let fast = match (x.fourth, y.fourth, z.fourth) {
        (Some(a), Some(b), Some(c)) => t41_holds_fourth_i128(a, b, c),
        _ => None,
    };
    fast.unwrap_or_else(|| t41_holds(&x.value, &y.value, &z.value))
        .holds()
}

fn first_quadrant_up_to(bound: u64) -> Vec<GaussianInt> {
    let mut out = Vec::new();
    for re in 1..=isqrt(bound) {
        for im in 0..=isqrt(bound - re * re) {
            out.push((re * re + im * im, re, im));
        }
    }
    out.sort_unstable();
    out.into_iter()
        .map(|(_, re, im)| GaussianInt::new(re, im))
        .collect()
}

pub fn search_hourglass(mode: SearchMode, bound: u64) -> Result<HourglassSearch> {
    search_hourglass_with_progress(mode, bound, 0, &|_| {})
}

/// As [`search_hourglass`], calling `progress(tested)` roughly every
/// `report_every` tested triples (never when `report_every` is 0).
pub fn search_hourglass_with_progress(
    mode: SearchMode,
    bound: u64,
    report_every: u64,
    progress: &(dyn Fn(u64) + Sync),
) -> Result<HourglassSearch> {
    let tested = AtomicU64::new(0);
    let tick = |n: u64| {
        let before = tested.fetch_add(n, Ordering::Relaxed);
        if report_every > 0 && (before + n) / report_every > before / report_every {
            progress(before + n);
        }
    };
    match mode {
        SearchMode::Exhaustive => exhaustive(bound, &tick),
        SearchMode::ProductFirst => product_first(bound, &tick),
    }
}

fn exhaustive(bound: u64, tick: &(dyn Fn(u64) + Sync)) -> Result<HourglassSearch> {
    let all = first_quadrant_up_to(bound);
    let total = all.len() as u64;
    let pool: Vec<Candidate> = all
        .into_iter()
        .map(Candidate::new)
        .filter(|c| {
            // Im[x⁴] = 0 exactly when x is real, imaginary or on a diagonal.
            let (re, im) = (&c.value.re, &c.value.im);
            !(im == &BigInt::from(0) || re == im)
        })
        .collect();
    let skipped = total - pool.len() as u64;

    // (triples tested, index triples that passed) per outer index
    type Chunk = (u64, Vec<(usize, usize, usize)>);
    let chunks: Vec<Chunk> = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            let mut found = Vec::new();
            let mut count = 0u64;
            for j in i..pool.len() {
                for k in j..pool.len() {
                    count += 1;
                    if check(&pool[i], &pool[j], &pool[k]) {
                        found.push((i, j, k));
                    }
                }
            }
            tick(count);
            (count, found)
        })
        .collect();

    let mut out = HourglassSearch {
        skipped,
        ..Default::default()
    };
    for (count, found) in chunks {
        out.triples_tested += count;
        for (i, j, k) in found {
            out.hits
                .push(verify_hit(&pool[i].value, &pool[j].value, &pool[k].value)?);
        }
    }
    Ok(out)
}

/// Every way to distribute the prime multiset into three ordered factors.
fn three_way_splits(groups: &[(GaussianInt, u32)]) -> Vec<[GaussianInt; 3]> {
    let mut acc = vec![[GaussianInt::one(), GaussianInt::one(), GaussianInt::one()]];
    for (prime, mult) in groups {
        let powers: Vec<GaussianInt> = (0..=*mult).map(|k| prime.pow(k)).collect();
        let mut next = Vec::new();
        for split in &acc {
            for kx in 0..=*mult {
                for ky in 0..=(*mult - kx) {
                    let kz = *mult - kx - ky;
                    next.push([
                        &split[0] * &powers[kx as usize],
                        &split[1] * &powers[ky as usize],
                        &split[2] * &powers[kz as usize],
                    ]);
                }
            }
        }
        acc = next;
    }
    acc
}

fn norm_key(g: &GaussianInt) -> (BigInt, BigInt, BigInt) {
    (g.norm(), g.re.clone(), g.im.clone())
}

fn product_first(bound: u64, tick: &(dyn Fn(u64) + Sync)) -> Result<HourglassSearch> {
    let products = first_quadrant_up_to(bound);
    let total = products.len() as u64;
    let modulus = BigInt::from(PRODUCT_SIEVE_MODULUS);
    // (passed the sieve, splits tested, hits)
    type PerProduct = (bool, u64, Vec<[GaussianInt; 3]>);
    let per_product: Vec<Result<PerProduct>> = products
        .into_par_iter()
        .map(|w| {
            let (_, im) = pow4_parts(&w);
            if &im % &modulus != BigInt::from(0) {
                return Ok((false, 0, Vec::new()));
            }
            let groups = gaussian_factor(&w)?.grouped();
            let triples: BTreeSet<Vec<(BigInt, BigInt, BigInt)>> = three_way_splits(&groups)
                .into_iter()
                .map(|split| {
                    let mut keys: Vec<_> = split.iter().map(|g| norm_key(&g.canonical())).collect();
                    keys.sort();
                    keys
                })
                .collect();
            let mut hits = Vec::new();
            let mut count = 0;
            for keys in triples {
                let [x, y, z] = std::array::from_fn(|k| GaussianInt {
                    re: keys[k].1.clone(),
                    im: keys[k].2.clone(),
                });
                count += 1;
                if t41_holds(&x, &y, &z).holds() {
                    hits.push([x, y, z]);
                }
            }
            tick(count);
            Ok((true, count, hits))
        })
        .collect();

    let mut out = HourglassSearch::default();
    let mut sieved = 0u64;
    for item in per_product {
        let (passed, count, hits) = item?;
        sieved += passed as u64;
        out.triples_tested += count;
        for [x, y, z] in hits {
            out.hits.push(verify_hit(&x, &y, &z)?);
        }
    }
    out.skipped = total - sieved;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reps_of_small_numbers() {
        assert_eq!(
            two_square_reps(1105),
            vec![(4, 33), (9, 32), (12, 31), (23, 24)]
        );
        assert_eq!(two_square_reps(2), vec![(1, 1)]);
        assert_eq!(two_square_reps(25), vec![(0, 5), (3, 4)]);
        assert_eq!(two_square_reps(0), vec![(0, 0)]);
        assert!(two_square_reps(3).is_empty());
    }

    #[test]
    fn reps_brute_force() {
        for s in 0..2000u64 {
            let mut expected = Vec::new();
            for u in 0..=45u64 {
                for v in u..=45u64 {
                    if u * u + v * v == s {
                        expected.push((u, v));
                    }
                }
            }
            assert_eq!(two_square_reps(s), expected, "s = {s}");
        }
    }

    fn sorted_magnitudes(c: &HourglassCandidate) -> Vec<u64> {
        let mut abs: Vec<u64> = c
            .cells
            .iter()
            .map(|x| x.magnitude().try_into().unwrap())
            .collect();
        abs.sort_unstable();
        abs
    }

    #[test]
    fn guess_for_1105() {
        let HourglassGuess::Candidate(c) = hourglass_guess(1105).unwrap() else {
            panic!("1105 has four representations");
        };
        assert_eq!(c.center, BigInt::from(1105));
        assert_eq!(c.report.sums_equal_count, 3);
        assert_eq!(c.report.modal_total, BigInt::from(3 * 1105u64 * 1105));
        assert_eq!(
            sorted_magnitudes(&c),
            vec![73, 367, 809, 1105, 1337, 1519, 1561]
        );
    }

    #[test]
    fn all_guesses_for_1105() {
        let all = hourglass_guesses(1105).unwrap();
        assert_eq!(all.len(), 4);
        for c in &all {
            assert_eq!(c.report.sums_equal_count, 3);
            assert!(!c.report.is_magic_square_of_squares);
        }
        let skip_12_31 = all
            .iter()
            .find(|c| c.generators.iter().all(|g| g.re != BigInt::from(12)))
            .unwrap();
        assert_eq!(
            sorted_magnitudes(skip_12_31),
            vec![367, 809, 1057, 1105, 1151, 1337, 1519]
        );
        assert!(hourglass_guesses(25).unwrap().is_empty());
    }

    #[test]
    fn guesses_that_fall_short() {
        assert_eq!(
            hourglass_guess(25).unwrap(),
            HourglassGuess::InsufficientRepresentations { usable: 1 }
        );
        assert_eq!(
            hourglass_guess(5).unwrap(),
            HourglassGuess::InsufficientRepresentations { usable: 1 }
        );
    }

    #[test]
    fn synthetic_near_miss_from_construction() {
        let gens = t41_construct(
            &GaussianInt::new(2, 1),
            &GaussianInt::new(3, 1),
            &GaussianInt::new(3, 2),
        );
        let h = hourglass_from_generators(gens).unwrap();
        assert_eq!(h.center, BigInt::from(650));
        assert_eq!(h.report.sums_equal_count, 3);
        assert_eq!(h.report.modal_total, BigInt::from(3 * 650 * 650));
        assert_eq!(h.report.disagreeing_lines, vec![0, 1]);
        // rows miss 3e² by ±(Im α⁴ + Im β⁴ + Im γ⁴)
        let top = &h.report.line_sums[0] - BigInt::from(3 * 650 * 650);
        assert_eq!(top, BigInt::from(805920));
    }

    #[test]
    fn splits_cover_all_distributions() {
        let groups = vec![(GaussianInt::new(1, 1), 2), (GaussianInt::new(2, 1), 1)];
        // C(4,2) · C(3,2) = 6 · 3
        assert_eq!(three_way_splits(&groups).len(), 18);
    }

    #[test]
    fn small_searches_are_empty() {
        let ex = search_hourglass(SearchMode::Exhaustive, 50).unwrap();
        assert!(ex.hits.is_empty());
        assert!(ex.triples_tested > 0);
        let pf = search_hourglass(SearchMode::ProductFirst, 2000).unwrap();
        assert!(pf.hits.is_empty());
    }
}
