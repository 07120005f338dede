//! Enumeration of magic squares of squares over finite fields and Z/nZ.
//!
//! Both searches rest on the center-line structure: with center `e²`, the
//! four lines through the center are pairs of squares summing to `2e²`, and
//! a choice of the two diagonal pairs `{a², i²}`, `{c², g²}` determines the
//! edge cells `B, D, F, H`. Fields normalize the center to 0 or 1 by scaling;
//! rings take one center per divisor of `n`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algebra::{
    consecutive_square_triples, divisor_representatives, pairs_summing_to, Carrier, ExclusionRule,
    StructureKind,
};
use crate::error::{Error, Result};
use crate::grid::{dihedral_canonical, dihedral_orbit, SquareTuple};

/// Which element of an unordered center pair takes the `a²` (resp. `c²`) cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignmentPolicy {
    /// The smaller encoding. Matches the reference count tables.
    #[default]
    Canonical,
    /// Both orders of each pair.
    Both,
}

impl fmt::Display for AssignmentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssignmentPolicy::Canonical => "canonical",
            AssignmentPolicy::Both => "both",
        })
    }
}

impl std::str::FromStr for AssignmentPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "canonical" => Ok(AssignmentPolicy::Canonical),
            "both" => Ok(AssignmentPolicy::Both),
            other => Err(format!(
                "unknown policy {other:?} (expected canonical or both)"
            )),
        }
    }
}

impl AssignmentPolicy {
    fn orientations(self, (u, v): (u64, u64)) -> impl Iterator<Item = (u64, u64)> {
        let both = self == AssignmentPolicy::Both;
        std::iter::once((u, v)).chain(both.then_some((v, u)))
    }
}

/// Why a field was declared Parker without searching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefilterReason {
    EvenOrder,
    TooFewSquares,
    PairDeficit,
    NoConsecutiveSquares,
}

impl fmt::Display for PrefilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrefilterReason::EvenOrder => "even-order",
            PrefilterReason::TooFewSquares => "too-few-squares",
            PrefilterReason::PairDeficit => "pair-deficit",
            PrefilterReason::NoConsecutiveSquares => "no-consecutive-squares",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub carrier: Carrier,
    pub policy: AssignmentPolicy,
    /// Distinct tuples in discovery order.
    pub tuples: Vec<SquareTuple>,
    pub tuple_count: usize,
    pub dihedral_class_count: usize,
    pub parker: bool,
    pub prefilter_verdict: Option<PrefilterReason>,
    pub elapsed: Duration,
}

/// Insertion-ordered set of tuples.
#[derive(Default)]
struct Msos {
    seen: HashSet<SquareTuple>,
    ordered: Vec<SquareTuple>,
}

impl Msos {
    fn insert(&mut self, t: SquareTuple) {
        if self.seen.insert(t) {
            self.ordered.push(t);
        }
    }
}

/// Completes the square from its center and diagonal pairs, keeping it when
/// the edges are squares and all nine cells are distinct.
#[inline]
fn try_complete(c: &Carrier, e2: u64, (a, i): (u64, u64), (cc, g): (u64, u64), out: &mut Msos) {
    let squares = c.squares();
    let three_e2 = c.add(c.add(e2, e2), e2);
    let b = c.sub(c.sub(three_e2, a), cc);
    let d = c.sub(c.sub(three_e2, a), g);
    let f = c.sub(c.sub(three_e2, cc), i);
    let h = c.sub(c.sub(three_e2, g), i);
    if ![b, d, f, h].iter().all(|&x| squares.contains(x)) {
        return;
    }
    let cells = [a, b, cc, d, e2, f, g, h, i];
    let mut sorted = cells;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return;
    }
    out.insert(SquareTuple(cells));
}

/// Pairs with sum `2e²` combined with every earlier pair, as in the
/// accumulating loop of the ring/field search.
fn center_sequences(c: &Carrier, e: u64, policy: AssignmentPolicy, out: &mut Msos) {
    let e2 = c.square(e);
    let index = pairs_summing_to(c, c.add(e2, e2), ExclusionRule::Standard);
    let mut sequences: Vec<(u64, u64)> = Vec::with_capacity(index.len());
    for &pair in &index.pairs {
        for &earlier in &sequences {
            for ai in policy.orientations(pair) {
                for cg in policy.orientations(earlier) {
                    try_complete(c, e2, ai, cg, out);
                }
            }
        }
        sequences.push(pair);
    }
}

fn finish(
    carrier: Carrier,
    policy: AssignmentPolicy,
    msos: Msos,
    prefilter: Option<PrefilterReason>,
    start: Instant,
) -> SearchResult {
    let tuples = msos.ordered;
    let classes: BTreeSet<SquareTuple> = tuples.iter().map(dihedral_canonical).collect();
    SearchResult {
        carrier,
        policy,
        tuple_count: tuples.len(),
        dihedral_class_count: classes.len(),
        parker: tuples.is_empty(),
        prefilter_verdict: prefilter,
        tuples,
        elapsed: start.elapsed(),
    }
}

/// Magic squares of squares over F_q up to scaling: center 0 with the
/// `c² = 1, g² = −1` normalization, then center 1.
pub fn msos_field(q: u64, policy: AssignmentPolicy) -> Result<SearchResult> {
    let carrier = Carrier::field(q)?;
    Ok(msos_field_in(carrier, policy))
}

/// As [`msos_field`] on an already constructed field (e.g. with a chosen modulus).
pub fn msos_field_in(carrier: Carrier, policy: AssignmentPolicy) -> SearchResult {
    let start = Instant::now();
    assert!(carrier.is_field(), "msos_field_in needs a field");
    let prefilter = prefilter_carrier(&carrier);
    let mut msos = Msos::default();

    let zero_pairs = pairs_summing_to(&carrier, 0, ExclusionRule::Standard);
    let (one, minus_one) = (carrier.one(), carrier.neg(carrier.one()));
    for &pair in &zero_pairs.pairs {
        for ai in policy.orientations(pair) {
            try_complete(&carrier, 0, ai, (one, minus_one), &mut msos);
        }
    }
    center_sequences(&carrier, one, policy, &mut msos);
    finish(carrier, policy, msos, prefilter, start)
}

/// Magic squares of squares over Z/nZ up to scaling by units: one center per
/// divisor `m | n`, `e = m mod n`.
pub fn msos_ring(n: u64, policy: AssignmentPolicy) -> Result<SearchResult> {
    let start = Instant::now();
    let carrier = Carrier::ring(n)?;
    let mut msos = Msos::default();
    for e in divisor_representatives(n) {
        center_sequences(&carrier, e, policy, &mut msos);
    }
    Ok(finish(carrier, policy, msos, None, start))
}

/// Runs the search matching the structure kind.
pub fn msos(kind: StructureKind, order: u64, policy: AssignmentPolicy) -> Result<SearchResult> {
    match kind {
        StructureKind::Field => msos_field(order, policy),
        StructureKind::Ring => msos_ring(order, policy),
    }
}

/// Cheap necessary conditions for a field to admit a magic square of
/// squares; `Some(reason)` proves the field Parker, `None` is inconclusive.
pub fn prefilter_field(q: u64) -> Result<Option<PrefilterReason>> {
    Ok(prefilter_carrier(&Carrier::field(q)?))
}

fn prefilter_carrier(c: &Carrier) -> Option<PrefilterReason> {
    if !c.is_field() {
        return None;
    }
    if c.characteristic() == 2 {
        return Some(PrefilterReason::EvenOrder);
    }
    if c.squares().len() < 9 {
        return Some(PrefilterReason::TooFewSquares);
    }
    let zero_pairs = pairs_summing_to(c, 0, ExclusionRule::Standard).len();
    let two_pairs = pairs_summing_to(c, c.from_int(2), ExclusionRule::Standard).len();
    if zero_pairs < 4 && two_pairs < 4 {
        return Some(PrefilterReason::PairDeficit);
    }
    let zero_route = zero_pairs >= 4 && !consecutive_square_triples(c).is_empty();
    if !zero_route && two_pairs < 4 {
        return Some(PrefilterReason::NoConsecutiveSquares);
    }
    None
}

/// Default cap on the carrier order for [`brute_force_oracle`].
pub const ORACLE_CAP: u64 = 100;

/// Every magic square of distinct squares over `c`, with no normalization.
///
/// Depth-first over the free cells `a, b, c, d` (row 1 fixes the total);
/// every later cell closes a line and is forced by it, then checked against
/// the square set, the remaining lines and distinctness.
pub fn brute_force_oracle(c: &Carrier, cap: u64) -> Result<BTreeSet<SquareTuple>> {
    if c.order() > cap {
        return Err(Error::OracleCapExceeded {
            order: c.order(),
            cap,
        });
    }
    let squares = c.squares();
    let sq = squares.elements();
    let mut out = BTreeSet::new();
    let fresh = |cells: &[u64], x: u64| squares.contains(x) && !cells.contains(&x);
    let mut cells = Vec::with_capacity(9);
    for &a in sq {
        cells.clear();
        cells.push(a);
        for &b in sq {
            cells.truncate(1);
            if !fresh(&cells, b) {
                continue;
            }
            cells.push(b);
            for &cc in sq {
                cells.truncate(2);
                if !fresh(&cells, cc) {
                    continue;
                }
                cells.push(cc);
                let total = c.add(c.add(a, b), cc);
                let close = |x: u64, y: u64| c.sub(c.sub(total, x), y);
                for &d in sq {
                    cells.truncate(3);
                    if !fresh(&cells, d) {
                        continue;
                    }
                    cells.push(d);
                    // column 1 → g, anti-diagonal → e, row 2 → f, column 2 → h, row 3 → i
                    let g = close(a, d);
                    if !fresh(&cells, g) {
                        continue;
                    }
                    cells.push(g);
                    let e = close(cc, g);
                    if !fresh(&cells, e) {
                        continue;
                    }
                    cells.push(e);
                    let f = close(d, e);
                    if !fresh(&cells, f) {
                        continue;
                    }
                    cells.push(f);
                    let h = close(b, e);
                    if !fresh(&cells, h) {
                        continue;
                    }
                    cells.push(h);
                    let i = close(g, h);
                    if !fresh(&cells, i) {
                        continue;
                    }
                    // column 3 and the main diagonal are the lines not used above
                    if c.add(c.add(cc, f), i) != total || c.add(c.add(a, e), i) != total {
                        continue;
                    }
                    out.insert(SquareTuple([a, b, cc, d, e, f, g, h, i]));
                }
            }
        }
    }
    Ok(out)
}

/// All images of `tuples` under the dihedral group and scaling by `u²` for
/// units `u`.
pub fn normalization_closure(c: &Carrier, tuples: &[SquareTuple]) -> BTreeSet<SquareTuple> {
    let scales: BTreeSet<u64> = c.units().into_iter().map(|u| c.square(u)).collect();
    let mut out = BTreeSet::new();
    for t in tuples {
        for image in dihedral_orbit(t) {
            for &s in &scales {
                out.insert(SquareTuple(image.0.map(|x| c.mul(s, x))));
            }
        }
    }
    out
}

/// Detail behind [`oracle_agreement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleComparison {
    pub search_count: usize,
    pub oracle_count: usize,
    /// Search tuples absent from the oracle set.
    pub missing_from_oracle: usize,
    /// Oracle tuples not reachable from any search tuple.
    pub unexplained: usize,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.missing_from_oracle == 0 && self.unexplained == 0
    }
}

pub fn compare_with_oracle(c: &Carrier, policy: AssignmentPolicy) -> Result<OracleComparison> {
    let oracle = brute_force_oracle(c, ORACLE_CAP)?;
    let result = if c.is_field() {
        msos_field_in(c.clone(), policy)
    } else {
        msos_ring(c.order(), policy)?
    };
    let closure = normalization_closure(c, &result.tuples);
    Ok(OracleComparison {
        search_count: result.tuple_count,
        oracle_count: oracle.len(),
        missing_from_oracle: result.tuples.iter().filter(|t| !oracle.contains(t)).count(),
        unexplained: oracle.difference(&closure).count(),
    })
}

/// True when the normalized search and the oracle describe the same squares.
pub fn oracle_agreement(c: &Carrier) -> Result<bool> {
    Ok(compare_with_oracle(c, AssignmentPolicy::Canonical)?.agrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::validate_square;

    fn contains_image(c: &Carrier, tuples: &[SquareTuple], roots: [u64; 9]) -> bool {
        let target = SquareTuple(roots.map(|x| c.square(x)));
        normalization_closure(c, tuples).contains(&target)
    }

    #[test]
    fn f29_counts() {
        let r = msos_field(29, AssignmentPolicy::Canonical).unwrap();
        assert_eq!(r.tuple_count, 2);
        assert!(!r.parker);
        assert!(contains_image(
            &r.carrier,
            &r.tuples,
            [9, 11, 1, 6, 0, 14, 12, 16, 8]
        ));
        for t in &r.tuples {
            assert!(
                validate_square(&t.to_grid(), &r.carrier)
                    .unwrap()
                    .is_magic_square_of_squares
            );
        }
    }

    #[test]
    fn small_parker_fields() {
        assert!(msos_field(17, AssignmentPolicy::Canonical).unwrap().parker);
        assert!(msos_field(4, AssignmentPolicy::Canonical).unwrap().parker);
        assert!(matches!(
            msos_field(12, AssignmentPolicy::Canonical),
            Err(Error::NotPrimePower(12))
        ));
    }

    #[test]
    fn f59_contains_known_square() {
        let r = msos_field(59, AssignmentPolicy::Canonical).unwrap();
        let target = SquareTuple([20u64, 12, 7, 2, 1, 23, 22, 25, 29].map(|x| r.carrier.square(x)));
        assert!(dihedral_orbit(&target).iter().any(|t| r.tuples.contains(t)));
    }

    #[test]
    fn ring_counts() {
        assert_eq!(
            msos_ring(27, AssignmentPolicy::Canonical)
                .unwrap()
                .tuple_count,
            3
        );
        assert_eq!(
            msos_ring(29, AssignmentPolicy::Canonical)
                .unwrap()
                .tuple_count,
            7
        );
        assert!(msos_ring(25, AssignmentPolicy::Canonical).unwrap().parker);
        assert!(matches!(
            msos_ring(1, AssignmentPolicy::Canonical),
            Err(Error::OrderTooSmall(1))
        ));
    }

    #[test]
    fn prefilter_examples() {
        assert_eq!(
            prefilter_field(16).unwrap(),
            Some(PrefilterReason::EvenOrder)
        );
        assert_eq!(
            prefilter_field(13).unwrap(),
            Some(PrefilterReason::TooFewSquares)
        );
        assert_eq!(
            prefilter_field(23).unwrap(),
            Some(PrefilterReason::PairDeficit)
        );
        assert_eq!(
            prefilter_field(17).unwrap(),
            Some(PrefilterReason::NoConsecutiveSquares)
        );
        assert_eq!(prefilter_field(25).unwrap(), None);
        assert!(msos_field(25, AssignmentPolicy::Canonical).unwrap().parker);
        assert_eq!(prefilter_field(29).unwrap(), None);
    }

    #[test]
    fn oracle_examples() {
        let f13 = Carrier::field(13).unwrap();
        assert!(brute_force_oracle(&f13, ORACLE_CAP).unwrap().is_empty());
        let f29 = Carrier::field(29).unwrap();
        let oracle = brute_force_oracle(&f29, ORACLE_CAP).unwrap();
        let printed = SquareTuple([9u64, 11, 1, 6, 0, 14, 12, 16, 8].map(|x| f29.square(x)));
        assert!(oracle.contains(&printed));
        assert!(!brute_force_oracle(&Carrier::ring(27).unwrap(), ORACLE_CAP)
            .unwrap()
            .is_empty());
        assert!(matches!(
            brute_force_oracle(&Carrier::ring(101).unwrap(), ORACLE_CAP),
            Err(Error::OracleCapExceeded {
                order: 101,
                cap: 100
            })
        ));
    }

    #[test]
    fn oracle_agreement_examples() {
        assert!(oracle_agreement(&Carrier::field(29).unwrap()).unwrap());
        assert!(oracle_agreement(&Carrier::ring(27).unwrap()).unwrap());
        assert!(oracle_agreement(&Carrier::field(17).unwrap()).unwrap());
    }

    #[test]
    fn deterministic_output() {
        let a = msos_ring(54, AssignmentPolicy::Canonical).unwrap();
        let b = msos_ring(54, AssignmentPolicy::Canonical).unwrap();
        assert_eq!(a.tuples, b.tuples);
    }
}
