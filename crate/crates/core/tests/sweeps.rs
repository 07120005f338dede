use std::collections::BTreeSet;

use parker::arith::prime_power;
use parker::grid::{magic_from_params, validate_square, Grid3, ParamTriple};
use parker::search::{
    compare_with_oracle, msos, msos_field, oracle_agreement, prefilter_field, AssignmentPolicy,
};
use parker::{Carrier, StructureKind};

fn field_orders(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo..=hi).filter(|&q| prime_power(q).is_some())
}

/// Every magic grid, found by fixing `a, b, c, d, e` and solving the four
/// lines that then have one unknown, keeping grids whose other lines agree.
fn all_magic_grids(c: &Carrier) -> BTreeSet<[u64; 9]> {
    let q = c.order();
    let mut out = BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            for cc in 0..q {
                let t = c.add(c.add(a, b), cc);
                for d in 0..q {
                    let g = c.sub(c.sub(t, a), d);
                    for e in 0..q {
                        let f = c.sub(c.sub(t, d), e);
                        let h = c.sub(c.sub(t, b), e);
                        let i = c.sub(c.sub(t, cc), f);
                        let grid = Grid3::new([a, b, cc, d, e, f, g, h, i]);
                        if validate_square(&grid, c).unwrap().sums_equal_count == 8 {
                            out.insert(grid.cells);
                        }
                    }
                }
            }
        }
    }
    out
}

fn parametrized(c: &Carrier) -> BTreeSet<[u64; 9]> {
    let q = c.order();
    let mut out = BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            for k in 0..q {
                out.insert(magic_from_params(&ParamTriple { a, b, c: k }, c).cells);
            }
        }
    }
    out
}

#[test]
fn even_field_magic_squares_are_parametrized() {
    for q in [2u64, 4, 8, 16] {
        let c = Carrier::field(q).unwrap();
        let grids = all_magic_grids(&c);
        assert_eq!(grids, parametrized(&c), "F_{q}");
        assert_eq!(grids.len() as u64, q * q * q);
        for g in &grids {
            assert!(g.iter().collect::<BTreeSet<_>>().len() <= 4, "F_{q} {g:?}");
        }
    }
}

#[test]
fn odd_field_magic_squares_are_parametrized() {
    for q in [5u64, 7, 9, 11] {
        let c = Carrier::field(q).unwrap();
        assert_eq!(all_magic_grids(&c), parametrized(&c), "F_{q}");
    }
}

#[test]
fn prefilter_is_sound() {
    let mut ruled_out = 0;
    for q in field_orders(2, 1000) {
        if let Some(reason) = prefilter_field(q).unwrap() {
            let res = msos_field(q, AssignmentPolicy::Both).unwrap();
            assert!(
                res.tuples.is_empty(),
                "F_{q} ruled out by {reason} but has squares"
            );
            ruled_out += 1;
        }
    }
    assert!(ruled_out >= 10);
}

#[test]
fn parker_status_does_not_depend_on_policy() {
    for n in 2..=500u64 {
        let mut kinds = vec![StructureKind::Ring];
        if prime_power(n).is_some() {
            kinds.push(StructureKind::Field);
        }
        for kind in kinds {
            let canonical = msos(kind, n, AssignmentPolicy::Canonical).unwrap();
            let both = msos(kind, n, AssignmentPolicy::Both).unwrap();
            assert_eq!(canonical.parker, both.parker, "{kind} {n}");
            assert_eq!(
                canonical.dihedral_class_count, both.dihedral_class_count,
                "{kind} {n}"
            );
            assert!(both.tuple_count >= canonical.tuple_count);
        }
    }
}

#[test]
fn oracle_agrees_up_to_sixty() {
    for n in 2..=60u64 {
        let ring = Carrier::ring(n).unwrap();
        assert!(oracle_agreement(&ring).unwrap(), "Z/{n}Z");
        if prime_power(n).is_some() {
            let field = Carrier::field(n).unwrap();
            assert!(oracle_agreement(&field).unwrap(), "F_{n}");
        }
    }
}

#[test]
fn oracle_spot_checks_to_one_hundred() {
    for (kind, n) in [
        (StructureKind::Field, 61),
        (StructureKind::Field, 81),
        (StructureKind::Field, 89),
        (StructureKind::Ring, 74),
        (StructureKind::Ring, 87),
        (StructureKind::Ring, 100),
    ] {
        let c = parker::make_carrier(kind, n).unwrap();
        for policy in [AssignmentPolicy::Canonical, AssignmentPolicy::Both] {
            let cmp = compare_with_oracle(&c, policy).unwrap();
            assert!(cmp.agrees(), "{c} {policy}: {cmp:?}");
        }
    }
}

#[test]
fn search_is_deterministic() {
    for (kind, n) in [
        (StructureKind::Field, 193),
        (StructureKind::Ring, 202),
        (StructureKind::Field, 343),
    ] {
        let a = msos(kind, n, AssignmentPolicy::Canonical).unwrap();
        let b = msos(kind, n, AssignmentPolicy::Canonical).unwrap();
        assert_eq!(a.tuples, b.tuples);
    }
}

#[test]
fn encodings_round_trip_everywhere() {
    for n in 2..=300u64 {
        let mut carriers = vec![Carrier::ring(n).unwrap()];
        if prime_power(n).is_some() {
            carriers.push(Carrier::field(n).unwrap());
        }
        for c in carriers {
            for x in c.elements() {
                assert_eq!(c.encode(&c.decode(x)).unwrap(), x);
                assert_eq!(c.element_from_json(&c.element_to_json(x)).unwrap(), x);
            }
        }
    }
}
