use cuspram::cusps::{
    atkin_lehner_on_cusp, canonical_cusp, cusp_count_formula, cusps_equivalent, cusps_of_level, enumerate_cusps,
    exact_divisors, reduce_level,
};
use proptest::prelude::*;

// PARI/GP mfnumcusps
const PARI_COUNTS: &[(u64, u64)] = &[(11, 2), (25, 6), (36, 12), (48, 12), (144, 24), (625, 30), (1296, 72), (20736, 288)];

// PARI/GP mfcusps, as (a, b) for a/b
const PARI_CUSPS_36: &[(i64, i64)] = &[
    (0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (1, 6), (5, 6), (1, 9), (1, 12), (5, 12), (1, 18), (1, 36),
];

#[test]
fn counts_match_pari() {
    for &(n, c) in PARI_COUNTS {
        assert_eq!(enumerate_cusps(n).unwrap().len() as u64, c, "N={n}");
        assert_eq!(cusp_count_formula(n), c);
    }
}

#[test]
fn classes_match_pari_list_for_36() {
    let ours = enumerate_cusps(36).unwrap();
    let mut hit = vec![false; ours.len()];
    for &(a, b) in PARI_CUSPS_36 {
        let c = canonical_cusp(a, b, 36).unwrap();
        let k = ours.iter().position(|x| *x == c).unwrap();
        assert!(!hit[k], "{a}/{b} collides");
        hit[k] = true;
    }
    assert!(hit.iter().all(|&h| h));
}

#[test]
fn level_25_of_625() {
    assert_eq!(cusps_of_level(625, 25).unwrap().len(), 20);
    assert_eq!(cusps_of_level(25, 5).unwrap().len(), 4);
}

#[test]
fn reduction_to_small_levels() {
    assert_eq!(reduce_level(144, 48).unwrap(), (16, 3));
    assert_eq!(reduce_level(144, 12).unwrap(), (1, 12));
    assert_eq!(reduce_level(20736, 144).unwrap().1, 144);
    assert_eq!(exact_divisors(144), vec![1, 9, 16, 144]);
}

#[test]
fn atkin_lehner_is_an_involution_on_classes() {
    for n in [36u64, 48, 144, 405] {
        for q in exact_divisors(n) {
            for c in enumerate_cusps(n).unwrap() {
                let w = atkin_lehner_on_cusp(q, &c).unwrap();
                assert_eq!(atkin_lehner_on_cusp(q, &w).unwrap(), c, "N={n} Q={q} {c}");
                let (_, delta) = reduce_level(n, c.level).unwrap();
                let (qq, _) = reduce_level(n, c.level).unwrap();
                assert_eq!(atkin_lehner_on_cusp(qq, &c).unwrap().level, delta);
            }
        }
    }
}

proptest! {
    #[test]
    fn canonical_class_is_equivalent_and_stable(n in 2u64..400, a in -500i64..500, b in 1i64..500) {
        prop_assume!(cuspram::arith::int::gcd_i64(a, b) == 1);
        let c = canonical_cusp(a, b, n).unwrap();
        prop_assert!(cusps_equivalent(a, b, c.a, c.b, n) || c.b == 0);
        prop_assert_eq!(canonical_cusp(c.a, c.b, n).unwrap(), c);
        prop_assert_eq!(c.level, cuspram::arith::int::gcd(b as u64, n));
    }

    #[test]
    fn translates_are_equivalent(n in 2u64..300, a in 0i64..100, b in 1i64..100, t in -20i64..20) {
        prop_assume!(cuspram::arith::int::gcd_i64(a, b) == 1);
        prop_assert_eq!(canonical_cusp(a + t * b, b, n).unwrap(), canonical_cusp(a, b, n).unwrap());
    }
}
