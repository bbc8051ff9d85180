use cuspram::arith::int::gcd;
use cuspram::arith::modp::{prime_one_mod, Fp};
use cuspram::arith::{BigFloat, ComplexBig, CyclotomicNumber, RootSum};
use proptest::prelude::*;

fn root_sum(order: u64, coeffs: &[i64]) -> RootSum {
    let mut r = RootSum::zero(order);
    for (j, &c) in coeffs.iter().enumerate() {
        r.add_term(j as i64, c);
    }
    r
}

#[test]
fn sum_of_all_roots_vanishes() {
    for n in 2..40u64 {
        assert!(root_sum(n, &vec![1; n as usize]).is_zero(), "n={n}");
    }
}

#[test]
fn sum_of_primitive_roots_is_mobius() {
    for (n, mu) in [(1u64, 1i64), (2, -1), (6, 1), (12, 0), (30, -1), (9, 0), (35, 1)] {
        let mut r = RootSum::zero(n);
        for j in (0..n).filter(|&j| gcd(j, n) == 1) {
            r.add_term(j as i64, 1);
        }
        assert_eq!(r.to_integer(), Some(mu), "n={n}");
    }
}

#[test]
fn quadratic_gauss_sum_squares_to_p_star() {
    for p in [3u64, 5, 7, 11, 13] {
        let mut g = RootSum::zero(p);
        for x in 0..p {
            g.add_term((x * x % p) as i64, 1);
        }
        let sq = g.mul(&g).to_cyclotomic();
        let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        assert_eq!(sq, CyclotomicNumber::from_integer(star, p));
    }
}

#[test]
fn embedding_has_requested_precision() {
    let z = CyclotomicNumber::zeta(7);
    let w = z.to_complex(256);
    let one = w.norm_sqr().sub(&BigFloat::one(256));
    assert!(one.is_zero() || one.log2_abs() < -240.0);
    let direct = ComplexBig::root_of_unity(1, 7, 256);
    assert!(w.sub(&direct).abs().log2_abs() < -240.0);
}

#[test]
fn primes_one_mod_and_roots_of_unity() {
    for e in [12u64, 600, 2520] {
        let l = prime_one_mod(e, 1 << 30);
        assert_eq!(l % e, 1);
        let f = Fp::new(l);
        let w = f.root_of_unity(e);
        assert_eq!(f.pow(w, e), 1);
        for q in [2u64, 3, 5, 7].into_iter().filter(|q| e % q == 0) {
            assert_ne!(f.pow(w, e / q), 1);
        }
    }
}

proptest! {
    #[test]
    fn galois_action_is_a_ring_map(
        a in prop::collection::vec(-5i64..5, 12),
        b in prop::collection::vec(-5i64..5, 12),
        s in prop::sample::select(vec![1i64, 5, 7, 11]),
    ) {
        let (x, y) = (root_sum(12, &a), root_sum(12, &b));
        prop_assert!(x.mul(&y).galois(s).eq_value(&x.galois(s).mul(&y.galois(s))));
        prop_assert!(x.add(&y).galois(s).eq_value(&x.galois(s).add(&y.galois(s))));
        let cx = x.to_cyclotomic();
        prop_assert_eq!(cx.galois(s).unwrap(), x.galois(s).to_cyclotomic());
    }

    #[test]
    fn canonical_form_decides_equality(a in prop::collection::vec(-4i64..4, 15), shift in 0i64..15) {
        // adding a multiple of 1 + z^5 + z^10 (zero in Q(zeta_15)) does not change the value
        let x = root_sum(15, &a);
        let mut y = x.clone();
        for k in [0, 5, 10] {
            y.add_term(k + shift, 3);
        }
        prop_assert!(x.eq_value(&y));
        prop_assert_eq!(x.to_cyclotomic(), y.to_cyclotomic());
    }

    #[test]
    fn field_norm_is_a_nonnegative_rational(a in prop::collection::vec(-3i64..3, 8)) {
        let x = root_sum(8, &a).to_cyclotomic();
        let real = x.mul(&x.conj());
        prop_assert_eq!(real.conj(), real.clone());
        let mut n = CyclotomicNumber::one(8);
        for k in [1i64, 3, 5, 7] {
            n = n.mul(&x.galois(k).unwrap());
        }
        let q = n.to_rational();
        prop_assert!(q.is_some());
        prop_assert!(*q.unwrap().numer() >= 0.into());
    }
}
