use cuspram::arith::int::euler_phi;
use cuspram::characters::{
    build_s_sets, build_s_tilde, crt_gauss_factorization, enumerate_characters, gauss_sum, local_gauss_sum,
    primitive_characters, verify_crt_factorization_up_to, verify_gauss_norms, AdditiveCharacter,
};
use cuspram::arith::CyclotomicNumber;

#[test]
fn gauss_norms_up_to_40() {
    assert!(verify_gauss_norms(40).unwrap() > 0);
}

#[test]
fn crt_factorization_up_to_30() {
    assert!(verify_crt_factorization_up_to(30).unwrap() > 0);
}

#[test]
fn character_counts() {
    for m in [1u64, 7, 8, 12, 25, 27, 60] {
        assert_eq!(enumerate_characters(m).len() as u64, euler_phi(m));
    }
    // primitive characters: multiplicative with f(p) = p - 2, f(p^k) = p^k (1 - 1/p)^2
    assert_eq!(primitive_characters(25).len(), 16);
    assert_eq!(primitive_characters(8).len(), 2);
    assert_eq!(primitive_characters(4).len(), 1);
    assert_eq!(primitive_characters(2).len(), 0);
    assert_eq!(primitive_characters(15).len(), 3);
    assert_eq!(build_s_tilde(5, 1).unwrap().members.len(), 4);
    assert_eq!(build_s_tilde(5, 2).unwrap().members.len(), 16);
}

#[test]
fn s_sets_for_small_levels() {
    // d = 12: f in {3 (d/f = 4, not squarefree)...}; admissible f are 4 and 12
    let (sp, s) = build_s_sets(12);
    assert_eq!(sp.members.len(), s.members.len());
    assert!(s.members.iter().all(|c| c.modulus() == 12));
    let conductors: Vec<u64> = sp.members.iter().map(|c| c.conductor()).collect();
    assert!(conductors.iter().all(|f| [4, 12].contains(f)), "{conductors:?}");
}

#[test]
fn quadratic_gauss_sum_mod_5() {
    let chi = primitive_characters(5).into_iter().find(|c| c.order() == 2).unwrap();
    let g = gauss_sum(&chi);
    assert_eq!(g.mul(&g), CyclotomicNumber::from_integer(5, 1).coerce(g.order()).unwrap());
}

#[test]
fn local_gauss_sum_rejects_high_level() {
    let chi = primitive_characters(5).remove(0);
    let psi = AdditiveCharacter::new(5, 2, 1).unwrap();
    assert!(local_gauss_sum(&chi, &psi).is_err());
    assert!(AdditiveCharacter::new(5, 1, 10).is_err());
}

#[test]
fn crt_split_of_25() {
    for n in [1i64, 2, 7, 24] {
        let s = crt_gauss_factorization(25, n).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].1.unit as i64 * n).rem_euclid(25), 1);
    }
    assert!(crt_gauss_factorization(25, 5).is_err());
}
