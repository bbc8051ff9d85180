use cuspram::newform::{an_table, conductor_consistent, parse_curve_file, CurveCoefficients};

// PARI/GP ellan(E, 30) on the Cremona models
const PARI_AN: &[(&str, u64, [i64; 5], [i64; 30])] = &[
    ("11a1", 11, [0, -1, 1, -10, -20], [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4, -1, -4, -2, 4, 0, 2, 2, -2, -1, 0, -4, -8, 5, -4, 0, 2]),
    ("37a1", 37, [0, 0, 1, -1, 0], [1, -2, -3, 2, -2, 6, -1, 0, 6, 4, -5, -6, -2, 2, 6, -4, 0, -12, 0, -4, 3, 10, 2, 0, -1, 4, -9, -2, 6, -12]),
    ("48a1", 48, [0, 1, 0, -4, -4], [1, 0, 1, 0, -2, 0, 0, 0, 1, 0, -4, 0, -2, 0, -2, 0, 2, 0, 4, 0, 0, 0, 8, 0, -1, 0, 1, 0, 6, 0]),
    ("1296c1", 1296, [0, 0, 0, -3, 1], [1, 0, 0, 0, -1, 0, 3, 0, 0, 0, -5, 0, -5, 0, 0, 0, -2, 0, 4, 0, 0, 0, 1, 0, -4, 0, 0, 0, -9, 0]),
    ("20736c1", 20736, [0, 0, 0, 6, 8], [1, 0, 0, 0, 2, 0, -4, 0, 0, 0, 3, 0, 2, 0, 0, 0, 5, 0, 1, 0, 0, 0, -2, 0, -1, 0, 0, 0, 0, 0]),
];

// PARI/GP ellap at large primes, where point counting takes the fast path
const PARI_AP: &[(&str, [(u64, i64); 3])] = &[
    ("11a1", [(10007, 18), (100003, -556), (1299709, 1955)]),
    ("37a1", [(10007, 66), (100003, -194), (1299709, 1045)]),
    ("48a1", [(10007, -104), (100003, -524), (1299709, 1966)]),
    ("1296c1", [(10007, -112), (100003, -23), (1299709, 634)]),
    ("20736c1", [(10007, 184), (100003, 220), (1299709, 524)]),
];

fn curve(label: &str) -> CurveCoefficients {
    let (l, n, a, _) = PARI_AN.iter().find(|c| c.0 == label).unwrap();
    CurveCoefficients::new(l, *n, *a).unwrap()
}

#[test]
fn first_coefficients_match_pari() {
    for (label, _, _, an) in PARI_AN {
        let t = an_table(&curve(label), 30).unwrap();
        for n in 1..=30 {
            assert_eq!(t.get(n), an[n - 1], "{label} a_{n}");
        }
    }
}

#[test]
fn large_primes_match_pari() {
    for (label, aps) in PARI_AP {
        let c = curve(label);
        for &(p, ap) in aps {
            assert_eq!(c.a_p(p).unwrap(), ap, "{label} a_{p}");
        }
    }
}

#[test]
fn hasse_bound_and_multiplicativity() {
    let c = curve("37a1");
    let t = an_table(&c, 2000).unwrap();
    for p in cuspram::arith::int::primes_up_to(2000) {
        let ap = t.get(p as usize) as f64;
        assert!(ap.abs() <= 2.0 * (p as f64).sqrt());
    }
    for (m, n) in [(4usize, 9usize), (7, 11), (25, 8), (13, 100)] {
        assert_eq!(t.get(m * n), t.get(m) * t.get(n));
    }
}

#[test]
fn bundled_style_file_parses_and_is_consistent() {
    let text = "# label N a1 a2 a3 a4 a6\n11a 11 0 -1 1 -10 -20\n48a 48 0 1 0 -4 -4\n";
    let cs = parse_curve_file(text).unwrap();
    assert_eq!(cs.len(), 2);
    assert!(cs.iter().all(conductor_consistent));
    let wrong = CurveCoefficients::new("x", 13, [0, -1, 1, -10, -20]).unwrap();
    assert!(!conductor_consistent(&wrong));
}
