use cuspram::newform::CurveCoefficients;
use cuspram::ramification::{
    estimate_index, is_semistable_level, level_one_check, ramification_report, square_levels, CurveData,
    EstimateStatus, Method, RamificationConfig,
};

fn curve(label: &str, n: u64, a: [i64; 5]) -> CurveCoefficients {
    CurveCoefficients::new(label, n, a).unwrap()
}

#[test]
fn report_for_80b_matches_table_entry() {
    // 80b: e = 4 at d = 4
    let c = curve("80b", 80, [0, -1, 0, 4, -4]);
    let r = ramification_report(&c, &RamificationConfig::default()).unwrap();
    assert!(r.failures.is_empty(), "{:?}", r.failures);
    assert_eq!(r.ramified_levels(), vec![(4, 4)]);
    let half = r.rows.iter().find(|x| x.d == 2).unwrap();
    assert_eq!(half.method, Method::HalfShortcut);
    assert_eq!(half.e, 1);
}

#[test]
fn squarefree_level_is_unramified() {
    let c = curve("11a", 11, [0, -1, 1, -10, -20]);
    assert!(is_semistable_level(11));
    let est = level_one_check(&c, &RamificationConfig::default()).unwrap();
    assert_eq!(est.status, EstimateStatus::Accepted);
    assert_eq!(est.e, 1);
    let r = ramification_report(&c, &RamificationConfig::default()).unwrap();
    assert!(r.rows.iter().all(|x| x.e == 1));
}

#[test]
fn level_three_of_162b() {
    // 162b has e = 3 at d = 9
    let c = curve("162b", 162, [1, -1, 1, -5, 5]);
    let mut data = CurveData::new(c, 1).unwrap();
    let est = estimate_index(&mut data, 9, 1, &RamificationConfig::default()).unwrap();
    assert_eq!(est.e, 3);
    assert!(est.residual < 0.1);
    assert_eq!(square_levels(162), vec![3, 9]);
}
