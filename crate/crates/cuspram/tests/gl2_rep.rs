use cuspram::gl2::oracle::{compare_with_oracle, oracle_families};
use cuspram::gl2::serial::{cache_path, load, save, table_with_cache};
use cuspram::gl2::{character_table, classify_irreps, FiniteGroupModel, GroupCase, DEFAULT_BUDGET};
use cuspram::error::Error;

fn build(p: u64, m: u32, ram: bool) -> FiniteGroupModel {
    FiniteGroupModel::build(GroupCase::new(p, m, ram), DEFAULT_BUDGET).unwrap()
}

#[test]
fn gl2_f7_matches_closed_form() {
    let g = build(7, 1, false);
    let t = character_table(&g).unwrap();
    let fams = compare_with_oracle(&g, &t).unwrap();
    assert_eq!(fams.len(), oracle_families(7).len());
    let c = classify_irreps(&g, &t).unwrap();
    let cusp: Vec<_> = c.iter().filter(|x| x.cuspidal).collect();
    assert_eq!(cusp.len(), 21);
    assert!(cusp.iter().all(|x| x.dim == 6));
}

#[test]
fn orders_and_class_numbers() {
    // |GL_2(Z/p^m)| = p^(4m-3) (p^2 - 1)(p - 1); class number of GL_2(F_p) is p^2 - 1
    for (p, m, order, classes) in [(2u64, 1u32, 6u64, 3usize), (3, 1, 48, 8), (5, 1, 480, 24), (2, 2, 96, 14), (3, 2, 3888, 78)] {
        let g = build(p, m, false);
        assert_eq!(g.order(), order);
        assert_eq!(g.classes().len(), classes);
        let t = character_table(&g).unwrap();
        assert_eq!(t.rows.len(), classes);
        let sq: u64 = t.rows.iter().map(|r| r.dim * r.dim).sum();
        assert_eq!(sq, order);
    }
}

#[test]
fn ramified_groups_have_cuspidals_of_full_conductor() {
    for (p, m) in [(2u64, 1u32), (3, 1), (2, 2), (3, 2)] {
        let g = build(p, m, true);
        let t = character_table(&g).unwrap();
        let c = classify_irreps(&g, &t).unwrap();
        let cusp: Vec<_> = c.iter().filter(|x| x.cuspidal).collect();
        assert!(!cusp.is_empty(), "({p},{m})");
        for x in cusp {
            assert_eq!(x.dim, (p - 1) * p.pow(m - 1));
            assert_eq!(x.conductor, 2 * m);
        }
    }
}

#[test]
fn budget_is_enforced() {
    let r = FiniteGroupModel::build(GroupCase::new(7, 2, false), DEFAULT_BUDGET);
    assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    assert!(FiniteGroupModel::build(GroupCase::new(4, 1, false), DEFAULT_BUDGET).is_err());
}

#[test]
fn cache_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let g = build(3, 1, true);
    let fresh = table_with_cache(&g, Some(dir.path())).unwrap();
    let path = cache_path(dir.path(), g.case());
    assert!(path.exists());
    assert_eq!(load(dir.path(), &g).unwrap(), fresh);

    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let rows = v["table"]["rows"].as_array_mut().unwrap();
    let last = rows.len() - 1;
    rows.swap(0, last);
    rows[0]["values"][0] = rows[last]["values"][0].clone();
    std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    assert!(load(dir.path(), &g).is_err());
    // the cache is rebuilt and rewritten
    assert_eq!(table_with_cache(&g, Some(dir.path())).unwrap(), fresh);
    save(dir.path(), &g, &fresh).unwrap();
}
