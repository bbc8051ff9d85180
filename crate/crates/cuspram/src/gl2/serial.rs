//! JSON layout for cached character tables.
//!
//! ```text
//! { "format": 1,
//!   "case": {"kind": "unramified", "p": 5, "m": 2},
//!   "order": 300000,
//!   "classes": [{"matrix": [j, a, b, c, d], "size": 1, "order": 1}, ...],
//!   "table": {"exponent": 600, "class_orders": [...],
//!             "rows": [{"dim": 1, "values": [[[j, mult], ...], ...]}, ...]} }
//! ```
//!
//! `matrix` is the class representative `c^j [[a, b], [c, d]]` with integer
//! entries. A row value `[[j, m], ...]` at a class of order `o` stands for
//! `sum m zeta_o^j`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::group::{FiniteGroupModel, GroupCase};
use super::table::{character_table, CharacterTable};
use crate::error::{Error, Result};

pub const FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedClass {
    pub matrix: [i64; 5],
    pub size: u64,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCache {
    pub format: u32,
    pub case: GroupCase,
    pub order: u64,
    pub classes: Vec<CachedClass>,
    pub table: CharacterTable,
}

fn classes_of(g: &FiniteGroupModel) -> Vec<CachedClass> {
    g.classes()
        .iter()
        .map(|c| CachedClass {
            matrix: g.matrix_of(c.rep),
            size: c.size,
            order: c.order,
        })
        .collect()
}

impl TableCache {
    pub fn new(g: &FiniteGroupModel, t: &CharacterTable) -> Self {
        TableCache {
            format: FORMAT,
            case: g.case(),
            order: g.order(),
            classes: classes_of(g),
            table: t.clone(),
        }
    }

    /// The cached table, if it describes this group; re-verified before use.
    pub fn into_table(self, g: &FiniteGroupModel) -> Result<CharacterTable> {
        if self.format != FORMAT || self.case != g.case() || self.classes != classes_of(g) {
            return Err(Error::InvalidInput(format!("cache does not describe {}", g.case())));
        }
        self.table.verify(g)?;
        Ok(self.table)
    }
}

pub fn cache_path(dir: &Path, case: GroupCase) -> PathBuf {
    let kind = if case.is_ramified() { "r" } else { "u" };
    dir.join(format!("gl2_{kind}_{}_{}.json", case.p(), case.m()))
}

pub fn save(dir: &Path, g: &FiniteGroupModel, t: &CharacterTable) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, g.case());
    fs::write(&path, serde_json::to_vec(&TableCache::new(g, t))?)?;
    Ok(path)
}

pub fn load(dir: &Path, g: &FiniteGroupModel) -> Result<CharacterTable> {
    let text = fs::read(cache_path(dir, g.case()))?;
    let cache: TableCache = serde_json::from_slice(&text)?;
    cache.into_table(g)
}

/// Load from `dir` when a valid cache exists, else compute and store.
pub fn table_with_cache(g: &FiniteGroupModel, dir: Option<&Path>) -> Result<CharacterTable> {
    let Some(dir) = dir else {
        return character_table(g);
    };
    if let Ok(t) = load(dir, g) {
        return Ok(t);
    }
    let t = character_table(g)?;
    save(dir, g, &t)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::group::DEFAULT_BUDGET;
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let g = FiniteGroupModel::build(GroupCase::new(3, 1, true), DEFAULT_BUDGET).unwrap();
        let t = table_with_cache(&g, Some(dir.path())).unwrap();
        assert!(cache_path(dir.path(), g.case()).exists());
        let again = load(dir.path(), &g).unwrap();
        assert_eq!(t, again);
        let other = FiniteGroupModel::build(GroupCase::new(3, 1, false), DEFAULT_BUDGET).unwrap();
        let wrong: TableCache = serde_json::from_slice(&fs::read(cache_path(dir.path(), g.case())).unwrap()).unwrap();
        assert!(wrong.into_table(&other).is_err());
    }
}
