//! Classification of irreducible characters: strong cuspidality, conductor,
//! central character, twist-minimality and character field.

use serde::{Deserialize, Serialize};

use super::group::FiniteGroupModel;
use super::table::{galois_stabilizer, stabilizer_conductor, CharacterRow, CharacterTable};
use crate::arith::cyclotomic::RootSum;
use crate::arith::int::{euler_phi, fundamental_discriminants_dividing, kronecker, lcm, squarefree_part};
use crate::characters::{enumerate_characters, UnitGroup};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterField {
    pub degree: u64,
    /// Least `f` with the field inside `Q(zeta_f)`.
    pub conductor: u64,
    pub name: String,
}

impl CharacterField {
    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepData {
    pub index: usize,
    pub dim: u64,
    pub conductor: u32,
    pub cuspidal: bool,
    pub central_trivial: bool,
    pub twist_minimal: bool,
    pub field: CharacterField,
}

pub struct Classifier<'a> {
    g: &'a FiniteGroupModel,
    t: &'a CharacterTable,
    filtration: Vec<Vec<bool>>,
    scalars: Vec<usize>,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

impl<'a> Classifier<'a> {
    pub fn new(g: &'a FiniteGroupModel, t: &'a CharacterTable) -> Self {
        let top = g.case().filtration_top();
        let q = g.modulus();
        let filtration = (1..=top).map(|r| g.filtration_classes(r)).collect();
        let scalars = UnitGroup::get(q)
            .units()
            .map(|z| g.class_of(g.scalar(z)) as usize)
            .collect();
        let upper = (0..q).map(|b| g.class_of(g.upper_unipotent(b)) as usize).collect();
        let lower = (0..q).map(|b| g.class_of(g.lower_unipotent(b)) as usize).collect();
        Classifier {
            g,
            t,
            filtration,
            scalars,
            upper,
            lower,
        }
    }

    /// Least `r >= 1` with the character trivial on the image of `K_r`.
    pub fn conductor(&self, row: &CharacterRow) -> u32 {
        for (i, members) in self.filtration.iter().enumerate() {
            let trivial = members
                .iter()
                .enumerate()
                .all(|(k, &inside)| !inside || row.is_trivial_at(k));
            if trivial {
                return i as u32 + 1;
            }
        }
        unreachable!("the top of the filtration is the trivial subgroup")
    }

    pub fn central_trivial(&self, row: &CharacterRow) -> bool {
        self.scalars.iter().all(|&k| row.is_trivial_at(k))
    }

    /// Whether each scalar acts through a single eigenvalue (a central character).
    pub fn has_central_character(&self, row: &CharacterRow) -> bool {
        self.scalars.iter().all(|&k| row.values[k].len() == 1)
    }

    /// `<Res_U chi, psi_u>` for every `u mod q`, times `q`, as exact root sums.
    fn unipotent_pairings(&self, row: &CharacterRow, classes: &[usize]) -> Vec<RootSum> {
        let q = self.g.modulus();
        let big = lcm(self.t.exponent, q);
        let vals: Vec<RootSum> = classes
            .iter()
            .map(|&k| row.value_in(k, self.t.class_orders[k], big))
            .collect();
        let step = (big / q) as i64;
        (0..q)
            .map(|u| {
                let mut s = RootSum::zero(big);
                for (b, v) in vals.iter().enumerate() {
                    s.add_assign(&v.rotate(-(u as i64 * b as i64 * step)));
                }
                s
            })
            .collect()
    }

    fn multiplicity_one_on(&self, row: &CharacterRow, classes: &[usize]) -> bool {
        let q = self.g.modulus();
        let p = self.g.case().p();
        self.unipotent_pairings(row, classes)
            .into_iter()
            .enumerate()
            .all(|(u, s)| {
                let want = if !(u as u64).is_multiple_of(p) { q as i64 } else { 0 };
                let mut d = s;
                d.add_term(0, -want);
                d.is_zero()
            })
    }

    /// Restriction to the upper unipotent subgroup (and the lower one `[[1,0],[pZ,1]]`
    /// in the ramified case) is the multiplicity-one sum of the primitive
    /// additive characters mod `p^m`.
    pub fn strongly_cuspidal(&self, row: &CharacterRow) -> bool {
        if row.dim != euler_phi(self.g.modulus()) {
            return false;
        }
        if !self.multiplicity_one_on(row, &self.upper) {
            return false;
        }
        !self.g.case().is_ramified() || self.multiplicity_one_on(row, &self.lower)
    }

    pub fn twist_minimal(&self, row: &CharacterRow) -> Result<bool> {
        let r = self.conductor(row);
        for eta in enumerate_characters(self.g.modulus()) {
            if self.conductor(&row.twist(self.g, &eta)?) < r {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn field(&self, row: &CharacterRow) -> CharacterField {
        let e = self.t.exponent;
        let stab = galois_stabilizer(row, self.t);
        let degree = euler_phi(e) / stab.len() as u64;
        let conductor = stabilizer_conductor(e, &stab);
        let name = match degree {
            1 => "Q".to_string(),
            2 => fundamental_discriminants_dividing(conductor)
                .into_iter()
                .find(|&d| stab.iter().all(|&s| kronecker(d, s) == 1))
                .map(|d| format!("Q(sqrt({}))", squarefree_part(d)))
                .unwrap_or_else(|| format!("quadratic in Q(zeta_{conductor})")),
            _ => format!("degree {degree} in Q(zeta_{conductor})"),
        };
        CharacterField {
            degree,
            conductor,
            name,
        }
    }

    pub fn classify(&self, index: usize) -> Result<IrrepData> {
        let row = &self.t.rows[index];
        let cuspidal = self.strongly_cuspidal(row);
        Ok(IrrepData {
            index,
            dim: row.dim,
            conductor: self.conductor(row),
            cuspidal,
            central_trivial: self.central_trivial(row),
            twist_minimal: self.twist_minimal(row)?,
            field: self.field(row),
        })
    }
}

pub fn classify_irreps(g: &FiniteGroupModel, t: &CharacterTable) -> Result<Vec<IrrepData>> {
    let c = Classifier::new(g, t);
    (0..t.rows.len()).map(|i| c.classify(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::group::{GroupCase, DEFAULT_BUDGET};
    use super::super::oracle::compare_with_oracle;
    use super::super::table::character_table;
    use super::*;

    fn classified(p: u64, m: u32, ram: bool) -> (FiniteGroupModel, CharacterTable, Vec<IrrepData>) {
        let g = FiniteGroupModel::build(GroupCase::new(p, m, ram), DEFAULT_BUDGET).unwrap();
        let t = character_table(&g).unwrap();
        let c = classify_irreps(&g, &t).unwrap();
        (g, t, c)
    }

    #[test]
    fn cuspidal_count_over_prime_fields() {
        for p in [2u64, 3, 5] {
            let (g, t, c) = classified(p, 1, false);
            let fams = compare_with_oracle(&g, &t).unwrap();
            let cusp: Vec<&IrrepData> = c.iter().filter(|x| x.cuspidal).collect();
            assert_eq!(cusp.len() as u64, p * (p - 1) / 2);
            assert!(cusp.iter().all(|x| x.dim == p - 1));
            for (x, f) in c.iter().zip(&fams) {
                assert_eq!(x.cuspidal, f.is_cuspidal(), "p={p}: {f:?}");
            }
        }
    }

    #[test]
    fn gl2_f3_classification() {
        let (_, _, c) = classified(3, 1, false);
        let cusp: Vec<&IrrepData> = c.iter().filter(|x| x.cuspidal).collect();
        assert_eq!(cusp.len(), 3);
        // the cuspidal characters of GL_2(F_3): one rational with trivial
        // central character, and a pair over Q(sqrt(-2))
        let names: Vec<&str> = cusp.iter().map(|x| x.field.name.as_str()).collect();
        assert_eq!(names.iter().filter(|n| **n == "Q").count(), 1);
        assert_eq!(names.iter().filter(|n| **n == "Q(sqrt(-2))").count(), 2);
        assert!(c.iter().all(|x| x.conductor == 1));
    }

    #[test]
    fn central_characters_exist_and_conductors_are_bounded() {
        let (g, t, c) = classified(2, 2, false);
        let cl = Classifier::new(&g, &t);
        for (x, row) in c.iter().zip(&t.rows) {
            assert!(cl.has_central_character(row));
            assert!(x.conductor >= 1 && x.conductor <= 2);
            if x.cuspidal {
                assert_eq!(x.dim, 2);
            }
        }
    }

    #[test]
    fn ramified_cuspidals() {
        let (_, _, c) = classified(3, 1, true);
        let cusp: Vec<&IrrepData> = c.iter().filter(|x| x.cuspidal).collect();
        assert!(!cusp.is_empty());
        assert!(cusp.iter().all(|x| x.dim == 2 && x.conductor == 2));
    }
}
