//! The classical character table of `GL_2(F_p)`, used as an independent
//! check on the generic computation.
//!
//! Families: `U_a = a(det)` (degree 1), `V_a` (degree `p`), `W_{a,b}`
//! (degree `p + 1`, principal series) and `X_phi` (degree `p - 1`, cuspidal,
//! `phi` a character of `F_{p^2}^x` with `phi != phi^p`). All values lie in
//! `Q(zeta_{p^2 - 1})`.

use serde::{Deserialize, Serialize};

use super::group::FiniteGroupModel;
use super::table::CharacterTable;
use crate::arith::cyclotomic::RootSum;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleFamily {
    U(u64),
    V(u64),
    W(u64, u64),
    X(u64),
}

impl OracleFamily {
    pub fn degree(&self, p: u64) -> u64 {
        match self {
            OracleFamily::U(_) => 1,
            OracleFamily::V(_) => p,
            OracleFamily::W(..) => p + 1,
            OracleFamily::X(_) => p - 1,
        }
    }

    pub fn is_cuspidal(&self) -> bool {
        matches!(self, OracleFamily::X(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClassType {
    Central(u64),
    Unipotent(u64),
    Split(u64, u64),
    // an element of F_{p^2} \ F_p, by its discrete logarithm
    Elliptic(u64),
}

/// `F_{p^2}` as pairs `x0 + x1 t`, with `t^2 = n` (odd `p`) or `t^2 = t + 1` (`p = 2`).
struct Fp2 {
    p: u64,
    n: u64,
    // log[x0 * p + x1], for nonzero elements
    log: Vec<u64>,
}

impl Fp2 {
    fn new(p: u64) -> Self {
        let n = if p == 2 {
            1
        } else {
            (2..p)
                .find(|&a| (0..p).all(|x| x * x % p != a))
                .expect("a non-residue exists")
        };
        let mut f = Fp2 { p, n, log: vec![u64::MAX; (p * p) as usize] };
        let order = p * p - 1;
        for x0 in 0..p {
            for x1 in 0..p {
                if (x0, x1) == (0, 0) {
                    continue;
                }
                let g = (x0, x1);
                let mut x = (1, 0);
                let mut seen = Vec::with_capacity(order as usize);
                for _ in 0..order {
                    seen.push(x);
                    x = f.mul(x, g);
                    if x == (1, 0) {
                        break;
                    }
                }
                if seen.len() as u64 == order {
                    for (k, e) in seen.iter().enumerate() {
                        f.log[(e.0 * p + e.1) as usize] = k as u64;
                    }
                    return f;
                }
            }
        }
        unreachable!("F_p2^x is cyclic")
    }

    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        let cross = a.1 * b.1 % p;
        if p == 2 {
            // t^2 = t + 1
            ((a.0 * b.0 + cross) % p, (a.0 * b.1 + a.1 * b.0 + cross) % p)
        } else {
            ((a.0 * b.0 + cross * self.n) % p, (a.0 * b.1 + a.1 * b.0) % p)
        }
    }

    fn log(&self, a: (u64, u64)) -> u64 {
        self.log[(a.0 * self.p + a.1) as usize]
    }

    fn log_base(&self, a: u64) -> u64 {
        self.log((a % self.p, 0))
    }

    /// A root in `F_{p^2} \ F_p` of `x^2 - t x + d`.
    fn root(&self, t: u64, d: u64) -> Option<(u64, u64)> {
        let p = self.p;
        for x0 in 0..p {
            for x1 in 1..p {
                let z = (x0, x1);
                let z2 = self.mul(z, z);
                let lin = ((t * x0) % p, (t * x1) % p);
                let v = ((z2.0 + p - lin.0 + d) % p, (z2.1 + p - lin.1) % p);
                if v == (0, 0) {
                    return Some(z);
                }
            }
        }
        None
    }
}

fn classify_matrix(f: &Fp2, e: [u64; 4]) -> ClassType {
    let p = f.p;
    let [a, b, c, d] = e;
    if b == 0 && c == 0 && a == d {
        return ClassType::Central(a);
    }
    let t = (a + d) % p;
    let det = (a * d + p * p - b * c % p) % p;
    let roots: Vec<u64> = (0..p).filter(|&x| (x * x + p * p - t * x + det).is_multiple_of(p)).collect();
    match roots.as_slice() {
        [r] => ClassType::Unipotent(*r),
        [r, s] => ClassType::Split(*r, *s),
        [] => ClassType::Elliptic(f.log(f.root(t, det).expect("irreducible over F_p"))),
        _ => unreachable!(),
    }
}

/// The value of a family member at a class, as a root sum of order `p^2 - 1`.
fn oracle_value(p: u64, fam: OracleFamily, class: ClassType, f: &Fp2) -> RootSum {
    let n = p * p - 1;
    let mut r = RootSum::zero(n);
    let lg = |a: u64| f.log_base(a) as i64;
    match (fam, class) {
        (OracleFamily::U(i), ClassType::Central(a)) | (OracleFamily::U(i), ClassType::Unipotent(a)) => {
            r.add_term(2 * i as i64 * lg(a), 1)
        }
        (OracleFamily::U(i), ClassType::Split(a, b)) => r.add_term(i as i64 * (lg(a) + lg(b)), 1),
        (OracleFamily::U(i), ClassType::Elliptic(z)) => r.add_term(i as i64 * (p as i64 + 1) * z as i64, 1),
        (OracleFamily::V(i), ClassType::Central(a)) => r.add_term(2 * i as i64 * lg(a), p as i64),
        (OracleFamily::V(_), ClassType::Unipotent(_)) => {}
        (OracleFamily::V(i), ClassType::Split(a, b)) => r.add_term(i as i64 * (lg(a) + lg(b)), 1),
        (OracleFamily::V(i), ClassType::Elliptic(z)) => r.add_term(i as i64 * (p as i64 + 1) * z as i64, -1),
        (OracleFamily::W(i, j), ClassType::Central(a)) => r.add_term((i + j) as i64 * lg(a), p as i64 + 1),
        (OracleFamily::W(i, j), ClassType::Unipotent(a)) => r.add_term((i + j) as i64 * lg(a), 1),
        (OracleFamily::W(i, j), ClassType::Split(a, b)) => {
            r.add_term(i as i64 * lg(a) + j as i64 * lg(b), 1);
            r.add_term(i as i64 * lg(b) + j as i64 * lg(a), 1);
        }
        (OracleFamily::W(..), ClassType::Elliptic(_)) => {}
        (OracleFamily::X(k), ClassType::Central(a)) => r.add_term(k as i64 * lg(a), p as i64 - 1),
        (OracleFamily::X(k), ClassType::Unipotent(a)) => r.add_term(k as i64 * lg(a), -1),
        (OracleFamily::X(_), ClassType::Split(..)) => {}
        (OracleFamily::X(k), ClassType::Elliptic(z)) => {
            r.add_term(k as i64 * z as i64, -1);
            r.add_term(k as i64 * p as i64 * z as i64, -1);
        }
    }
    r
}

/// One representative per family member. Exponents of `U, V, W` index
/// characters of `F_p^x` through `zeta_{p^2-1}^{i log}` with `log` the
/// discrete logarithm in `F_{p^2}^x`, so `i` runs over `0..p-1`.
pub fn oracle_families(p: u64) -> Vec<OracleFamily> {
    let n = p * p - 1;
    let mut out = Vec::new();
    for i in 0..p - 1 {
        out.push(OracleFamily::U(i));
        out.push(OracleFamily::V(i));
        for j in i + 1..p - 1 {
            out.push(OracleFamily::W(i, j));
        }
    }
    for k in 0..n {
        let kp = k * p % n;
        if kp != k && k < kp {
            out.push(OracleFamily::X(k));
        }
    }
    out
}

/// Match the rows of a computed `GL_2(F_p)` table with the closed-form
/// characters. Returns the family of each row.
pub fn compare_with_oracle(g: &FiniteGroupModel, t: &CharacterTable) -> Result<Vec<OracleFamily>> {
    let case = g.case();
    if case.is_ramified() || case.m() != 1 {
        return Err(Error::InvalidInput(format!("the closed-form table covers GL_2(F_p) only, not {case}")));
    }
    let p = case.p();
    let f = Fp2::new(p);
    let fams = oracle_families(p);
    if fams.len() != t.rows.len() {
        return Err(Error::Invariant(format!(
            "{} closed-form characters for {} rows",
            fams.len(),
            t.rows.len()
        )));
    }
    let types: Vec<ClassType> = g
        .classes()
        .iter()
        .map(|c| {
            let e = g.elem(c.rep).e;
            classify_matrix(&f, [e[0] as u64, e[1] as u64, e[2] as u64, e[3] as u64])
        })
        .collect();
    let oracle_rows: Vec<Vec<RootSum>> = fams
        .iter()
        .map(|&fam| types.iter().map(|&ty| oracle_value(p, fam, ty, &f)).collect())
        .collect();
    let mut used = vec![false; fams.len()];
    let mut out = Vec::with_capacity(t.rows.len());
    for (ri, row) in t.rows.iter().enumerate() {
        let found = (0..fams.len()).find(|&o| {
            !used[o]
                && fams[o].degree(p) == row.dim
                && (0..types.len()).all(|k| t.value(ri, k).eq_value(&oracle_rows[o][k]))
        });
        match found {
            Some(o) => {
                used[o] = true;
                out.push(fams[o]);
            }
            None => {
                return Err(Error::Invariant(format!(
                    "row {ri} (degree {}) matches no closed-form character of GL_2(F_{p})",
                    row.dim
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::group::{GroupCase, DEFAULT_BUDGET};
    use super::super::table::character_table;
    use super::*;

    #[test]
    fn family_counts() {
        for p in [2u64, 3, 5, 7] {
            let fams = oracle_families(p);
            assert_eq!(fams.len() as u64, p * p - 1);
            let cusp = fams.iter().filter(|f| f.is_cuspidal()).count() as u64;
            assert_eq!(cusp, p * (p - 1) / 2);
            let sq: u64 = fams.iter().map(|f| f.degree(p).pow(2)).sum();
            assert_eq!(sq, p * (p * p - 1) * (p - 1));
        }
    }

    #[test]
    fn generic_tables_match_closed_form() {
        for p in [2u64, 3, 5] {
            let g = FiniteGroupModel::build(GroupCase::new(p, 1, false), DEFAULT_BUDGET).unwrap();
            let t = character_table(&g).unwrap();
            let fams = compare_with_oracle(&g, &t).unwrap();
            assert_eq!(fams.len(), t.rows.len());
        }
    }
}
