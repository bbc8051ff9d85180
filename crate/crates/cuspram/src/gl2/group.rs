//! Enumerated quotient groups: `GL_2(Z/p^m)` and the ramified quotient
//! `<c> K_0 / <c^2> K_{2m}` with `c = [[0, -p^-m], [p^(1-m), 0]]`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::int::{euler_phi, inv_mod, is_prime};
use crate::characters::UnitGroup;
use crate::error::{Error, Result};

/// Default cap on the number of enumerated elements.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupCase {
    Unramified { p: u64, m: u32 },
    Ramified { p: u64, m: u32 },
}

impl GroupCase {
    pub fn new(p: u64, m: u32, ramified: bool) -> Self {
        if ramified {
            GroupCase::Ramified { p, m }
        } else {
            GroupCase::Unramified { p, m }
        }
    }

    pub fn p(&self) -> u64 {
        match *self {
            GroupCase::Unramified { p, .. } | GroupCase::Ramified { p, .. } => p,
        }
    }

    pub fn m(&self) -> u32 {
        match *self {
            GroupCase::Unramified { m, .. } | GroupCase::Ramified { m, .. } => m,
        }
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self, GroupCase::Ramified { .. })
    }

    /// `p^m`, the modulus of the matrix entries.
    pub fn q(&self) -> u64 {
        self.p().pow(self.m())
    }

    /// Expected order, from the closed formulas.
    pub fn order(&self) -> u64 {
        let (p, m) = (self.p(), self.m());
        let q = self.q();
        if self.is_ramified() {
            2 * q * q * euler_phi(q) * euler_phi(q)
        } else {
            p.pow(4 * (m - 1)) * (p * p - 1) * (p * p - p)
        }
    }

    /// Index `r` with `K_r` the kernel of the quotient: `m` unramified, `2m` ramified.
    pub fn filtration_top(&self) -> u32 {
        if self.is_ramified() {
            2 * self.m()
        } else {
            self.m()
        }
    }

    pub fn check(&self, budget: u64) -> Result<()> {
        let (p, m) = (self.p(), self.m());
        if !is_prime(p) || m == 0 {
            return Err(Error::InvalidInput(format!("need a prime p and m >= 1, got p={p}, m={m}")));
        }
        if self.q() > 255 {
            return Err(Error::InvalidInput(format!("p^m = {} is too large for this model", self.q())));
        }
        let order = self.order();
        if order > budget {
            return Err(Error::BudgetExceeded { order, budget });
        }
        Ok(())
    }
}

impl fmt::Display for GroupCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_ramified() { "ramified" } else { "unramified" };
        write!(f, "{kind}({},{})", self.p(), self.m())
    }
}

/// `j` is the power of `c` (always 0 unramified); `e = (a, b, c, d)` are the
/// entries mod `p^m`. In the ramified case `e = (alpha, beta, gamma, delta)`
/// stands for `[[alpha, beta], [p gamma, delta]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Elem {
    pub j: u8,
    pub e: [u8; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjClass {
    pub rep: u32,
    pub size: u64,
    pub order: u32,
}

pub struct FiniteGroupModel {
    case: GroupCase,
    p: u32,
    q: u32,
    mul_q: Vec<u8>,
    inv_q: Vec<u8>,
    elems: Vec<Elem>,
    index: Vec<u32>,
    inverse: Vec<u32>,
    classes: Vec<ConjClass>,
    class_of: Vec<u32>,
    generators: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl FiniteGroupModel {
    /// Enumerate the group, check closure and associativity on random
    /// triples, and split it into conjugacy classes.
    pub fn build(case: GroupCase, budget: u64) -> Result<Self> {
        case.check(budget)?;
        let q = case.q() as u32;
        let p = case.p() as u32;
        let mut mul_q = vec![0u8; (q * q) as usize];
        let mut inv_q = vec![0u8; q as usize];
        for x in 0..q {
            for y in 0..q {
                mul_q[(x * q + y) as usize] = (x * y % q) as u8;
            }
            if x % p != 0 {
                inv_q[x as usize] = inv_mod(x as i64, q as u64).unwrap() as u8;
            }
        }
        let cosets = if case.is_ramified() { 2 } else { 1 };
        let mut g = FiniteGroupModel {
            case,
            p,
            q,
            mul_q,
            inv_q,
            elems: Vec::new(),
            index: vec![NONE; cosets * (q as usize).pow(4)],
            inverse: Vec::new(),
            classes: Vec::new(),
            class_of: Vec::new(),
            generators: Vec::new(),
        };
        g.enumerate();
        if g.elems.len() as u64 != case.order() {
            return Err(Error::Invariant(format!(
                "{case}: enumerated {} elements, expected {}",
                g.elems.len(),
                case.order()
            )));
        }
        g.inverse = (0..g.elems.len())
            .map(|i| g.id(g.invert_elem(g.elems[i])))
            .collect();
        for (i, &v) in g.inverse.iter().enumerate() {
            if g.mul(i as u32, v) != 0 {
                return Err(Error::Invariant(format!("{case}: bad inverse of element {i}")));
            }
        }
        g.generators = g.make_generators();
        g.check_generation()?;
        g.check_associativity(2000)?;
        g.split_classes();
        Ok(g)
    }

    fn enumerate(&mut self) {
        let q = self.q as u8;
        let p = self.p as u8;
        let id = Elem { j: 0, e: [1, 0, 0, 1] };
        self.push(id);
        let cosets = if self.case.is_ramified() { 2 } else { 1 };
        for j in 0..cosets {
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        for d in 0..q {
                            let e = Elem { j, e: [a, b, c, d] };
                            if e == id {
                                continue;
                            }
                            let ok = if self.case.is_ramified() {
                                a % p != 0 && d % p != 0
                            } else {
                                !self.det_raw(&e.e).is_multiple_of(self.p)
                            };
                            if ok {
                                self.push(e);
                            }
                        }
                    }
                }
            }
        }
    }

    fn push(&mut self, e: Elem) {
        let c = self.code(e);
        self.index[c] = self.elems.len() as u32;
        self.elems.push(e);
    }

    #[inline]
    fn code(&self, x: Elem) -> usize {
        let q = self.q as usize;
        let [a, b, c, d] = x.e;
        (((x.j as usize * q + a as usize) * q + b as usize) * q + c as usize) * q + d as usize
    }

    #[inline]
    fn m(&self, x: u8, y: u8) -> u8 {
        self.mul_q[x as usize * self.q as usize + y as usize]
    }

    #[inline]
    fn ad(&self, x: u8, y: u8) -> u8 {
        let s = x as u32 + y as u32;
        (if s >= self.q { s - self.q } else { s }) as u8
    }

    #[inline]
    fn ng(&self, x: u8) -> u8 {
        if x == 0 {
            0
        } else {
            (self.q - x as u32) as u8
        }
    }

    #[inline]
    fn pm(&self, x: u8) -> u8 {
        ((self.p * x as u32) % self.q) as u8
    }

    fn det_raw(&self, e: &[u8; 4]) -> u32 {
        let [a, b, c, d] = *e;
        let bc = if self.case.is_ramified() {
            self.pm(self.m(b, c))
        } else {
            self.m(b, c)
        };
        self.ad(self.m(a, d), self.ng(bc)) as u32
    }

    // conjugation by c: x -> c x c^-1
    #[inline]
    fn sigma(&self, e: [u8; 4]) -> [u8; 4] {
        let [a, b, c, d] = e;
        [d, self.ng(c), self.ng(b), a]
    }

    #[inline]
    fn mat_mul(&self, x: [u8; 4], y: [u8; 4]) -> [u8; 4] {
        let [a, b, c, d] = x;
        let [a2, b2, c2, d2] = y;
        if self.case.is_ramified() {
            [
                self.ad(self.m(a, a2), self.pm(self.m(b, c2))),
                self.ad(self.m(a, b2), self.m(b, d2)),
                self.ad(self.m(c, a2), self.m(d, c2)),
                self.ad(self.pm(self.m(c, b2)), self.m(d, d2)),
            ]
        } else {
            [
                self.ad(self.m(a, a2), self.m(b, c2)),
                self.ad(self.m(a, b2), self.m(b, d2)),
                self.ad(self.m(c, a2), self.m(d, c2)),
                self.ad(self.m(c, b2), self.m(d, d2)),
            ]
        }
    }

    /// `(c^j x)(c^k y) = c^(j+k) sigma^k(x) y`, with `c^2 = 1` in the quotient.
    #[inline]
    pub fn mul_elem(&self, x: Elem, y: Elem) -> Elem {
        let left = if y.j == 1 { self.sigma(x.e) } else { x.e };
        Elem {
            j: x.j ^ y.j,
            e: self.mat_mul(left, y.e),
        }
    }

    fn invert_elem(&self, x: Elem) -> Elem {
        let di = self.inv_q[self.det_raw(&x.e) as usize];
        let [a, b, c, d] = x.e;
        let inv = [self.m(d, di), self.m(self.ng(b), di), self.m(self.ng(c), di), self.m(a, di)];
        if x.j == 1 {
            Elem { j: 1, e: self.sigma(inv) }
        } else {
            Elem { j: 0, e: inv }
        }
    }

    /// Index of an element; panics on a non-element.
    #[inline]
    pub fn id(&self, x: Elem) -> u32 {
        let i = self.index[self.code(x)];
        debug_assert!(i != NONE, "{x:?} is not in the group");
        i
    }

    pub fn try_id(&self, x: Elem) -> Option<u32> {
        let c = self.code(x);
        let i = *self.index.get(c)?;
        (i != NONE).then_some(i)
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        self.id(self.mul_elem(self.elems[i as usize], self.elems[j as usize]))
    }

    #[inline]
    pub fn inv(&self, i: u32) -> u32 {
        self.inverse[i as usize]
    }

    pub fn elem(&self, i: u32) -> Elem {
        self.elems[i as usize]
    }

    pub fn case(&self) -> GroupCase {
        self.case
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn modulus(&self) -> u64 {
        self.q as u64
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    #[inline]
    pub fn class_of(&self, i: u32) -> u32 {
        self.class_of[i as usize]
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn power(&self, i: u32, mut n: u64) -> u32 {
        let mut acc = 0;
        let mut b = i;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        acc
    }

    fn element_order(&self, i: u32) -> u32 {
        let mut x = i;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, i);
            n += 1;
        }
        n
    }

    /// Determinant of the matrix part mod `p^m` (the `p`-power of `det c` is dropped).
    pub fn udet(&self, i: u32) -> u64 {
        self.det_raw(&self.elems[i as usize].e) as u64
    }

    /// The value `t` with `psi(tr(c x)) = psi_m(t)` on the elements over which
    /// Bushnell's sum runs: all of `GL_2(Z/p^m)` (trace), or the `c`-coset of
    /// the ramified group (`tr'(x) = beta - gamma` for the element `c x`).
    pub fn bushnell_trace(&self, i: u32) -> Option<u64> {
        let x = self.elems[i as usize];
        if self.case.is_ramified() {
            (x.j == 1).then(|| self.ad(x.e[1], self.ng(x.e[2])) as u64)
        } else {
            Some(self.ad(x.e[0], x.e[3]) as u64)
        }
    }

    pub fn in_bushnell_domain(&self, i: u32) -> bool {
        !self.case.is_ramified() || self.elems[i as usize].j == 1
    }

    fn divisible(&self, x: u8, k: u32) -> bool {
        k == 0 || (x as u64).is_multiple_of(self.case.p().pow(k))
    }

    /// Membership in the image of `K_r` (`1 + p^r M_2` unramified, `1 + P^r` ramified).
    pub fn in_filtration(&self, i: u32, r: u32) -> bool {
        let x = self.elems[i as usize];
        if x.j != 0 {
            return false;
        }
        let [a, b, c, d] = x.e;
        let one = |v: u8, k: u32| self.divisible(self.ad(v, self.ng(1)), k);
        if self.case.is_ramified() {
            let t = r / 2;
            let diag = if r.is_multiple_of(2) { t } else { t + 1 };
            one(a, diag) && one(d, diag) && self.divisible(b, t) && self.divisible(c, t)
        } else {
            one(a, r) && one(d, r) && self.divisible(b, r) && self.divisible(c, r)
        }
    }

    /// For each class, whether it lies in the image of `K_r`.
    pub fn filtration_classes(&self, r: u32) -> Vec<bool> {
        self.classes
            .iter()
            .map(|c| self.in_filtration(c.rep, r))
            .collect()
    }

    pub fn upper_unipotent(&self, b: u64) -> u32 {
        self.id(Elem { j: 0, e: [1, (b % self.q as u64) as u8, 0, 1] })
    }

    /// `[[1, 0], [b, 1]]` unramified, `[[1, 0], [p b, 1]]` ramified.
    pub fn lower_unipotent(&self, b: u64) -> u32 {
        self.id(Elem { j: 0, e: [1, 0, (b % self.q as u64) as u8, 1] })
    }

    pub fn scalar(&self, z: u64) -> u32 {
        let z = (z % self.q as u64) as u8;
        self.id(Elem { j: 0, e: [z, 0, 0, z] })
    }

    pub fn diagonal(&self, a: u64, d: u64) -> u32 {
        let q = self.q as u64;
        self.id(Elem { j: 0, e: [(a % q) as u8, 0, 0, (d % q) as u8] })
    }

    /// The element `c` of the ramified group.
    pub fn c_element(&self) -> Option<u32> {
        self.case
            .is_ramified()
            .then(|| self.id(Elem { j: 1, e: [1, 0, 0, 1] }))
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    fn make_generators(&self) -> Vec<u32> {
        let q = self.q as u64;
        let mut gens = vec![self.upper_unipotent(1), self.lower_unipotent(1)];
        for &g in UnitGroup::get(q).generators() {
            gens.push(self.diagonal(g, 1));
            gens.push(self.diagonal(1, g));
        }
        if let Some(c) = self.c_element() {
            gens.push(c);
        }
        gens.sort_unstable();
        gens.dedup();
        gens
    }

    fn check_generation(&self) -> Result<()> {
        let mut seen = vec![false; self.elems.len()];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut count = 1usize;
        while let Some(x) = stack.pop() {
            for &s in &self.generators {
                let y = self.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != self.elems.len() {
            return Err(Error::Invariant(format!(
                "{}: generators reach {count} of {} elements",
                self.case,
                self.elems.len()
            )));
        }
        Ok(())
    }

    fn check_associativity(&self, trials: usize) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let n = self.elems.len() as u32;
        for _ in 0..trials {
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::Invariant(format!("{}: ({a} {b}) {c} != {a} ({b} {c})", self.case)));
            }
        }
        Ok(())
    }

    fn split_classes(&mut self) {
        let n = self.elems.len();
        let mut class_of = vec![NONE; n];
        let mut classes = Vec::new();
        let gen_pairs: Vec<(u32, u32)> = self.generators.iter().map(|&s| (s, self.inv(s))).collect();
        let mut stack = Vec::new();
        for start in 0..n as u32 {
            if class_of[start as usize] != NONE {
                continue;
            }
            let k = classes.len() as u32;
            class_of[start as usize] = k;
            stack.push(start);
            let mut size = 1u64;
            while let Some(x) = stack.pop() {
                for &(s, si) in &gen_pairs {
                    let y = self.mul(self.mul(s, x), si);
                    if class_of[y as usize] == NONE {
                        class_of[y as usize] = k;
                        size += 1;
                        stack.push(y);
                    }
                }
            }
            classes.push(ConjClass {
                rep: start,
                size,
                order: 0,
            });
        }
        for c in classes.iter_mut() {
            c.order = self.element_order(c.rep);
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    /// Class of the inverse of each class representative.
    pub fn inverse_classes(&self) -> Vec<u32> {
        self.classes
            .iter()
            .map(|c| self.class_of(self.inv(c.rep)))
            .collect()
    }

    /// `pm[k][t]` = class of `rep_k^t` for `0 <= t < order_k`.
    pub fn power_maps(&self) -> Vec<Vec<u32>> {
        self.classes
            .iter()
            .map(|c| {
                let mut out = Vec::with_capacity(c.order as usize);
                let mut x = 0;
                for _ in 0..c.order {
                    out.push(self.class_of(x));
                    x = self.mul(x, c.rep);
                }
                out
            })
            .collect()
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        self.classes
            .iter()
            .fold(1, |acc, c| crate::arith::int::lcm(acc, c.order as u64))
    }

    /// Class representative as integer rows `[j, a, b, c, d]` (the `c` entry
    /// carries the factor `p` in the ramified case).
    pub fn matrix_of(&self, i: u32) -> [i64; 5] {
        let x = self.elems[i as usize];
        let [a, b, c, d] = x.e;
        let lower = if self.case.is_ramified() {
            c as i64 * self.p as i64
        } else {
            c as i64
        };
        [x.j as i64, a as i64, b as i64, lower, d as i64]
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.elems.len() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(p: u64, m: u32, r: bool) -> FiniteGroupModel {
        FiniteGroupModel::build(GroupCase::new(p, m, r), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn orders_and_class_counts() {
        let g = build(2, 1, false);
        assert_eq!(g.order(), 6);
        assert_eq!(g.classes().len(), 3);
        for p in [2u64, 3, 5, 7] {
            let g = build(p, 1, false);
            assert_eq!(g.classes().len() as u64, p * p - 1);
            assert_eq!(g.classes().iter().map(|c| c.size).sum::<u64>(), g.order());
        }
        assert_eq!(GroupCase::new(5, 2, false).order(), 300_000);
        for (p, m, n) in [(2u64, 1u32, 8u64), (3, 1, 72), (2, 2, 128), (3, 2, 5832)] {
            assert_eq!(build(p, m, true).order(), n);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let e = FiniteGroupModel::build(GroupCase::new(5, 2, false), 1000);
        assert!(matches!(e, Err(Error::BudgetExceeded { order: 300_000, .. })));
        assert!(FiniteGroupModel::build(GroupCase::new(4, 1, false), DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn c_squares_to_one_and_conjugates_by_sigma() {
        let g = build(3, 2, true);
        let c = g.c_element().unwrap();
        assert_eq!(g.mul(c, c), 0);
        let x = g.id(Elem { j: 0, e: [2, 5, 7, 4] });
        let y = g.conjugate(c, x);
        assert_eq!(g.elem(y).e, [4, 2, 4, 2]);
        assert_eq!(g.udet(x), g.udet(y));
    }

    #[test]
    fn filtration_is_normal_and_decreasing() {
        for (p, m, r) in [(2u64, 2u32, true), (3, 2, true), (3, 2, false)] {
            let g = build(p, m, r);
            let top = g.case().filtration_top();
            let mut prev = g.order() + 1;
            for l in 1..=top {
                let members: Vec<u32> = g.elements().filter(|&x| g.in_filtration(x, l)).collect();
                assert!((members.len() as u64) < prev);
                prev = members.len() as u64;
                for &x in &members {
                    for &s in g.generators() {
                        assert!(g.in_filtration(g.conjugate(s, x), l));
                    }
                }
            }
            assert_eq!(prev, 1, "K_top is the kernel of the quotient");
        }
    }

    #[test]
    fn unipotents_are_conjugate_by_the_swap() {
        let g = build(5, 1, false);
        let w = g.id(Elem { j: 0, e: [0, 1, 1, 0] });
        for a in 0..5 {
            assert_eq!(g.conjugate(w, g.lower_unipotent(a)), g.upper_unipotent(a));
        }
    }
}
