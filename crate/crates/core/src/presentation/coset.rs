//! Right cosets of Gamma0(p) in SL2(Z) and Reidemeister–Schreier rewriting.
//!
//! Cosets are points of P^1(F_p), read off the bottom row `(c : d)`.
//! Index 0 is the point at infinity (`p | c`, representative `I`); index
//! `1 + j` is the point `d/c = j` with representative `T S^j`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::fword::{FreeWord, Gen};
use crate::arith::numth::mod_inv;
use crate::arith::{Letter, Mat2, StWord};

pub const INFINITY: usize = 0;

/// Identifiers of the Schreier generators `rep(c) x rep(c x)^-1`.
///
/// The nontrivial ones are `S` (coset I, letter S), `P = T S^p T^-1`
/// (coset `T S^{p-1}`, letter S), `Y = T^2` (coset T, letter T) and
/// `V_j` (coset `T S^j`, letter T) for `1 <= j <= p - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchreierGen {
    S,
    P,
    Y,
    V(u64),
}

impl SchreierGen {
    pub fn id(self) -> Gen {
        match self {
            SchreierGen::S => 0,
            SchreierGen::P => 1,
            SchreierGen::Y => 2,
            SchreierGen::V(j) => 2 + j as usize,
        }
    }

    pub fn from_id(id: Gen) -> Self {
        match id {
            0 => SchreierGen::S,
            1 => SchreierGen::P,
            2 => SchreierGen::Y,
            j => SchreierGen::V((j - 2) as u64),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CosetTable {
    p: u64,
}

impl CosetTable {
    pub fn new(p: u64) -> Self {
        CosetTable { p }
    }

    pub fn level(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn schreier_count(&self) -> usize {
        self.p as usize + 2
    }

    pub fn finite(&self, j: u64) -> usize {
        1 + j as usize
    }

    /// The residue `j` of a finite coset.
    pub fn residue(&self, idx: usize) -> Option<u64> {
        (idx != INFINITY).then(|| idx as u64 - 1)
    }

    pub fn representative(&self, idx: usize) -> Mat2 {
        match self.residue(idx) {
            None => Mat2::identity(),
            Some(j) => &Mat2::t() * &Mat2::s_pow(j as i64),
        }
    }

    pub fn index_of_row(&self, c: &BigInt, d: &BigInt) -> usize {
        let p = BigInt::from(self.p);
        let c = ((c % &p) + &p) % &p;
        let d = ((d % &p) + &p) % &p;
        let c = c.to_i64().unwrap();
        let d = d.to_i64().unwrap();
        if c == 0 {
            INFINITY
        } else {
            let inv = mod_inv(c, self.p as i64).unwrap();
            self.finite((d * inv).rem_euclid(self.p as i64) as u64)
        }
    }

    pub fn index_of(&self, gamma: &Mat2) -> usize {
        self.index_of_row(&gamma.c, &gamma.d)
    }

    /// The coset of `rep(idx) * S^e`.
    pub fn act_s(&self, idx: usize, e: i64) -> usize {
        match self.residue(idx) {
            None => INFINITY,
            Some(j) => self.finite((j as i64 + e).rem_euclid(self.p as i64) as u64),
        }
    }

    /// The coset of `rep(idx) * T` (also of `rep(idx) * T^-1`).
    pub fn act_t(&self, idx: usize) -> usize {
        match self.residue(idx) {
            None => self.finite(0),
            Some(0) => INFINITY,
            Some(j) => {
                let inv = mod_inv(j as i64, self.p as i64).unwrap();
                self.finite((-inv).rem_euclid(self.p as i64) as u64)
            }
        }
    }

    pub fn schreier_gen(&self, idx: usize, letter: Letter) -> Option<SchreierGen> {
        match (self.residue(idx), letter) {
            (None, Letter::S) => Some(SchreierGen::S),
            (None, Letter::T) => None,
            (Some(j), Letter::S) => (j == self.p - 1).then_some(SchreierGen::P),
            (Some(0), Letter::T) => Some(SchreierGen::Y),
            (Some(j), Letter::T) => Some(SchreierGen::V(j)),
        }
    }

    /// Matrix of a Schreier generator, computed from its definition.
    pub fn schreier_matrix(&self, g: SchreierGen) -> Mat2 {
        let (idx, letter) = match g {
            SchreierGen::S => (INFINITY, Letter::S),
            SchreierGen::P => (self.finite(self.p - 1), Letter::S),
            SchreierGen::Y => (self.finite(0), Letter::T),
            SchreierGen::V(j) => (self.finite(j), Letter::T),
        };
        let x = match letter {
            Letter::S => Mat2::s(),
            Letter::T => Mat2::t(),
        };
        let target = match letter {
            Letter::S => self.act_s(idx, 1),
            Letter::T => self.act_t(idx),
        };
        &(&self.representative(idx) * &x) * &self.representative(target).inverse()
    }

    /// Rewrites an `S`/`T` word read from coset `start` into Schreier
    /// generators; returns the rewritten word and the final coset.
    pub fn rewrite(&self, start: usize, word: &StWord) -> (FreeWord, usize) {
        let mut out = FreeWord::new();
        let mut c = start;
        for tok in &word.tokens {
            match tok.gen {
                Letter::S => match self.residue(c) {
                    None => out.push(SchreierGen::S.id(), tok.exp),
                    Some(j) => {
                        let total = j as i64 + tok.exp;
                        let wraps = total.div_euclid(self.p as i64);
                        out.push(SchreierGen::P.id(), wraps);
                        c = self.finite(total.rem_euclid(self.p as i64) as u64);
                    }
                },
                Letter::T => {
                    let n = tok.exp.unsigned_abs();
                    for _ in 0..n {
                        if tok.exp > 0 {
                            if let Some(g) = self.schreier_gen(c, Letter::T) {
                                out.push(g.id(), 1);
                            }
                            c = self.act_t(c);
                        } else {
                            let prev = self.act_t(c);
                            if let Some(g) = self.schreier_gen(prev, Letter::T) {
                                out.push(g.id(), -1);
                            }
                            c = prev;
                        }
                    }
                }
            }
        }
        (out, c)
    }

    /// The relator `(T S)^3` (or `T^2`) rewritten at coset `idx`.
    pub fn rewrite_relator(&self, idx: usize, letters: &[Letter]) -> FreeWord {
        let word = StWord {
            tokens: letters
                .iter()
                .map(|&gen| crate::arith::Token { gen, exp: 1 })
                .collect(),
        };
        let (w, end) = self.rewrite(idx, &word);
        debug_assert_eq!(end, idx, "relator must return to its coset");
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::decompose_sl2;

    #[test]
    fn representatives_land_in_their_cosets() {
        let table = CosetTable::new(13);
        for idx in 0..table.len() {
            assert_eq!(table.index_of(&table.representative(idx)), idx);
        }
    }

    #[test]
    fn schreier_generators_are_v_matrices() {
        let p = 13;
        let table = CosetTable::new(p);
        for j in 1..p {
            let m = table.schreier_matrix(SchreierGen::V(j));
            let js = mod_inv(j as i64, p as i64).map(|x| (-x).rem_euclid(p as i64)).unwrap();
            let expect = Mat2::sl2(-js, -1, j as i64 * js + 1, j as i64);
            assert_eq!(m, expect, "j = {j}");
        }
        assert_eq!(table.schreier_matrix(SchreierGen::S), Mat2::s());
        assert_eq!(table.schreier_matrix(SchreierGen::P), Mat2::sl2(1, 0, -13, 1));
        assert_eq!(table.schreier_matrix(SchreierGen::Y), Mat2::sl2(-1, 0, 0, -1));
    }

    #[test]
    fn every_element_times_inverse_rep_is_in_gamma0() {
        let table = CosetTable::new(7);
        for g in [Mat2::sl2(2, 1, 1, 1), Mat2::sl2(3, 2, 4, 3), Mat2::t()] {
            let idx = table.index_of(&g);
            assert!((&g * &table.representative(idx).inverse()).in_gamma0(7));
        }
    }

    #[test]
    fn coset_action_matches_matrices() {
        let table = CosetTable::new(11);
        for idx in 0..table.len() {
            let r = table.representative(idx);
            assert_eq!(table.act_t(idx), table.index_of(&(&r * &Mat2::t())));
            assert_eq!(table.act_s(idx, 1), table.index_of(&(&r * &Mat2::s())));
            assert_eq!(table.act_s(idx, -3), table.index_of(&(&r * &Mat2::s_pow(-3))));
        }
    }

    #[test]
    fn rewriting_reproduces_element() {
        let p = 11;
        let table = CosetTable::new(p);
        let g = Mat2::sl2(4, 1, 11, 3);
        let dec = decompose_sl2(&g);
        let (w, end) = table.rewrite(INFINITY, &dec.word);
        assert_eq!(end, INFINITY);
        let m = w.0.iter().fold(Mat2::identity(), |acc, &(id, e)| {
            &acc * &table.schreier_matrix(SchreierGen::from_id(id)).pow(e)
        });
        assert!(m.proj_eq(&g));
    }
}
