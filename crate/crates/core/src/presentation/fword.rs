//! Reduced words in a free group on generators indexed by `usize`.

use serde::{Deserialize, Serialize};

pub type Gen = usize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord(pub Vec<(Gen, i64)>);

impl FreeWord {
    pub fn new() -> Self {
        FreeWord(Vec::new())
    }

    pub fn single(g: Gen, e: i64) -> Self {
        let mut w = FreeWord::new();
        w.push(g, e);
        w
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Total number of letters, counting multiplicity.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn push(&mut self, g: Gen, e: i64) {
        if e == 0 {
            return;
        }
        match self.0.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    self.0.pop();
                }
            }
            _ => self.0.push((g, e)),
        }
    }

    pub fn append(&mut self, other: &FreeWord) {
        for &(g, e) in &other.0 {
            self.push(g, e);
        }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, e: i64) -> FreeWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::new();
        for _ in 0..e.unsigned_abs() {
            out.append(&base);
        }
        out
    }

    pub fn substitute(&self, g: Gen, replacement: &FreeWord) -> FreeWord {
        let mut out = FreeWord::new();
        for &(h, e) in &self.0 {
            if h == g {
                out.append(&replacement.pow(e));
            } else {
                out.push(h, e);
            }
        }
        out
    }

    /// Replaces every generator by a word: `g -> images[g]`.
    pub fn map(&self, images: &[FreeWord]) -> FreeWord {
        let mut out = FreeWord::new();
        for &(g, e) in &self.0 {
            out.append(&images[g].pow(e));
        }
        out
    }

    /// Reduces the word up to cyclic conjugation.
    pub fn cyclic_reduce(&mut self) {
        loop {
            let n = self.0.len();
            if n < 2 {
                return;
            }
            let (g0, e0) = self.0[0];
            let (g1, e1) = self.0[n - 1];
            if g0 != g1 {
                return;
            }
            self.0.pop();
            self.0[0].1 = e0 + e1;
            if self.0[0].1 == 0 {
                self.0.remove(0);
            }
        }
    }

    /// Number of syllables containing `g` and the exponent of the last one.
    pub fn occurrences(&self, g: Gen) -> (usize, i64) {
        let mut count = 0;
        let mut exp = 0;
        for &(h, e) in &self.0 {
            if h == g {
                count += 1;
                exp = e;
            }
        }
        (count, exp)
    }

    pub fn exponent_sum(&self, g: Gen) -> i64 {
        self.0.iter().filter(|t| t.0 == g).map(|t| t.1).sum()
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.0.iter().any(|t| t.0 == g)
    }

    /// Reduces exponents of torsion generators into `{1}` (order 2) or
    /// `{1, -1}` (order 3), merging neighbours that become adjacent.
    pub fn reduce_torsion(&self, order: impl Fn(Gen) -> Option<i64>) -> FreeWord {
        let normalize = |g: Gen, e: i64| -> i64 {
            match order(g) {
                Some(n) => {
                    let r = e.rem_euclid(n);
                    if n == 3 && r == 2 {
                        -1
                    } else {
                        r
                    }
                }
                None => e,
            }
        };
        let mut out: Vec<(Gen, i64)> = Vec::with_capacity(self.0.len());
        for &(g, e) in &self.0 {
            let mut e = normalize(g, e);
            if e == 0 {
                continue;
            }
            if let Some(last) = out.last() {
                if last.0 == g {
                    e = normalize(g, last.1 + e);
                    out.pop();
                    if e == 0 {
                        continue;
                    }
                }
            }
            out.push((g, e));
        }
        FreeWord(out)
    }

    /// If `g` occurs in exactly one syllable, with exponent `±1`, returns the
    /// word `w` with `g = w` implied by `self = 1`.
    pub fn solve_for(&self, g: Gen) -> Option<FreeWord> {
        let (count, e) = self.occurrences(g);
        if count != 1 || e.abs() != 1 {
            return None;
        }
        let pos = self.0.iter().position(|t| t.0 == g)?;
        // rotate so that g^e is first: g^e * rest = 1
        let mut rest = FreeWord::new();
        for &(h, f) in self.0[pos + 1..].iter().chain(self.0[..pos].iter()) {
            rest.push(h, f);
        }
        Some(if e == 1 { rest.inverse() } else { rest })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        let mut w = FreeWord::new();
        w.push(0, 2);
        w.push(1, 1);
        w.push(1, -1);
        w.push(0, -2);
        assert!(w.is_empty());
    }

    #[test]
    fn solve_relator() {
        // a b c = 1  =>  b = a^-1 c^-1
        let r = FreeWord(vec![(0, 1), (1, 1), (2, 1)]);
        let b = r.solve_for(1).unwrap();
        assert_eq!(b, FreeWord(vec![(0, -1), (2, -1)]));
        // a b^-1 c = 1 => b = c a
        let r = FreeWord(vec![(0, 1), (1, -1), (2, 1)]);
        assert_eq!(r.solve_for(1).unwrap(), FreeWord(vec![(2, 1), (0, 1)]));
        // a b a^-1 b: b occurs twice
        let r = FreeWord(vec![(0, 1), (1, 1), (0, -1), (1, 1)]);
        assert!(r.solve_for(1).is_none());
    }

    #[test]
    fn cyclic() {
        let mut w = FreeWord(vec![(0, 1), (1, 2), (0, -1)]);
        w.cyclic_reduce();
        assert_eq!(w, FreeWord(vec![(1, 2)]));
    }

    #[test]
    fn torsion_normal_form() {
        let order = |g: Gen| if g == 1 { Some(2) } else if g == 2 { Some(3) } else { None };
        let w = FreeWord(vec![(0, 1), (1, 2), (0, 1), (2, 2), (2, 5)]);
        // b^2 vanishes, a a merges, c^7 = c
        assert_eq!(w.reduce_torsion(order), FreeWord(vec![(0, 2), (2, 1)]));
    }
}
