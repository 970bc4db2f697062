//! Free-product presentations of Gamma0(p)/{±I} for primes p > 3.
//!
//! [`build_presentation`] runs Reidemeister–Schreier on
//! `PSL2(Z) = <T, S | T^2, (TS)^3>` with the transversal
//! `{I} ∪ {T S^j}`, then Tietze-eliminates down to `S` and matrices
//! `V_q = [[-q*, -1], [q q* + 1, q]]`. Every step is checked by exact matrix
//! multiplication before the generating set is handed out.

mod coset;
pub mod fword;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use coset::{CosetTable, SchreierGen, INFINITY};
pub use fword::{FreeWord, Gen};

use crate::arith::numth::{ext_gcd, gcd, is_prime, mod_inv};
use crate::arith::{decompose_sl2, Letter, Mat2, ProjMat2};
use crate::error::{Error, Result};

/// Order of a generator in Gamma0(p)/{±I}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Two,
    Three,
    Infinite,
}

impl Order {
    pub fn as_int(self) -> Option<i64> {
        match self {
            Order::Two => Some(2),
            Order::Three => Some(3),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Two => write!(f, "2"),
            Order::Three => write!(f, "3"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// `(l, a, b)`: `Gamma0(p)/{±I} ≅ F_{l-2a-2b} * (Z/2 * Z/2)^a * (Z/3 * Z/3)^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub l: usize,
    pub a: usize,
    pub b: usize,
}

impl Signature {
    /// The closed formula `l = 2 floor(p/12) + 3`, `a = [p ≡ 1 mod 4]`,
    /// `b = [p ≡ 1 mod 3]`.
    pub fn expected(p: u64) -> Self {
        Signature {
            l: 2 * (p / 12) as usize + 3,
            a: usize::from(p % 4 == 1),
            b: usize::from(p % 3 == 1),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.l - 2 * self.a - 2 * self.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    /// `q` for `V_q`, `None` for `S`.
    pub q: Option<u64>,
    pub matrix: Mat2,
    pub order: Order,
}

impl Generator {
    pub fn projective(&self) -> ProjMat2 {
        ProjMat2::new(self.matrix.clone())
    }
}

/// One Tietze elimination: `eliminated := replacement`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub eliminated: String,
    /// Replacement word over Schreier-generator labels.
    pub replacement: Vec<(String, i64)>,
    pub reason: String,
}

/// The generating set `{S} ∪ {V_q : q ∈ Q'}` with everything needed to
/// solve the word problem.
#[derive(Clone, Debug)]
pub struct GenSet {
    pub p: u64,
    pub generators: Vec<Generator>,
    pub signature: Signature,
    pub rewriting_log: Vec<Substitution>,
    /// Torsion relators over final generator indices.
    pub relators: Vec<FreeWord>,
    table: CosetTable,
    /// Final word for every Schreier generator, indexed by `SchreierGen::id`.
    schreier_words: Vec<FreeWord>,
    /// Exponent sums of `schreier_words`.
    schreier_abel: Vec<Vec<i64>>,
    free_slot: Vec<ExpSlot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ExpSlot {
    Free(usize),
    Tor2(usize),
    Tor3(usize),
}

/// A word over the final generators; `gamma = (-1)^negated * product`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaWord {
    pub tokens: Vec<GammaToken>,
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaToken {
    pub label: String,
    /// Index into `GenSet::generators`.
    pub index: usize,
    pub exp: i64,
}

/// Image in `Z^{l-2a-2b} x (Z/2)^{2a} x (Z/3)^{2b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpVector {
    pub free: Vec<i64>,
    pub tor2: Vec<u8>,
    pub tor3: Vec<u8>,
}

impl ExpVector {
    pub fn zero(sig: &Signature) -> Self {
        ExpVector {
            free: vec![0; sig.free_rank()],
            tor2: vec![0; 2 * sig.a],
            tor3: vec![0; 2 * sig.b],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&x| x == 0)
            && self.tor2.iter().all(|&x| x == 0)
            && self.tor3.iter().all(|&x| x == 0)
    }

    pub fn torsion_is_zero(&self) -> bool {
        self.tor2.iter().all(|&x| x == 0) && self.tor3.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &ExpVector) -> ExpVector {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &ExpVector) -> ExpVector {
        self.combine(other, -1)
    }

    pub fn scale(&self, k: i64) -> ExpVector {
        ExpVector {
            free: self.free.iter().map(|x| x * k).collect(),
            tor2: self
                .tor2
                .iter()
                .map(|&x| (x as i64 * k).rem_euclid(2) as u8)
                .collect(),
            tor3: self
                .tor3
                .iter()
                .map(|&x| (x as i64 * k).rem_euclid(3) as u8)
                .collect(),
        }
    }

    pub fn neg(&self) -> ExpVector {
        self.scale(-1)
    }

    fn combine(&self, other: &ExpVector, sign: i64) -> ExpVector {
        ExpVector {
            free: self
                .free
                .iter()
                .zip(&other.free)
                .map(|(a, b)| a + sign * b)
                .collect(),
            tor2: self
                .tor2
                .iter()
                .zip(&other.tor2)
                .map(|(&a, &b)| (a as i64 + sign * b as i64).rem_euclid(2) as u8)
                .collect(),
            tor3: self
                .tor3
                .iter()
                .zip(&other.tor3)
                .map(|(&a, &b)| (a as i64 + sign * b as i64).rem_euclid(3) as u8)
                .collect(),
        }
    }
}

fn check_level(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p <= 3 {
        return Err(Error::LevelTooSmall(p));
    }
    Ok(())
}

/// `q*` in `[1, p]` with `q q* ≡ -1 (mod p)`.
pub fn q_star(p: u64, q: i64) -> Result<i64> {
    if q.rem_euclid(p as i64) == 0 {
        return Err(Error::DivisibleByLevel { q, p });
    }
    let inv = mod_inv(q, p as i64).expect("p prime");
    let s = (-inv).rem_euclid(p as i64);
    Ok(if s == 0 { p as i64 } else { s })
}

/// `V_q = [[-q*, -1], [q q* + 1, q]]`.
pub fn v_matrix(p: u64, q: i64) -> Result<Mat2> {
    let qs = q_star(p, q)?;
    let qs_b = BigInt::from(qs);
    let q_b = BigInt::from(q);
    Mat2::new(-&qs_b, BigInt::from(-1), &q_b * &qs_b + 1, q_b)
}

fn schreier_label(g: SchreierGen) -> String {
    match g {
        SchreierGen::S => "S".into(),
        SchreierGen::P => "P".into(),
        SchreierGen::Y => "Y".into(),
        SchreierGen::V(j) => format!("V_{j}"),
    }
}

struct Rewriter {
    table: CosetTable,
    alive: Vec<bool>,
    relators: Vec<FreeWord>,
    /// Current expression of every Schreier generator over living ones.
    exprs: Vec<FreeWord>,
    elliptic: Vec<Option<i64>>,
    log: Vec<Substitution>,
}

impl Rewriter {
    fn new(p: u64) -> Self {
        let table = CosetTable::new(p);
        let n = table.schreier_count();
        let alive = vec![true; n];
        Rewriter {
            exprs: (0..n).map(|g| FreeWord::single(g, 1)).collect(),
            table,
            alive,
            relators: Vec::new(),
            elliptic: vec![None; n],
            log: Vec::new(),
        }
    }

    fn orbit_reps(&self, step: impl Fn(usize) -> usize) -> Vec<usize> {
        let mut seen = vec![false; self.table.len()];
        let mut reps = Vec::new();
        for start in 0..self.table.len() {
            if seen[start] {
                continue;
            }
            reps.push(start);
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                c = step(c);
            }
        }
        reps
    }

    fn collect_relators(&mut self) {
        let t_reps = self.orbit_reps(|c| self.table.act_t(c));
        let ts_reps = self.orbit_reps(|c| self.table.act_s(self.table.act_t(c), 1));
        for idx in t_reps {
            let r = self.table.rewrite_relator(idx, &[Letter::T, Letter::T]);
            self.relators.push(r);
        }
        for idx in ts_reps {
            let r = self.table.rewrite_relator(
                idx,
                &[Letter::T, Letter::S, Letter::T, Letter::S, Letter::T, Letter::S],
            );
            self.relators.push(r);
        }
    }

    fn eliminate(&mut self, g: Gen, relator_index: usize, reason: &str) -> Result<()> {
        let rel = self.relators.remove(relator_index);
        let replacement = rel.solve_for(g).ok_or_else(|| {
            Error::Rewriting(format!("generator {g} is not solvable from its relator"))
        })?;
        for r in &mut self.relators {
            *r = r.substitute(g, &replacement);
            r.cyclic_reduce();
        }
        self.relators.retain(|r| !r.is_empty());
        for e in &mut self.exprs {
            if e.contains(g) {
                *e = e.substitute(g, &replacement);
            }
        }
        self.alive[g] = false;
        self.log.push(Substitution {
            eliminated: schreier_label(SchreierGen::from_id(g)),
            replacement: replacement
                .0
                .iter()
                .map(|&(h, e)| (schreier_label(SchreierGen::from_id(h)), e))
                .collect(),
            reason: reason.to_string(),
        });
        Ok(())
    }

    fn find_relator(&self, g: Gen, skip_torsion: bool) -> Option<usize> {
        self.relators.iter().position(|r| {
            if skip_torsion && is_torsion_relator(r) {
                return false;
            }
            r.solve_for(g).is_some()
        })
    }

    fn mark_elliptic(&mut self) -> Result<()> {
        for r in &self.relators {
            if is_torsion_relator(r) {
                let (g, e) = r.0[0];
                let n = e.abs();
                if n != 2 && n != 3 {
                    return Err(Error::Rewriting(format!("unexpected torsion relator of order {n}")));
                }
                self.elliptic[g] = Some(n);
            }
        }
        Ok(())
    }
}

fn is_torsion_relator(r: &FreeWord) -> bool {
    r.0.len() == 1
}

/// Computes the generating set of Gamma0(p)/{±I} together with the data for
/// the word problem. `p` must be a prime greater than 3.
pub fn build_presentation(p: u64) -> Result<GenSet> {
    check_level(p)?;
    let mut rw = Rewriter::new(p);
    let table = rw.table.clone();
    rw.collect_relators();
    for r in &mut rw.relators {
        r.cyclic_reduce();
    }
    rw.relators.retain(|r| !r.is_empty());

    // Y = T^2 is trivial in PSL2
    let y = SchreierGen::Y.id();
    let idx = rw
        .find_relator(y, false)
        .ok_or_else(|| Error::Rewriting("no relator kills T^2".into()))?;
    rw.eliminate(y, idx, "T^2 = 1 at coset T")?;

    // V_{q*} = V_q^{-1} from T^2 at coset T S^q, keeping the smaller index
    for q in 1..p {
        let qs = q_star(p, q as i64)? as u64;
        if qs > q {
            let g = SchreierGen::V(qs).id();
            let pair = FreeWord(vec![(SchreierGen::V(q).id(), 1)]);
            let idx = rw
                .relators
                .iter()
                .position(|r| {
                    r.len() == 2
                        && r.contains(g)
                        && r.contains(pair.0[0].0)
                })
                .ok_or_else(|| Error::Rewriting(format!("no pairing relator for V_{q}")))?;
            rw.eliminate(g, idx, &format!("T^2 = 1 at coset T S^{q}: V_{qs} = V_{q}^-1"))?;
        }
    }
    rw.mark_elliptic()?;

    // Contract the remaining (TS)^3 relators. V_1 goes first so that it
    // never survives, P goes last since it is the only eliminable half-edge.
    let s_id = SchreierGen::S.id();
    let p_id = SchreierGen::P.id();
    loop {
        let mut candidates: Vec<Gen> = Vec::new();
        candidates.push(SchreierGen::V(1).id());
        candidates.extend((2..p).rev().map(|q| SchreierGen::V(q).id()));
        candidates.push(p_id);
        let found = candidates.into_iter().find_map(|g| {
            if !rw.alive[g] || g == s_id || rw.elliptic[g].is_some() {
                return None;
            }
            rw.find_relator(g, true).map(|idx| (g, idx))
        });
        match found {
            Some((g, idx)) => rw.eliminate(g, idx, "(TS)^3 = 1")?,
            None => break,
        }
    }
    if let Some(r) = rw.relators.iter().find(|r| !is_torsion_relator(r)) {
        return Err(Error::Rewriting(format!(
            "non-torsion relator survived elimination: {r:?}"
        )));
    }
    if rw.alive[p_id] || rw.alive[SchreierGen::V(1).id()] {
        return Err(Error::Rewriting("P or V_1 survived elimination".into()));
    }

    // final generators: S, then V_q in increasing q
    let mut final_ids: Vec<Gen> = vec![s_id];
    final_ids.extend(
        (2..p)
            .map(|q| SchreierGen::V(q).id())
            .filter(|&g| rw.alive[g]),
    );
    let mut index_of = vec![usize::MAX; table.schreier_count()];
    for (i, &g) in final_ids.iter().enumerate() {
        index_of[g] = i;
    }
    let mut generators = Vec::with_capacity(final_ids.len());
    for &g in &final_ids {
        let sg = SchreierGen::from_id(g);
        let (matrix, q) = match sg {
            SchreierGen::S => (Mat2::s(), None),
            SchreierGen::V(q) => (v_matrix(p, q as i64)?, Some(q)),
            _ => unreachable!(),
        };
        let order = match rw.elliptic[g] {
            Some(2) => Order::Two,
            Some(3) => Order::Three,
            _ => Order::Infinite,
        };
        generators.push(Generator {
            label: schreier_label(sg),
            q,
            matrix,
            order,
        });
    }
    let reindex = |w: &FreeWord| FreeWord(w.0.iter().map(|&(g, e)| (index_of[g], e)).collect());
    let orders: Vec<Option<i64>> = generators.iter().map(|g| g.order.as_int()).collect();
    let schreier_words: Vec<FreeWord> = rw
        .exprs
        .iter()
        .map(|w| reindex(w).reduce_torsion(|g| orders[g]))
        .collect();
    let relators: Vec<FreeWord> = rw.relators.iter().map(reindex).collect();

    let count = |o: Order| generators.iter().filter(|g| g.order == o).count();
    let (n2, n3) = (count(Order::Two), count(Order::Three));
    if n2 % 2 != 0 || n3 % 2 != 0 {
        return Err(Error::Rewriting(format!(
            "odd number of elliptic generators: {n2} of order 2, {n3} of order 3"
        )));
    }
    let signature = Signature {
        l: generators.len(),
        a: n2 / 2,
        b: n3 / 2,
    };

    let mut free_slot = Vec::with_capacity(generators.len());
    let (mut nf, mut n2i, mut n3i) = (0, 0, 0);
    for g in &generators {
        free_slot.push(match g.order {
            Order::Infinite => {
                nf += 1;
                ExpSlot::Free(nf - 1)
            }
            Order::Two => {
                n2i += 1;
                ExpSlot::Tor2(n2i - 1)
            }
            Order::Three => {
                n3i += 1;
                ExpSlot::Tor3(n3i - 1)
            }
        });
    }
    let schreier_abel = schreier_words
        .iter()
        .map(|w| (0..generators.len()).map(|i| w.exponent_sum(i)).collect())
        .collect();

    let gens = GenSet {
        p,
        generators,
        signature,
        rewriting_log: rw.log,
        relators,
        table,
        schreier_words,
        schreier_abel,
        free_slot,
    };
    gens.verify()?;
    Ok(gens)
}

/// `Q = {1} ∪ {q : V_q is a generator}`.
pub fn compute_q(p: u64) -> Result<BTreeSet<u64>> {
    Ok(build_presentation(p)?.q_set())
}

impl GenSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn coset_table(&self) -> &CosetTable {
        &self.table
    }

    pub fn q_set(&self) -> BTreeSet<u64> {
        std::iter::once(1)
            .chain(self.generators.iter().filter_map(|g| g.q))
            .collect()
    }

    pub fn index_of_label(&self, label: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Maximal length of the stored Schreier-generator rewrites.
    pub fn max_rewrite_len(&self) -> usize {
        self.schreier_words.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// The Schreier generator matrices, re-expressed through the final
    /// words; used by [`GenSet::verify`].
    pub fn schreier_word(&self, g: SchreierGen) -> &FreeWord {
        &self.schreier_words[g.id()]
    }

    pub fn evaluate_word(&self, w: &FreeWord) -> Mat2 {
        w.0.iter().fold(Mat2::identity(), |acc, &(i, e)| {
            &acc * &self.generators[i].matrix.pow(e)
        })
    }

    /// Exact consistency certificate: every Schreier generator equals ±
    /// its rewrite, every kept relator is ±I, every generator has the
    /// advertised shape and order.
    pub fn verify(&self) -> Result<()> {
        let p = self.p;
        for id in 0..self.table.schreier_count() {
            let sg = SchreierGen::from_id(id);
            let m = self.table.schreier_matrix(sg);
            let w = self.evaluate_word(&self.schreier_words[id]);
            if !m.proj_eq(&w) {
                return Err(Error::Rewriting(format!(
                    "rewrite of {} evaluates to {w}, expected ±{m}",
                    schreier_label(sg)
                )));
            }
        }
        for r in &self.relators {
            if !self.evaluate_word(r).is_scalar_unit() {
                return Err(Error::Rewriting(format!("relator {r:?} is not ±I")));
            }
        }
        for g in &self.generators {
            let tr = g.matrix.trace().abs().to_i64().unwrap_or(i64::MAX);
            let ok = match g.order {
                Order::Two => tr == 0,
                Order::Three => tr == 1,
                Order::Infinite => tr >= 2,
            };
            if !ok {
                return Err(Error::Rewriting(format!(
                    "{} has trace {} but order {}",
                    g.label,
                    g.matrix.trace(),
                    g.order
                )));
            }
            if let Some(q) = g.q {
                if !(2..=p - 2).contains(&q) {
                    return Err(Error::Rewriting(format!("{} outside [2, p-2]", g.label)));
                }
                let qs = -g.matrix.a.to_i64().unwrap();
                if !(1..=p as i64).contains(&qs) || (q as i64 * qs + 1) % p as i64 != 0 {
                    return Err(Error::Rewriting(format!("{} has the wrong shape", g.label)));
                }
            }
        }
        Ok(())
    }

    /// Rewrites `gamma` (which must lie in Gamma0(p)) as a word in the
    /// Schreier generators.
    fn schreier_rewrite(&self, gamma: &Mat2) -> Result<(FreeWord, bool)> {
        if !gamma.det().to_i64().is_some_and(|d| d == 1) {
            return Err(Error::Determinant(gamma.det().to_string()));
        }
        if !gamma.in_gamma0(self.p) {
            return Err(Error::NotInGamma0(gamma.to_string(), self.p));
        }
        let dec = decompose_sl2(gamma);
        let (w, end) = self.table.rewrite(INFINITY, &dec.word);
        debug_assert_eq!(end, INFINITY);
        Ok((w, dec.negated))
    }

    /// Word problem in the free product: `gamma = ± word`.
    pub fn decompose_gamma0(&self, gamma: &Mat2) -> Result<GammaWord> {
        let (sw, _) = self.schreier_rewrite(gamma)?;
        let orders: Vec<Option<i64>> = self.generators.iter().map(|g| g.order.as_int()).collect();
        let word = sw.map(&self.schreier_words).reduce_torsion(|g| orders[g]);
        let value = self.evaluate_word(&word);
        let negated = if &value == gamma {
            false
        } else if value == -gamma {
            true
        } else {
            return Err(Error::Rewriting(format!(
                "word for {gamma} evaluates to {value}"
            )));
        };
        Ok(GammaWord {
            tokens: word
                .0
                .iter()
                .map(|&(i, exp)| GammaToken {
                    label: self.generators[i].label.clone(),
                    index: i,
                    exp,
                })
                .collect(),
            negated,
        })
    }

    pub fn evaluate_gamma_word(&self, w: &GammaWord) -> Mat2 {
        let m = w.tokens.iter().fold(Mat2::identity(), |acc, t| {
            &acc * &self.generators[t.index].matrix.pow(t.exp)
        });
        if w.negated {
            -m
        } else {
            m
        }
    }

    fn exp_vector_from_sums(&self, sums: &[i64]) -> ExpVector {
        let mut v = ExpVector::zero(&self.signature);
        for (i, &e) in sums.iter().enumerate() {
            match self.free_slot[i] {
                ExpSlot::Free(k) => v.free[k] += e,
                ExpSlot::Tor2(k) => v.tor2[k] = (v.tor2[k] as i64 + e).rem_euclid(2) as u8,
                ExpSlot::Tor3(k) => v.tor3[k] = (v.tor3[k] as i64 + e).rem_euclid(3) as u8,
            }
        }
        v
    }

    /// Exponent sums of a word over these generators.
    pub fn abelianize(&self, word: &GammaWord) -> Result<ExpVector> {
        let mut sums = vec![0i64; self.len()];
        for t in &word.tokens {
            let i = self.index_of_label(&t.label)?;
            sums[i] += t.exp;
        }
        Ok(self.exp_vector_from_sums(&sums))
    }

    /// Abelianized image of a matrix, without materializing the word.
    pub fn abelianize_matrix(&self, gamma: &Mat2) -> Result<ExpVector> {
        let (sw, _) = self.schreier_rewrite(gamma)?;
        let mut sums = vec![0i64; self.len()];
        for &(g, e) in &sw.0 {
            for (s, &a) in sums.iter_mut().zip(&self.schreier_abel[g]) {
                *s += e * a;
            }
        }
        Ok(self.exp_vector_from_sums(&sums))
    }

    /// Slot of generator `i` in an [`ExpVector`]: `(kind, position)` with
    /// kind 0 = free, 2 = order two, 3 = order three.
    pub fn exp_slot(&self, i: usize) -> (u8, usize) {
        match self.free_slot[i] {
            ExpSlot::Free(k) => (0, k),
            ExpSlot::Tor2(k) => (2, k),
            ExpSlot::Tor3(k) => (3, k),
        }
    }

    /// Per-generator exponents of an [`ExpVector`], torsion entries taken
    /// as their least nonnegative representatives.
    pub fn exponents(&self, v: &ExpVector) -> Vec<i64> {
        (0..self.len())
            .map(|i| match self.free_slot[i] {
                ExpSlot::Free(k) => v.free[k],
                ExpSlot::Tor2(k) => v.tor2[k] as i64,
                ExpSlot::Tor3(k) => v.tor3[k] as i64,
            })
            .collect()
    }

    pub fn generator_exp_vector(&self, i: usize) -> ExpVector {
        let mut sums = vec![0; self.len()];
        sums[i] = 1;
        self.exp_vector_from_sums(&sums)
    }

    /// Uniform-ish random element: bottom row `(c, d)` with `p | c`,
    /// `gcd(c, d) = 1`, `|c|, |d| <= bound`, lifted by extended Euclid.
    pub fn random_element<R: Rng>(&self, rng: &mut R, bound: i64) -> Mat2 {
        random_gamma0(self.p, rng, bound)
    }

    /// Random product of `len` generator powers.
    pub fn random_word_element<R: Rng>(&self, rng: &mut R, len: usize) -> Mat2 {
        (0..len).fold(Mat2::identity(), |acc, _| {
            let i = rng.gen_range(0..self.len());
            let e = match rng.gen_range(0..4) {
                0 => -2,
                1 => -1,
                2 => 1,
                _ => 2,
            };
            &acc * &self.generators[i].matrix.pow(e)
        })
    }
}

pub fn random_gamma0<R: Rng>(p: u64, rng: &mut R, bound: i64) -> Mat2 {
    let p = p as i64;
    loop {
        let c = p * rng.gen_range(-(bound / p)..=(bound / p));
        let d = rng.gen_range(-bound..=bound);
        if gcd(c, d) != 1 {
            continue;
        }
        // a d - b c = 1
        let (_, x, y) = ext_gcd(d, c);
        return Mat2::from_i64(x, -y, c, d).expect("lift has determinant one");
    }
}

impl GammaWord {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for GammaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-")?;
        }
        if self.tokens.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .tokens
            .iter()
            .map(|t| {
                if t.exp == 1 {
                    t.label.clone()
                } else {
                    format!("{}^{}", t.label, t.exp)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Evaluates `prod (label_i)^{e_i}` in either reading order.
pub fn evaluate_labelled(
    p: u64,
    tokens: &[(&str, i64)],
    reversed: bool,
) -> Result<Mat2> {
    let mats: Vec<Mat2> = tokens
        .iter()
        .map(|&(label, e)| -> Result<Mat2> {
            let base = if label == "S" {
                Mat2::s()
            } else if let Some(q) = label.strip_prefix("V_") {
                let q: i64 = q
                    .parse()
                    .map_err(|_| Error::UnknownLabel(label.to_string()))?;
                v_matrix(p, q)?
            } else {
                return Err(Error::UnknownLabel(label.to_string()));
            };
            Ok(base.pow(e))
        })
        .collect::<Result<_>>()?;
    let iter: Box<dyn Iterator<Item = &Mat2>> = if reversed {
        Box::new(mats.iter().rev())
    } else {
        Box::new(mats.iter())
    };
    Ok(iter.fold(Mat2::identity(), |acc, m| &acc * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn v_matrix_examples() {
        assert_eq!(v_matrix(13, 4).unwrap(), Mat2::sl2(-3, -1, 13, 4));
        assert_eq!(v_matrix(13, 10).unwrap(), Mat2::sl2(-9, -1, 91, 10));
        let v = v_matrix(5, 2).unwrap();
        assert_eq!(v, Mat2::sl2(-2, -1, 5, 2));
        assert_eq!(v.trace(), BigInt::from(0));
        assert_eq!(v.pow(2), Mat2::sl2(-1, 0, 0, -1));
        assert!(v_matrix(13, 26).is_err());
    }

    #[test]
    fn pairing_identity() {
        for p in [5u64, 7, 11, 13, 29] {
            for q in 1..p as i64 {
                let qs = q_star(p, q).unwrap();
                let vq = v_matrix(p, q).unwrap();
                let vqs = v_matrix(p, qs).unwrap();
                assert_eq!(vqs, -vq.inverse(), "p={p} q={q}");
            }
        }
    }

    #[test]
    fn signatures_small_primes() {
        for (p, sig) in [(5, (3, 1, 0)), (7, (3, 0, 1)), (11, (3, 0, 0)), (13, (5, 1, 1))] {
            let g = build_presentation(p).unwrap();
            assert_eq!((g.signature.l, g.signature.a, g.signature.b), sig, "p = {p}");
        }
    }

    #[test]
    fn signature_formula_all_primes() {
        for p in (5..200u64).filter(|&p| is_prime(p)) {
            let g = build_presentation(p).unwrap();
            assert_eq!(g.signature, Signature::expected(p), "p = {p}");
        }
    }

    #[test]
    fn rejects_bad_levels() {
        assert_eq!(build_presentation(12).unwrap_err(), Error::NotPrime(12));
        assert_eq!(build_presentation(3).unwrap_err(), Error::LevelTooSmall(3));
    }

    #[test]
    fn level_five_elliptic_pair() {
        let g = build_presentation(5).unwrap();
        let labels: Vec<_> = g.generators.iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels, vec!["S", "V_2", "V_3"]);
        assert!(g.generators[1..].iter().all(|x| x.order == Order::Two));
        assert_eq!(g.q_set().into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn translation_word() {
        let g = build_presentation(13).unwrap();
        let w = g.decompose_gamma0(&Mat2::s()).unwrap();
        assert_eq!(w.tokens.len(), 1);
        assert_eq!((w.tokens[0].label.as_str(), w.tokens[0].exp), ("S", 1));
        let v = g.abelianize(&g.decompose_gamma0(&Mat2::s_pow(3)).unwrap()).unwrap();
        assert_eq!(v.free[0], 3);
        assert!(v.torsion_is_zero());
        assert_eq!(v.free[1..].iter().filter(|&&x| x != 0).count(), 0);
    }

    #[test]
    fn rejects_non_members() {
        let g = build_presentation(7).unwrap();
        assert!(matches!(
            g.decompose_gamma0(&Mat2::t()),
            Err(Error::NotInGamma0(_, 7))
        ));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [5u64, 7, 13] {
            let g = build_presentation(p).unwrap();
            for _ in 0..30 {
                let m = g.random_element(&mut rng, 1_000_000);
                let w = g.decompose_gamma0(&m).unwrap();
                assert_eq!(g.evaluate_gamma_word(&w), m);
                assert_eq!(g.abelianize(&w).unwrap(), g.abelianize_matrix(&m).unwrap());
            }
        }
    }

    #[test]
    fn relators_abelianize_to_zero() {
        let g = build_presentation(13).unwrap();
        for r in &g.relators {
            let (gen, e) = r.0[0];
            let w = GammaWord {
                tokens: vec![GammaToken {
                    label: g.generators[gen].label.clone(),
                    index: gen,
                    exp: e,
                }],
                negated: false,
            };
            assert!(g.abelianize(&w).unwrap().is_zero());
        }
    }

    #[test]
    fn labelled_evaluation_orders_differ() {
        let toks = [("V_10", -2), ("V_8", -1), ("V_5", -1), ("V_4", -2), ("S", -1)];
        let l2r = evaluate_labelled(13, &toks, false).unwrap();
        let r2l = evaluate_labelled(13, &toks, true).unwrap();
        assert!(l2r.proj_eq(&Mat2::sl2(1, 0, -13, 1)));
        assert!(!r2l.proj_eq(&Mat2::sl2(1, 0, -13, 1)));
    }
}
