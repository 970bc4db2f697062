//! Multiplier systems on Gamma0(p) as exact angle assignments on the free
//! generators, and the linear solver for infinite-order systems that agree
//! with a Dirichlet character on small-modulus matrices.

mod angle;
mod character;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use angle::{common_denominator, Angle};
pub use character::DirichletChar;

use crate::arith::numth::{gcd, mod_inv};
use crate::arith::Mat2;
use crate::error::{Error, Result};
use crate::linalg::{bareiss_rank, Matrix};
use crate::presentation::{ExpVector, GenSet, Order};
use crate::Rational;

/// One angle per generator of a [`GenSet`], in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSystem {
    pub p: u64,
    pub labels: Vec<String>,
    pub angles: Vec<Angle>,
}

#[derive(Serialize, Deserialize)]
struct AngleJson {
    label: String,
    rational: String,
    irrational: String,
}

#[derive(Serialize, Deserialize)]
struct MultiplierJson {
    p: u64,
    angles: Vec<AngleJson>,
}

impl MultiplierSystem {
    pub fn trivial(gens: &GenSet) -> Self {
        MultiplierSystem {
            p: gens.p,
            labels: gens.generators.iter().map(|g| g.label.clone()).collect(),
            angles: vec![Angle::zero(); gens.len()],
        }
    }

    pub fn angle_of(&self, label: &str) -> Option<&Angle> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.angles[i])
    }

    fn check_compatible(&self, gens: &GenSet) -> Result<()> {
        if self.p != gens.p || self.labels.len() != gens.len() {
            return Err(Error::Invalid(format!(
                "multiplier for p = {} with {} angles does not fit the generators of level {}",
                self.p,
                self.labels.len(),
                gens.p
            )));
        }
        for (l, g) in self.labels.iter().zip(&gens.generators) {
            if *l != g.label {
                return Err(Error::UnknownLabel(l.clone()));
            }
        }
        Ok(())
    }

    /// Torsion consistency: order-n generators carry angles in `(1/n) Z`.
    pub fn validate(&self, gens: &GenSet) -> Result<()> {
        self.check_compatible(gens)?;
        for (a, g) in self.angles.iter().zip(&gens.generators) {
            if let Some(n) = g.order.as_int() {
                let ok = a.has_finite_order()
                    && (a.r() * Rational::from_integer(n.into())).is_integer();
                if !ok {
                    return Err(Error::Invalid(format!(
                        "angle {a} on {} is incompatible with order {n}",
                        g.label
                    )));
                }
            }
        }
        Ok(())
    }

    /// `sum_i angle_i * v_i`.
    pub fn apply(&self, gens: &GenSet, v: &ExpVector) -> Angle {
        gens.exponents(v)
            .iter()
            .zip(&self.angles)
            .fold(Angle::zero(), |acc, (&e, a)| &acc + &a.scale(e))
    }

    /// `upsilon(gamma)` through the abelianization of `gamma`.
    pub fn evaluate(&self, gens: &GenSet, gamma: &Mat2) -> Result<Angle> {
        self.check_compatible(gens)?;
        Ok(self.apply(gens, &gens.abelianize_matrix(gamma)?))
    }

    pub fn has_infinite_order(&self) -> bool {
        self.angles.iter().any(|a| !a.has_finite_order())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = MultiplierJson {
            p: self.p,
            angles: self
                .labels
                .iter()
                .zip(&self.angles)
                .map(|(l, a)| AngleJson {
                    label: l.clone(),
                    rational: Angle::format_rational(a.r()),
                    irrational: Angle::format_rational(a.s()),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: MultiplierJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let mut labels = Vec::new();
        let mut angles = Vec::new();
        for a in j.angles {
            angles.push(Angle::new(
                Angle::parse_rational(&a.rational)?,
                Angle::parse_rational(&a.irrational)?,
            ));
            labels.push(a.label);
        }
        Ok(MultiplierSystem {
            p: j.p,
            labels,
            angles,
        })
    }
}

/// `upsilon_chi(gamma) = chi(d)`, checked against direct evaluation on
/// random elements.
pub fn char_multiplier(chi: &DirichletChar, gens: &GenSet) -> Result<MultiplierSystem> {
    if chi.modulus != gens.p {
        return Err(Error::Invalid(format!(
            "character modulus {} differs from level {}",
            chi.modulus, gens.p
        )));
    }
    if !chi.is_even() {
        return Err(Error::OddCharacter);
    }
    let angles = gens
        .generators
        .iter()
        .map(|g| {
            let d = g.matrix.d.to_i64().expect("generator entries are small");
            chi.angle(d).expect("d is a unit mod p")
        })
        .collect();
    let ms = MultiplierSystem {
        p: gens.p,
        labels: gens.generators.iter().map(|g| g.label.clone()).collect(),
        angles,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ gens.p);
    for _ in 0..50 {
        let m = gens.random_element(&mut rng, 1_000_000);
        let expected = chi
            .angle(m.d.to_i64().expect("bounded sample"))
            .expect("unit");
        if ms.evaluate(gens, &m)? != expected {
            return Err(Error::Inconsistent(format!(
                "character multiplier disagrees with chi(d) at {m}"
            )));
        }
    }
    Ok(ms)
}

/// Smallest `n > 0` with `tau S^n tau^-1` in Gamma0(p).
pub fn cusp_width(p: u64, tau: &Mat2) -> u64 {
    let pb = BigInt::from(p);
    let n = if (&tau.c % &pb).is_zero() { 1 } else { p };
    debug_assert!((&(tau * &Mat2::s_pow(n as i64)) * &tau.inverse()).in_gamma0(p));
    n
}

/// `kappa_tau` with `e(kappa_tau) = upsilon(tau S^{n_tau} tau^-1)`.
pub fn cusp_parameter(ms: &MultiplierSystem, gens: &GenSet, tau: &Mat2) -> Result<Angle> {
    let n = cusp_width(gens.p, tau);
    let g = &(tau * &Mat2::s_pow(n as i64)) * &tau.inverse();
    ms.evaluate(gens, &g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Kappa(String),
    Pretend { q: i64, a: i64, b: i64 },
    Custom(String),
}

#[derive(Clone, Debug)]
pub struct ConstraintRow {
    pub matrix: Mat2,
    pub exp: ExpVector,
    pub target: Angle,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub p: u64,
    pub q_max: u64,
    pub rows: Vec<ConstraintRow>,
}

/// `[[D, a], [-pB, q]]` with `B` the least positive solution of
/// `a p B ≡ 1 (mod q)` and `D = (1 - a p B) / q`.
pub fn pretend_matrix(p: u64, a: i64, q: i64) -> Result<(Mat2, i64)> {
    let b = canonical_b(p, a, q)?;
    Ok((pretend_matrix_with_b(p, a, q, b)?, b))
}

fn canonical_b(p: u64, a: i64, q: i64) -> Result<i64> {
    if q <= 0 || q.rem_euclid(p as i64) == 0 || gcd(a, q) != 1 {
        return Err(Error::Invalid(format!(
            "no twist matrix for a = {a}, q = {q} at level {p}"
        )));
    }
    if q == 1 {
        return Ok(1);
    }
    let ap = (a as i128 * p as i128).rem_euclid(q as i128) as i64;
    let inv = mod_inv(ap, q).ok_or_else(|| Error::Invalid(format!("{a}p is not a unit mod {q}")))?;
    Ok(if inv == 0 { q } else { inv })
}

/// The matrix `[[D, a], [-pB, q]]` for a given `B`; `D` is forced by the
/// determinant.
pub fn pretend_matrix_with_b(p: u64, a: i64, q: i64, b: i64) -> Result<Mat2> {
    let apb = BigInt::from(a) * BigInt::from(p) * BigInt::from(b);
    let num = BigInt::one() - &apb;
    let qb = BigInt::from(q);
    if !(&num % &qb).is_zero() {
        return Err(Error::Invalid(format!(
            "B = {b} does not solve a p B ≡ 1 mod {q}"
        )));
    }
    let d = num / &qb;
    Mat2::new(d, BigInt::from(a), -BigInt::from(p) * BigInt::from(b), qb)
}

/// `upsilon(S) = 1`, `upsilon(T S^p T^-1) = 1` and `upsilon([[D, a], [-pB, q]])
/// = chi(q)` for `1 <= q <= q_max`, `p ∤ q`, `0 <= a < q` coprime to `q`.
pub fn pretend_constraints(
    gens: &GenSet,
    chi: &DirichletChar,
    q_max: u64,
) -> Result<ConstraintSystem> {
    let p = gens.p;
    let mut rows = Vec::new();
    let kappa = [
        ("S".to_string(), Mat2::s()),
        (
            "T S^p T^-1".to_string(),
            Mat2::from_i64(1, 0, -(p as i64), 1)?,
        ),
    ];
    for (name, m) in kappa {
        rows.push(ConstraintRow {
            exp: gens.abelianize_matrix(&m)?,
            matrix: m,
            target: Angle::zero(),
            provenance: Provenance::Kappa(name),
        });
    }
    let mut pairs = Vec::new();
    for q in 1..=q_max as i64 {
        if q % p as i64 == 0 {
            continue;
        }
        for a in 0..q {
            if gcd(a, q) == 1 {
                pairs.push((a, q));
            }
        }
    }
    let built: Vec<Result<ConstraintRow>> = pairs
        .par_iter()
        .map(|&(a, q)| {
            let (m, b) = pretend_matrix(p, a, q)?;
            if !m.in_gamma0(p) {
                return Err(Error::NotInGamma0(m.to_string(), p));
            }
            Ok(ConstraintRow {
                exp: gens.abelianize_matrix(&m)?,
                matrix: m,
                target: chi.angle(q).expect("p does not divide q"),
                provenance: Provenance::Pretend { q, a, b },
            })
        })
        .collect();
    for r in built {
        rows.push(r?);
    }
    Ok(ConstraintSystem { p, q_max, rows })
}

#[derive(Clone, Debug)]
pub struct PretendSolution {
    /// `upsilon = upsilon' upsilon_chi`.
    pub multiplier: MultiplierSystem,
    pub character_multiplier: MultiplierSystem,
    pub free_rank: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    /// Kernel basis over the free generators, one entry per free slot.
    pub kernel_basis: Vec<Vec<Rational>>,
    pub kernel_index: usize,
    pub rows: usize,
    /// `2 + Q^2/2 + 5 <= l`.
    pub heuristic_bound_holds: bool,
    pub lift_checks: usize,
}

fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

/// Solves the pretend system: `upsilon_chi` is a particular solution and the
/// kernel over the free generators (elliptic generators pinned) supplies the
/// irrational part.
pub fn solve_pretend(
    cs: &ConstraintSystem,
    chi: &DirichletChar,
    gens: &GenSet,
    kernel_index: usize,
) -> Result<PretendSolution> {
    let base = char_multiplier(chi, gens)?;
    for row in &cs.rows {
        let got = base.apply(gens, &row.exp);
        if got != row.target {
            return Err(Error::Inconsistent(format!(
                "character multiplier fails row {:?}: {got} != {}",
                row.provenance, row.target
            )));
        }
    }
    let nf = gens.signature.free_rank();
    let int_rows: Vec<Vec<i64>> = cs.rows.iter().map(|r| r.exp.free.clone()).collect();
    let mat: Matrix<Rational> = Matrix::from_integer_rows(&int_rows, nf);
    let rank = mat.rank(&Rational::zero());
    let rank_check = bareiss_rank(&int_rows, nf);
    if rank != rank_check {
        return Err(Error::Inconsistent(format!(
            "rank disagreement: elimination {rank}, fraction-free {rank_check}"
        )));
    }
    let kernel_basis: Vec<Vec<Rational>> = mat
        .kernel(&Rational::zero())
        .iter()
        .map(|v| primitive_integer_vector(v))
        .collect();
    let kernel_dim = kernel_basis.len();
    debug_assert_eq!(kernel_dim, nf - rank);

    let mut multiplier = base.clone();
    if kernel_dim > 0 {
        if kernel_index >= kernel_dim {
            return Err(Error::Invalid(format!(
                "kernel index {kernel_index} out of range for kernel of dimension {kernel_dim}"
            )));
        }
        let v = &kernel_basis[kernel_index];
        for i in 0..gens.len() {
            let (kind, k) = gens.exp_slot(i);
            if kind == 0 {
                let irr = Angle::new(Rational::zero(), v[k].clone());
                multiplier.angles[i] = &multiplier.angles[i] + &irr;
            }
        }
    }
    multiplier.validate(gens)?;

    for row in &cs.rows {
        if multiplier.apply(gens, &row.exp) != row.target {
            return Err(Error::Inconsistent(format!(
                "solution fails row {:?}",
                row.provenance
            )));
        }
    }
    // fresh B-lifts, evaluated through the full word decomposition
    let mut rng = ChaCha8Rng::seed_from_u64(cs.p.wrapping_mul(1_000_003) ^ cs.q_max);
    let mut lift_checks = 0;
    for row in &cs.rows {
        if let Provenance::Pretend { q, a, b } = row.provenance {
            let b2 = b + q * rng.gen_range(-50..=50);
            let m = pretend_matrix_with_b(cs.p, a, q, b2)?;
            let w = gens.decompose_gamma0(&m)?;
            let got = multiplier.apply(gens, &gens.abelianize(&w)?);
            if got != row.target {
                return Err(Error::Inconsistent(format!(
                    "solution fails the lift B = {b2} of row {:?}",
                    row.provenance
                )));
            }
            lift_checks += 1;
        }
    }
    let q = cs.q_max as f64;
    Ok(PretendSolution {
        multiplier,
        character_multiplier: base,
        free_rank: nf,
        rank,
        kernel_dim,
        kernel_basis,
        kernel_index,
        rows: cs.rows.len(),
        heuristic_bound_holds: 2.0 + q * q / 2.0 + 5.0 <= gens.signature.l as f64,
        lift_checks,
    })
}

/// Abelianized image of `T S^p T^-1` and its torsion structure.
#[derive(Clone, Debug, Serialize)]
pub struct SixthRootReport {
    pub p: u64,
    pub image: ExpVector,
    /// `k` with free part `= k * e_S`, if the free part is a multiple of S.
    pub multiple_of_s: Option<i64>,
    pub torsion_zero: bool,
    /// Order of the torsion component (divides 6).
    pub torsion_order: u64,
    pub expects_trivial: bool,
    pub consistent: bool,
}

pub fn sixth_root_check(gens: &GenSet) -> Result<SixthRootReport> {
    let p = gens.p;
    let image = gens.abelianize_matrix(&Mat2::from_i64(1, 0, -(p as i64), 1)?)?;
    let (kind, s_slot) = gens.exp_slot(gens.index_of_label("S")?);
    debug_assert_eq!(kind, 0);
    let multiple_of_s = image
        .free
        .iter()
        .enumerate()
        .all(|(i, &x)| i == s_slot || x == 0)
        .then(|| image.free[s_slot]);
    let torsion_zero = image.torsion_is_zero();
    let o2 = if image.tor2.iter().any(|&x| x != 0) { 2 } else { 1 };
    let o3 = if image.tor3.iter().any(|&x| x != 0) { 3 } else { 1 };
    let expects_trivial = p % 12 == 11;
    Ok(SixthRootReport {
        p,
        multiple_of_s,
        torsion_zero,
        torsion_order: o2 * o3,
        expects_trivial,
        consistent: multiple_of_s.is_some() && (torsion_zero == expects_trivial),
        image,
    })
}

/// Result of comparing the constraint matrices for `B` and `B + t q`.
#[derive(Clone, Debug)]
pub struct BInvariance {
    pub a: i64,
    pub q: i64,
    pub b: i64,
    pub b_prime: i64,
    pub difference: ExpVector,
    /// `(x, y)` with `difference = x [S] + y [T S^p T^-1]`.
    pub kappa_combination: Option<(i64, i64)>,
}

impl BInvariance {
    pub fn holds(&self) -> bool {
        self.kappa_combination.is_some()
    }
}

/// Exact check that the two matrices differ by an element of the span of
/// the kappa constraints, so every multiplier with `kappa_I = kappa_T = 0`
/// takes equal values on them.
pub fn b_invariance(gens: &GenSet, a: i64, q: i64, b: i64, t: i64) -> Result<BInvariance> {
    let p = gens.p;
    let b_prime = b + t * q;
    let m = pretend_matrix_with_b(p, a, q, b)?;
    let m2 = pretend_matrix_with_b(p, a, q, b_prime)?;
    let difference = gens
        .abelianize_matrix(&m2)?
        .sub(&gens.abelianize_matrix(&m)?);
    let s_vec = gens.abelianize_matrix(&Mat2::s())?;
    let p_vec = gens.abelianize_matrix(&Mat2::from_i64(1, 0, -(p as i64), 1)?)?;
    let (_, s_slot) = gens.exp_slot(gens.index_of_label("S")?);
    let mut kappa_combination = None;
    for y in -6..=6i64 {
        let rest = difference.sub(&p_vec.scale(y));
        let only_s = rest.torsion_is_zero()
            && rest.free.iter().enumerate().all(|(i, &x)| i == s_slot || x == 0);
        if only_s {
            let x = rest.free[s_slot];
            debug_assert_eq!(difference, s_vec.scale(x).add(&p_vec.scale(y)));
            kappa_combination = Some((x, y));
            break;
        }
    }
    Ok(BInvariance {
        a,
        q,
        b,
        b_prime,
        difference,
        kappa_combination,
    })
}

/// Random `(a, q)` with `1 <= q <= q_max`, `p ∤ q`, `gcd(a, q) = 1`.
pub fn random_twist<R: Rng>(rng: &mut R, p: u64, q_max: i64) -> (i64, i64) {
    loop {
        let q = rng.gen_range(1..=q_max);
        if q % p as i64 == 0 {
            continue;
        }
        let a = rng.gen_range(0..q);
        if gcd(a, q) == 1 {
            return (a, q);
        }
    }
}

pub fn elliptic_labels(gens: &GenSet) -> Vec<&str> {
    gens.generators
        .iter()
        .filter(|g| g.order != Order::Infinite)
        .map(|g| g.label.as_str())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::build_presentation;

    #[test]
    fn quadratic_character_level_five() {
        let gens = build_presentation(5).unwrap();
        let chi = DirichletChar::quadratic(5).unwrap();
        let ms = char_multiplier(&chi, &gens).unwrap();
        assert_eq!(ms.angle_of("V_2").unwrap(), &Angle::from_ratio(1, 2));
        assert!(ms.angle_of("S").unwrap().is_zero());
        ms.validate(&gens).unwrap();
    }

    #[test]
    fn odd_character_rejected() {
        let gens = build_presentation(13).unwrap();
        let chi = DirichletChar::new(13, 1).unwrap();
        assert_eq!(char_multiplier(&chi, &gens).unwrap_err(), Error::OddCharacter);
    }

    #[test]
    fn widths() {
        assert_eq!(cusp_width(13, &Mat2::identity()), 1);
        assert_eq!(cusp_width(13, &Mat2::t()), 13);
        assert_eq!(cusp_width(13, &(&Mat2::t() * &Mat2::s_pow(3))), 13);
    }

    #[test]
    fn q_one_row_is_kappa_t() {
        let gens = build_presentation(13).unwrap();
        let (m, b) = pretend_matrix(13, 0, 1).unwrap();
        assert_eq!(b, 1);
        assert_eq!(m, Mat2::sl2(1, 0, -13, 1));
        let chi = DirichletChar::trivial(13).unwrap();
        let cs = pretend_constraints(&gens, &chi, 1).unwrap();
        assert_eq!(cs.rows.len(), 3);
        assert_eq!(cs.rows[1].exp, cs.rows[2].exp);
    }

    #[test]
    fn json_round_trip() {
        let gens = build_presentation(29).unwrap();
        let chi = DirichletChar::trivial(29).unwrap();
        let cs = pretend_constraints(&gens, &chi, 1).unwrap();
        let sol = solve_pretend(&cs, &chi, &gens, 0).unwrap();
        assert!(sol.kernel_dim >= 1);
        let back = MultiplierSystem::from_json(&sol.multiplier.to_json()).unwrap();
        assert_eq!(back, sol.multiplier);
        assert!(back.has_infinite_order());
    }
}
