//! Twisted completed L-series, functional-equation checks and the converse
//! certifier.
//!
//! Functional equations are tested through modular relations and through
//! Mellin integrals split at two different heights.

mod character;
mod gamma;
mod lambda;

use num_complex::Complex;
use serde::Serialize;

pub use character::{gauss_sum, ModCharacter};
pub use gamma::{cgamma, ln_cgamma, upper_incomplete_gamma, upper_incomplete_gamma_scaled};
pub use lambda::{
    lambda_dirichlet, lambda_dirichlet_weighted, lambda_split, AdditiveTwist, LambdaValue,
    SplitData, Twist,
};

use crate::arith::numth::{gcd, mod_inv};
use crate::arith::Mat2;
use crate::error::{Error, Result};
use crate::multiplier::{Angle, DirichletChar, MultiplierSystem};
use crate::presentation::{compute_q, q_star, GenSet};
use crate::series::CoeffSeries;
use crate::C64;

fn e(turns: f64) -> C64 {
    Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * turns)
}

fn i_pow(k: i64) -> C64 {
    [
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(-1.0, 0.0),
        Complex::new(0.0, -1.0),
    ][k.rem_euclid(4) as usize]
}

/// Where the constant `upsilon([[D, a], [-pB, q]])` comes from.
#[derive(Clone, Copy)]
pub enum PhaseSource<'a> {
    /// Level one: every phase is trivial.
    Level1,
    /// `upsilon(gamma) = chi(d)`.
    Character(&'a DirichletChar),
    /// An explicit multiplier system on the generators.
    Multiplier(&'a GenSet, &'a MultiplierSystem),
}

impl PhaseSource<'_> {
    pub fn level(&self) -> u64 {
        match self {
            PhaseSource::Level1 => 1,
            PhaseSource::Character(chi) => chi.modulus,
            PhaseSource::Multiplier(gens, _) => gens.p,
        }
    }

    pub fn phase(&self, m: &Mat2) -> Result<Angle> {
        match self {
            PhaseSource::Level1 => Ok(Angle::zero()),
            PhaseSource::Character(chi) => {
                let d = (&m.d % num_bigint::BigInt::from(chi.modulus))
                    .try_into()
                    .unwrap_or(0i64);
                chi.angle(d).ok_or_else(|| Error::NotInGamma0(m.to_string(), chi.modulus))
            }
            PhaseSource::Multiplier(gens, ms) => ms.evaluate(gens, m),
        }
    }
}

/// The data of one additive functional equation
/// `Lambda(f, a/q, s) = i^k phase (p q^2)^{k/2 - s} Lambda(g, -B/q, k - s)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FEStatement {
    pub p: u64,
    pub k: i64,
    pub a: i64,
    pub q: u64,
    pub b: i64,
    pub d: i64,
    #[serde(serialize_with = "serialize_angle")]
    pub phase: Angle,
}

fn serialize_angle<S: serde::Serializer>(a: &Angle, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.to_string())
}

impl FEStatement {
    /// Checks `qD + apB = 1` and `p ∤ q` (level `p = 1` allows every `q`).
    pub fn new(p: u64, k: i64, a: i64, q: u64, b: i64, d: i64, phase: Angle) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invalid("q must be positive".into()));
        }
        if p > 1 && q % p == 0 {
            return Err(Error::DivisibleByLevel { q: q as i64, p });
        }
        let lhs = q as i128 * d as i128 + a as i128 * p as i128 * b as i128;
        if lhs != 1 {
            return Err(Error::Determinant(format!(
                "qD + apB = {lhs} for (a, q, B, D) = ({a}, {q}, {b}, {d})"
            )));
        }
        Ok(FEStatement { p, k, a, q, b, d, phase })
    }

    /// Resolves `B` as the least positive solution of `apB ≡ 1 (mod q)` and
    /// reads the phase from `source`.
    pub fn resolve(source: &PhaseSource<'_>, k: i64, a: i64, q: u64) -> Result<Self> {
        let p = source.level();
        let qi = q as i64;
        if q == 0 || gcd(a, qi) != 1 {
            return Err(Error::Invalid(format!("{a}/{q} is not a reduced twist")));
        }
        let b = if q == 1 {
            1
        } else {
            let ap = (a as i128 * p as i128).rem_euclid(q as i128) as i64;
            mod_inv(ap, qi).ok_or(Error::DivisibleByLevel { q: q as i64, p })?
        };
        let num = 1 - a as i128 * p as i128 * b as i128;
        let d = (num / q as i128) as i64;
        let mut fe = FEStatement::new(p, k, a, q, b, d, Angle::zero())?;
        fe.phase = source.phase(&fe.matrix())?;
        Ok(fe)
    }

    /// `[[D, a], [-pB, q]]`.
    pub fn matrix(&self) -> Mat2 {
        Mat2::sl2(self.d, self.a, -(self.p as i64) * self.b, self.q as i64)
    }

    pub fn level_factor(&self) -> f64 {
        self.p as f64 * (self.q as f64).powi(2)
    }

    pub fn twist(&self) -> AdditiveTwist {
        AdditiveTwist::new(self.a, self.q).expect("validated")
    }

    pub fn dual_twist(&self) -> AdditiveTwist {
        AdditiveTwist::new(-self.b, self.q).expect("validated")
    }

    /// `i^k e(phase)`.
    pub fn root_number(&self) -> C64 {
        i_pow(self.k) * self.phase.value()
    }

    /// The balance point `1 / (q sqrt p)`, where both sides decay alike.
    pub fn default_y0(&self) -> f64 {
        1.0 / (self.q as f64 * (self.p as f64).sqrt())
    }

    pub fn split<'a>(&self, f: &'a CoeffSeries<f64>, g: &'a CoeffSeries<f64>) -> SplitData<'a> {
        SplitData {
            f,
            twist: self.twist(),
            g,
            dual_twist: self.dual_twist(),
            level_factor: self.level_factor(),
            weight: self.k,
            root_number: self.root_number(),
        }
    }

    pub fn with_phase(&self, phase: Angle) -> Self {
        FEStatement { phase, ..self.clone() }
    }
}

/// `Lambda(f, a/q, s)` with dual data, or from the Dirichlet series when no
/// dual is known (then only for `Re s > sigma + 1`).
pub fn lambda_additive(
    f: &CoeffSeries<f64>,
    twist: AdditiveTwist,
    s: C64,
    y0: f64,
    dual: Option<(&CoeffSeries<f64>, &FEStatement)>,
) -> Result<LambdaValue<f64>> {
    match dual {
        Some((g, fe)) => {
            if fe.twist() != twist {
                return Err(Error::Inconsistent(format!(
                    "functional equation is for {}/{}, not {}/{}",
                    fe.a, fe.q, twist.a, twist.q
                )));
            }
            lambda_split(&fe.split(f, g), s, y0)
        }
        None => lambda_dirichlet(f, twist, s),
    }
}

/// Residual of one modular relation at one point.
#[derive(Clone, Debug, Serialize)]
pub struct ModularResidual {
    pub z: (f64, f64),
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    /// `|LHS - RHS| / max(|LHS|, |RHS|)`.
    pub residual: f64,
    /// Relative error estimate of the residual.
    pub error: f64,
}

/// `sum a_m e(am/q) e(mz)` against
/// `(-1)^k phase p^{-k/2} q^{-k} z^{-k} sum b_m e(-Bm/q) e(-m/(pq^2 z))`.
pub fn check_modular_relation(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    fe: &FEStatement,
    z: C64,
) -> Result<ModularResidual> {
    if z.im <= 0.0 {
        return Err(Error::NotUpperHalfPlane(format!("{z}")));
    }
    let q = fe.q as f64;
    let (lhs, el) = f.evaluate(z + fe.a as f64 / q)?;
    let w = -(fe.b as f64) / q - 1.0 / (fe.level_factor() * z);
    let (gv, eg) = g.evaluate(w)?;
    let k = fe.k as i32;
    let factor = Complex::new(if fe.k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        * fe.phase.value()
        * (fe.p as f64).powf(-(fe.k as f64) / 2.0)
        * q.powi(-k)
        * z.powi(-k);
    let rhs = factor * gv;
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    let rounding = 1e3 * f64::EPSILON;
    Ok(ModularResidual {
        z: (z.re, z.im),
        lhs: (lhs.re, lhs.im),
        rhs: (rhs.re, rhs.im),
        residual: (lhs - rhs).norm() / scale,
        error: (el + factor.norm() * eg) / scale + rounding,
    })
}

/// Options shared by the functional-equation checks.
#[derive(Clone, Debug, Serialize)]
pub struct FeOptions {
    /// Relative residual threshold before error bars are considered.
    pub tolerance: f64,
    /// Split point; the balance point when absent.
    pub y0: Option<f64>,
    /// Multiples of `y0` used for the split-independence cross-check.
    pub cross_check: Vec<f64>,
}

impl Default for FeOptions {
    fn default() -> Self {
        FeOptions {
            tolerance: 1e-6,
            y0: None,
            cross_check: vec![0.3, 3.0],
        }
    }
}

/// `{k/2, k/2 + i, k/2 + 3/2, sigma + 2}`.
pub fn default_s_grid(k: i64, sigma: f64) -> Vec<C64> {
    let h = k as f64 / 2.0;
    vec![
        Complex::new(h, 0.0),
        Complex::new(h, 1.0),
        Complex::new(h + 1.5, 0.0),
        Complex::new(sigma + 2.0, 0.0),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct FeSample {
    pub s: (f64, f64),
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub residual: f64,
    pub error: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub s: (f64, f64),
    pub y0: f64,
    pub residual: f64,
    pub error: f64,
    pub pass: bool,
}

/// Result of [`check_fe_additive`] or [`check_fe_multiplicative`].
#[derive(Clone, Debug, Serialize)]
pub struct FeReport {
    pub description: String,
    pub y0: f64,
    pub samples: Vec<FeSample>,
    pub cross_checks: Vec<CrossCheck>,
    /// Expected phase in turns.
    pub expected_phase: f64,
    /// Least-squares phase of `LHS / RHS'` where `RHS'` omits the phase.
    pub fitted_phase: f64,
    /// Circular distance between the two, in turns.
    pub phase_deviation: f64,
    pub max_residual: f64,
    pub pass: bool,
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn relative(x: C64, y: C64, ex: f64, ey: f64) -> (f64, f64) {
    let scale = x.norm().max(y.norm()).max(f64::MIN_POSITIVE);
    ((x - y).norm() / scale, (ex + ey) / scale)
}

struct SideValues {
    s: C64,
    lhs: LambdaValue<f64>,
    rhs_unphased: C64,
    rhs_error: f64,
}

fn assemble_report(
    description: String,
    y0: f64,
    expected: C64,
    sides: Vec<SideValues>,
    cross_checks: Vec<CrossCheck>,
    opts: &FeOptions,
) -> FeReport {
    let mut samples = Vec::new();
    let mut fit = Complex::new(0.0, 0.0);
    for sv in &sides {
        let rhs = expected * sv.rhs_unphased;
        let (residual, error) = relative(sv.lhs.value, rhs, sv.lhs.error, sv.rhs_error);
        let threshold = opts.tolerance.max(10.0 * error);
        let scale = sv.lhs.value.norm().max(sv.rhs_unphased.norm()).max(f64::MIN_POSITIVE);
        fit += sv.lhs.value * sv.rhs_unphased.conj() / (scale * scale);
        samples.push(FeSample {
            s: (sv.s.re, sv.s.im),
            lhs: (sv.lhs.value.re, sv.lhs.value.im),
            rhs: (rhs.re, rhs.im),
            residual,
            error,
            threshold,
            pass: residual <= threshold,
        });
    }
    let expected_phase = (expected.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
    let fitted_phase = (fit.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let pass = samples.iter().all(|s| s.pass) && cross_checks.iter().all(|c| c.pass);
    FeReport {
        description,
        y0,
        samples,
        cross_checks,
        expected_phase,
        fitted_phase,
        phase_deviation: circular_distance(expected_phase, fitted_phase),
        max_residual,
        pass,
    }
}

/// Split point used for the right-hand side: `sqrt 2` times the point that
/// would make the comparison an identity.
fn dual_y0(level_factor: f64, y0: f64) -> f64 {
    std::f64::consts::SQRT_2 / (level_factor * y0)
}

/// Checks `Lambda(f, a/q, s) = i^k phase N^{k/2-s} Lambda(g, -B/q, k - s)`
/// at each `s`, evaluating the two sides with different split points.
pub fn check_fe_additive(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    fe: &FEStatement,
    s_samples: &[C64],
    opts: &FeOptions,
) -> Result<FeReport> {
    let y0 = opts.y0.unwrap_or_else(|| fe.default_y0());
    let split = fe.split(f, g);
    let reversed = split.reversed();
    let n = fe.level_factor();
    let k = fe.k as f64;
    let y1 = dual_y0(n, y0);
    let mut sides = Vec::new();
    let mut cross = Vec::new();
    for &s in s_samples {
        let lhs = lambda_split(&split, s, y0)?;
        let dual = lambda_split(&reversed, Complex::new(k, 0.0) - s, y1)?;
        let factor = i_pow(fe.k) * (Complex::new(k / 2.0, 0.0) - s).expf(n);
        for &mult in &opts.cross_check {
            let other = lambda_split(&split, s, y0 * mult)?;
            let (residual, error) = relative(lhs.value, other.value, lhs.error, other.error);
            cross.push(CrossCheck {
                s: (s.re, s.im),
                y0: y0 * mult,
                residual,
                error,
                pass: residual <= opts.tolerance.max(10.0 * error),
            });
        }
        sides.push(SideValues {
            s,
            lhs,
            rhs_unphased: factor * dual.value,
            rhs_error: factor.norm() * dual.error,
        });
    }
    Ok(assemble_report(
        format!(
            "additive twist {}/{} at level {}, weight {}",
            fe.a, fe.q, fe.p, fe.k
        ),
        y0,
        fe.phase.value(),
        sides,
        cross,
        opts,
    ))
}

/// `Lambda(f, psi, s) = (1 / tau(conj psi)) sum' conj(psi)(a) Lambda(f, a/q, s)`,
/// each additive value split at `y0` through its own functional equation.
pub fn lambda_multiplicative(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    source: &PhaseSource<'_>,
    k: i64,
    psi: &ModCharacter,
    s: C64,
    y0: Option<f64>,
) -> Result<LambdaValue<f64>> {
    psi.require_primitive()?;
    let q = psi.modulus;
    let p = source.level();
    if p > 1 && q % p == 0 {
        return Err(Error::DivisibleByLevel { q: q as i64, p });
    }
    let tau_bar = gauss_sum(&psi.conj());
    let y0 = y0.unwrap_or(1.0 / (q as f64 * (p as f64).sqrt()));
    let mut value = Complex::new(0.0, 0.0);
    let mut error = 0.0;
    for a in 0..q as i64 {
        if gcd(a, q as i64) != 1 {
            continue;
        }
        let fe = FEStatement::resolve(source, k, a, q)?;
        let v = lambda_split(&fe.split(f, g), s, y0)?;
        value += psi.value(a).conj() * v.value;
        error += v.error;
    }
    Ok(LambdaValue {
        value: value / tau_bar,
        error: error / tau_bar.norm(),
        s,
        twist: Twist::Character {
            modulus: q,
            label: psi.label.clone(),
        },
        y0,
        m_max: f.max_index().min(g.max_index()),
    })
}

/// `Lambda(g, conj(psi), s)` assembled from the dual side of the equations
/// for `f`: the twist `b/q` of `g` is dual to `a/q` with `a ≡ -(bp)^{-1}`.
fn lambda_multiplicative_dual(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    source: &PhaseSource<'_>,
    k: i64,
    psi: &ModCharacter,
    s: C64,
    y0: f64,
) -> Result<LambdaValue<f64>> {
    let q = psi.modulus as i64;
    let p = source.level() as i64;
    let psi_bar = psi.conj();
    let tau = gauss_sum(psi);
    let mut value = Complex::new(0.0, 0.0);
    let mut error = 0.0;
    for b in 0..q {
        if gcd(b, q) != 1 {
            continue;
        }
        let a = if q == 1 {
            0
        } else {
            (-mod_inv((b * p).rem_euclid(q), q).ok_or(Error::DivisibleByLevel {
                q,
                p: p as u64,
            })?)
            .rem_euclid(q)
        };
        let fe = FEStatement::resolve(source, k, a, q as u64)?;
        let reversed = fe.split(f, g).reversed();
        debug_assert_eq!(reversed.twist, AdditiveTwist::new(b, q as u64)?);
        let v = lambda_split(&reversed, s, y0)?;
        value += psi_bar.value(b).conj() * v.value;
        error += v.error;
    }
    Ok(LambdaValue {
        value: value / tau,
        error: error / tau.norm(),
        s,
        twist: Twist::Character {
            modulus: q as u64,
            label: psi_bar.label.clone(),
        },
        y0,
        m_max: f.max_index().min(g.max_index()),
    })
}

/// Direct summation of `(2 pi)^{-s} Gamma(s) sum a_m psi(m) m^{-s}` for
/// `Re s > sigma + 1`.
pub fn lambda_multiplicative_direct(
    f: &CoeffSeries<f64>,
    psi: &ModCharacter,
    s: C64,
) -> Result<LambdaValue<f64>> {
    lambda_dirichlet_weighted(
        f,
        |m| psi.value(m as i64),
        Twist::Character {
            modulus: psi.modulus,
            label: psi.label.clone(),
        },
        s,
    )
}

/// Checks
/// `Lambda(f, psi, s) = i^k chi(q) psi(p) tau(psi)^2 / q (pq^2)^{k/2-s} Lambda(g, conj psi, k - s)`,
/// where `chi(q)` is the phase of the twist matrices from `source`.
pub fn check_fe_multiplicative(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    source: &PhaseSource<'_>,
    k: i64,
    psi: &ModCharacter,
    s_samples: &[C64],
    opts: &FeOptions,
) -> Result<FeReport> {
    psi.require_primitive()?;
    let q = psi.modulus;
    let p = source.level();
    let n = p as f64 * (q as f64).powi(2);
    let y0 = opts.y0.unwrap_or(1.0 / (q as f64 * (p as f64).sqrt()));
    let y1 = dual_y0(n, y0);
    let tau = gauss_sum(psi);
    let kf = k as f64;
    let chi_q = FEStatement::resolve(source, k, if q == 1 { 0 } else { 1 }, q)?
        .phase
        .value();
    let mut sides = Vec::new();
    let mut cross = Vec::new();
    for &s in s_samples {
        let lhs = lambda_multiplicative(f, g, source, k, psi, s, Some(y0))?;
        let dual = lambda_multiplicative_dual(f, g, source, k, psi, Complex::new(kf, 0.0) - s, y1)?;
        let factor = i_pow(k)
            * psi.value(p as i64)
            * tau
            * tau
            / q as f64
            * (Complex::new(kf / 2.0, 0.0) - s).expf(n);
        for &mult in &opts.cross_check {
            let other = lambda_multiplicative(f, g, source, k, psi, s, Some(y0 * mult))?;
            let (residual, error) = relative(lhs.value, other.value, lhs.error, other.error);
            cross.push(CrossCheck {
                s: (s.re, s.im),
                y0: y0 * mult,
                residual,
                error,
                pass: residual <= opts.tolerance.max(10.0 * error),
            });
        }
        sides.push(SideValues {
            s,
            lhs,
            rhs_unphased: factor * dual.value,
            rhs_error: factor.norm() * dual.error,
        });
    }
    Ok(assemble_report(
        format!("character {} at level {p}, weight {k}", psi.label),
        y0,
        chi_q,
        sides,
        cross,
        opts,
    ))
}

/// Both sides of
/// `(1/tau(conj psi)) sum' conj(psi)(a) X(-(ap)^{-1}) = psi(p) tau(psi)^2/q (1/tau(psi)) sum' psi(b) X(b)`
/// for a vector `X` indexed by residues mod `q`.
pub fn gauss_assembly_identity(psi: &ModCharacter, p: u64, x: &[C64]) -> Result<(C64, C64)> {
    let q = psi.modulus as i64;
    if x.len() != q as usize {
        return Err(Error::Invalid(format!(
            "test vector has {} entries, expected {q}",
            x.len()
        )));
    }
    if gcd(p as i64, q) != 1 {
        return Err(Error::DivisibleByLevel { q, p });
    }
    let tau = gauss_sum(psi);
    let tau_bar = gauss_sum(&psi.conj());
    let mut lhs = Complex::new(0.0, 0.0);
    let mut rhs = Complex::new(0.0, 0.0);
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let idx = if q == 1 {
            0
        } else {
            (-mod_inv((a * p as i64).rem_euclid(q), q).expect("unit")).rem_euclid(q)
        };
        lhs += psi.value(a).conj() * x[idx as usize];
        rhs += psi.value(a) * x[a as usize];
    }
    lhs /= tau_bar;
    rhs *= psi.value(p as i64) * tau * tau / q as f64 / tau;
    Ok((lhs, rhs))
}

/// One row of a [`Certificate`].
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCheck {
    pub q: u64,
    pub label: String,
    /// `[D, a, -pB, q]`.
    pub matrix: [i64; 4],
    pub residual: f64,
    pub error: f64,
    pub pass: bool,
}

/// Outcome of [`certify_modularity`].
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub p: u64,
    pub k: i64,
    pub chi: String,
    #[serde(rename = "Q")]
    pub q_set: Vec<u64>,
    pub tolerance: f64,
    pub per_generator: Vec<GeneratorCheck>,
    pub verdict: bool,
    pub failing: Option<String>,
    pub conclusion: String,
}

impl Certificate {
    /// Turns a failed verdict into an error naming the first failing generator.
    pub fn into_result(self) -> Result<Certificate> {
        match &self.failing {
            Some(name) => Err(Error::Inconsistent(format!(
                "modular relation fails for {name}"
            ))),
            None => Ok(self),
        }
    }
}

/// Angles of the test points `y0 e^{i theta}` on the balance circle.
pub const CERTIFY_ANGLES: [f64; 3] = [0.5, 0.4, 0.65];

/// Verifies the Fricke relation `f = g |_k W_p` (tuple `(-1, 1, -1, 1 - p)`)
/// and, for every `q` in the computed set `Q` other than 1, the relation for
/// `V_q = [[-q*, -1], [qq* + 1, q]]` (tuple `(-1, q, -(qq*+1)/p, -q*)`).
/// Invariance under `S` holds for any q-expansion.
pub fn certify_modularity(
    f: &CoeffSeries<f64>,
    g: &CoeffSeries<f64>,
    p: u64,
    k: i64,
    chi: &DirichletChar,
    tolerance: f64,
) -> Result<Certificate> {
    if chi.modulus != p {
        return Err(Error::Invalid(format!(
            "character modulus {} differs from level {p}",
            chi.modulus
        )));
    }
    let source = PhaseSource::Character(chi);
    let q_set: Vec<u64> = compute_q(p)?.into_iter().collect();
    let mut tuples: Vec<(String, FEStatement)> = Vec::new();
    let fricke = FEStatement::new(p, k, -1, 1, -1, 1 - p as i64, Angle::zero())?;
    let phase = source.phase(&fricke.matrix())?;
    tuples.push(("W_p (q = 1)".into(), fricke.with_phase(phase)));
    for &q in q_set.iter().filter(|&&q| q != 1) {
        let qs = q_star(p, q as i64)?;
        let b = -(q as i64 * qs + 1) / p as i64;
        let fe = FEStatement::new(p, k, -1, q, b, -qs, Angle::zero())?;
        let phase = source.phase(&fe.matrix())?;
        tuples.push((format!("V_{q}"), fe.with_phase(phase)));
    }
    let mut per_generator = Vec::new();
    for (label, fe) in tuples {
        let y0 = fe.default_y0();
        let mut residual: f64 = 0.0;
        let mut error: f64 = 0.0;
        for theta in CERTIFY_ANGLES {
            let z = Complex::from_polar(y0, std::f64::consts::PI * theta);
            let r = check_modular_relation(f, g, &fe, z)?;
            residual = residual.max(r.residual);
            error = error.max(r.error);
        }
        let m = fe.matrix();
        per_generator.push(GeneratorCheck {
            q: fe.q,
            label,
            matrix: m.to_i64s().expect("small entries"),
            residual,
            error,
            pass: residual <= tolerance.max(10.0 * error) && residual.is_finite(),
        });
    }
    let failing = per_generator.iter().find(|c| !c.pass).map(|c| c.label.clone());
    let verdict = failing.is_none();
    let conclusion = if verdict {
        format!(
            "coefficients are consistent with a weight-{k}, character-{} cusp form on Gamma0({p}) at tolerance {tolerance:e}",
            chi.label()
        )
    } else {
        format!(
            "modular relation fails for {}",
            failing.as_deref().unwrap_or("?")
        )
    };
    Ok(Certificate {
        p,
        k,
        chi: chi.label(),
        q_set,
        tolerance,
        per_generator,
        verdict,
        failing,
        conclusion,
    })
}

/// `e(x)` for a real number of turns.
pub fn turns_to_unit(x: f64) -> C64 {
    e(x)
}
