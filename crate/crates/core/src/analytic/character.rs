//! Dirichlet characters to an arbitrary modulus and Gauss sums.

use num_complex::Complex;

use crate::arith::numth::{divisors, factorize, gcd, primitive_root};
use crate::error::{Error, Result};
use crate::multiplier::{Angle, DirichletChar};
use crate::C64;

/// A character mod `q`, stored as its table of angles on `0..q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModCharacter {
    pub modulus: u64,
    table: Vec<Option<Angle>>,
    pub label: String,
}

/// Cyclic factors of `(Z/q)^x`: `(modulus of the prime-power component,
/// generator as an element of Z/q via CRT, order)`.
fn cyclic_factors(q: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for (pr, e) in factorize(q) {
        let pe = pr.pow(e);
        let mut gens: Vec<(u64, u64)> = Vec::new();
        if pr == 2 {
            if e >= 2 {
                gens.push((pe - 1, 2));
            }
            if e >= 3 {
                gens.push((5, pe / 4));
            }
        } else {
            let mut g = primitive_root(pr);
            // lift to a generator mod p^e
            if e >= 2 && pow_mod_u(g, pr - 1, pr * pr) == 1 {
                g += pr;
            }
            gens.push((g, pe - pe / pr));
        }
        for (g, ord) in gens {
            out.push((pe, crt_lift(q, pe, g), ord));
        }
    }
    out
}

fn pow_mod_u(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b) = (1u128, b as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// The element of `Z/q` that is `g` mod `pe` and `1` mod `q / pe`.
fn crt_lift(q: u64, pe: u64, g: u64) -> u64 {
    (0..q / pe)
        .map(|k| g + k * pe)
        .find(|x| x % (q / pe) == 1 % (q / pe))
        .expect("CRT solution exists")
}

impl ModCharacter {
    /// All `phi(q)` characters mod `q`, the principal one first.
    pub fn all(q: u64) -> Vec<ModCharacter> {
        if q == 1 {
            return vec![ModCharacter {
                modulus: 1,
                table: vec![Some(Angle::zero())],
                label: "trivial mod 1".into(),
            }];
        }
        let factors = cyclic_factors(q);
        // discrete logs of every unit with respect to the generators
        let mut logs: Vec<Option<Vec<u64>>> = vec![None; q as usize];
        let mut idx = vec![0u64; factors.len()];
        loop {
            let mut x = 1u128;
            for (f, &(_, g, _)) in factors.iter().enumerate() {
                x = x * pow_mod_u(g, idx[f], q) as u128 % q as u128;
            }
            logs[x as usize] = Some(idx.clone());
            let mut f = 0;
            while f < factors.len() {
                idx[f] += 1;
                if idx[f] < factors[f].2 {
                    break;
                }
                idx[f] = 0;
                f += 1;
            }
            if f == factors.len() {
                break;
            }
        }
        let mut chars = Vec::new();
        let mut exps = vec![0u64; factors.len()];
        loop {
            let table = logs
                .iter()
                .map(|l| {
                    l.as_ref().map(|l| {
                        l.iter()
                            .zip(&exps)
                            .zip(&factors)
                            .fold(Angle::zero(), |acc, ((&li, &ei), &(_, _, ord))| {
                                &acc + &Angle::from_ratio((li * ei % ord) as i64, ord as i64)
                            })
                    })
                })
                .collect();
            chars.push(ModCharacter {
                modulus: q,
                table,
                label: format!("mod {q} {exps:?}"),
            });
            let mut f = 0;
            while f < factors.len() {
                exps[f] += 1;
                if exps[f] < factors[f].2 {
                    break;
                }
                exps[f] = 0;
                f += 1;
            }
            if f == factors.len() {
                break;
            }
        }
        chars
    }

    pub fn principal(q: u64) -> ModCharacter {
        ModCharacter::all(q).swap_remove(0)
    }

    pub fn primitive(q: u64) -> Vec<ModCharacter> {
        ModCharacter::all(q)
            .into_iter()
            .filter(|c| c.is_primitive())
            .collect()
    }

    /// The Legendre symbol mod an odd prime `q`.
    pub fn legendre(q: u64) -> Result<ModCharacter> {
        let dc = DirichletChar::quadratic(q)?;
        let mut c = ModCharacter::from_prime_character(&dc);
        c.label = format!("quadratic mod {q}");
        Ok(c)
    }

    pub fn from_prime_character(chi: &DirichletChar) -> ModCharacter {
        let q = chi.modulus;
        ModCharacter {
            modulus: q,
            table: (0..q as i64).map(|a| chi.angle(a)).collect(),
            label: format!("chi mod {q}, {}", chi.label()),
        }
    }

    pub fn angle(&self, a: i64) -> Option<&Angle> {
        self.table[a.rem_euclid(self.modulus as i64) as usize].as_ref()
    }

    pub fn value(&self, a: i64) -> C64 {
        self.angle(a).map_or(Complex::new(0.0, 0.0), |x| x.value())
    }

    pub fn conj(&self) -> ModCharacter {
        ModCharacter {
            modulus: self.modulus,
            table: self.table.iter().map(|a| a.as_ref().map(|x| -x)).collect(),
            label: format!("conj({})", self.label),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().flatten().all(|a| a.is_zero())
    }

    pub fn is_even(&self) -> bool {
        self.angle(-1).is_some_and(|a| a.is_zero())
    }

    /// Not induced from any proper divisor of the modulus.
    pub fn is_primitive(&self) -> bool {
        let q = self.modulus;
        if q == 1 {
            return true;
        }
        !divisors(q).into_iter().filter(|&d| d < q).any(|d| {
            (0..q as i64)
                .filter(|&a| gcd(a, q as i64) == 1 && (a - 1).rem_euclid(d as i64) == 0)
                .all(|a| self.angle(a).is_some_and(|x| x.is_zero()))
        })
    }

    pub fn require_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Error::NotPrimitive)
        }
    }
}

/// `tau(psi) = sum_{a mod q} psi(a) e(a/q)`.
pub fn gauss_sum(psi: &ModCharacter) -> C64 {
    let q = psi.modulus;
    (0..q as i64)
        .map(|a| {
            psi.value(a)
                * Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / q as f64)
        })
        .sum()
}
