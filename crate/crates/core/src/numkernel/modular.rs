use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::factorize;
use crate::{Error, Result};

/// `x ≡ residue (mod modulus)` with `residue < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

impl Congruence {
    pub fn new(residue: i128, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        let r = residue.rem_euclid(modulus as i128) as u64;
        Ok(Congruence {
            residue: r,
            modulus,
        })
    }

    pub fn holds(&self, x: i128) -> bool {
        x.rem_euclid(self.modulus as i128) as u64 == self.residue
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut r = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    r as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i128, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let m_i = m as i128;
    let g = i128::extended_gcd(&a.rem_euclid(m_i), &m_i);
    if g.gcd != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(g.x.rem_euclid(m_i) as u64)
}

pub fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if !m.is_positive() {
        return None;
    }
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return if m.is_one() { Some(BigInt::zero()) } else { None };
    }
    Some(g.x.mod_floor(m))
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Euler's totient.
pub fn totient(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.entries()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Solve a system of congruences; moduli need not be coprime.
pub fn crt_solve(congruences: &[Congruence]) -> Result<Congruence> {
    let mut acc = Congruence {
        residue: 0,
        modulus: 1,
    };
    for c in congruences {
        if c.modulus == 0 || c.residue >= c.modulus {
            return Err(Error::invalid(format!("malformed congruence {c:?}")));
        }
        let (r1, m1) = (acc.residue as i128, acc.modulus as i128);
        let (r2, m2) = (c.residue as i128, c.modulus as i128);
        let g = m1.gcd(&m2);
        if (r2 - r1) % g != 0 {
            return Err(Error::NoSolution(format!(
                "x ≡ {r1} (mod {m1}) and x ≡ {r2} (mod {m2}) are inconsistent"
            )));
        }
        let lcm = m1 / g * m2;
        if lcm > u64::MAX as i128 {
            return Err(Error::range("u64 modulus", format!("lcm {lcm} overflows u64")));
        }
        // r1 + m1 * k with k ≡ (r2 - r1)/g * (m1/g)^{-1} (mod m2/g)
        let m2g = m2 / g;
        let inv = mod_inverse(m1 / g, m2g as u64).expect("coprime after dividing gcd");
        let k = (((r2 - r1) / g).rem_euclid(m2g) as u128 * inv as u128 % m2g as u128) as i128;
        let x = (r1 + m1 * k).rem_euclid(lcm);
        acc = Congruence {
            residue: x as u64,
            modulus: lcm as u64,
        };
    }
    Ok(acc)
}

/// CRT over arbitrary precision with pairwise coprime moduli.
pub fn crt_solve_big(system: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (ri, mi) in system {
        if !mi.is_positive() {
            return Err(Error::invalid("moduli must be positive"));
        }
        if !m.gcd(mi).is_one() {
            return Err(Error::invalid("moduli must be pairwise coprime"));
        }
        let inv = mod_inverse_big(&m, mi).expect("coprime");
        let k = ((ri - &r).mod_floor(mi) * inv).mod_floor(mi);
        r += &m * k;
        m *= mi;
        r = r.mod_floor(&m);
    }
    Ok((r, m))
}

/// Multiplicative order of `g` modulo `m` (requires gcd(g, m) = 1).
pub fn multiplicative_order(g: u64, m: u64) -> Result<u64> {
    if gcd(g % m.max(1), m) != 1 {
        return Err(Error::invalid(format!("{g} is not a unit mod {m}")));
    }
    let phi = totient(m)?;
    let mut order = phi;
    for p in factorize(phi)?.primes() {
        while order % p == 0 && pow_mod(g, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Odd prime power `p^u` as `(p, u)`, or an error.
fn odd_prime_power(modulus: u64) -> Result<(u64, u32)> {
    let f = factorize(modulus)?;
    match f.entries() {
        [(p, u)] if *p != 2 => Ok((*p, *u)),
        _ => Err(Error::invalid(format!(
            "{modulus} is not a power of an odd prime"
        ))),
    }
}

/// Smallest generator of the cyclic group `(Z/p^u)^×`, `p` odd.
pub fn primitive_root(p: u64, u: u32) -> Result<u64> {
    if p == 2 {
        return Err(Error::Unsupported(
            "(Z/2^u)^× is not cyclic for u ≥ 3; use the ⟨-1⟩×⟨5⟩ structure".into(),
        ));
    }
    let pu = p
        .checked_pow(u)
        .ok_or_else(|| Error::range("ARG_MAX=2^63", "prime power overflows"))?;
    odd_prime_power(pu)?;
    let phi = (p - 1) * p.pow(u - 1);
    let factors: Vec<u64> = factorize(phi)?.primes().collect();
    (2..pu)
        .find(|&g| g % p != 0 && factors.iter().all(|&q| pow_mod(g, phi / q, pu) != 1))
        .ok_or_else(|| Error::NoSolution(format!("no generator mod {pu}")))
}

/// `r` in `[0, φ(p^u))` with `g^r ≡ x (mod p^u)`, by baby-step giant-step.
pub fn discrete_log(g: u64, x: i128, modulus: u64) -> Result<u64> {
    let (p, u) = odd_prime_power(modulus)?;
    let x = x.rem_euclid(modulus as i128) as u64;
    if x % p == 0 {
        return Err(Error::invalid(format!("{x} shares a factor with {modulus}")));
    }
    let phi = (p - 1) * p.pow(u - 1);
    if g % p == 0 || multiplicative_order(g, modulus)? != phi {
        return Err(Error::invalid(format!("{g} does not generate (Z/{modulus})^×")));
    }
    let step = (phi as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut cur = 1u64;
    for j in 0..step {
        baby.entry(cur).or_insert(j);
        cur = ((cur as u128 * g as u128) % modulus as u128) as u64;
    }
    let giant = pow_mod(
        mod_inverse(g as i128, modulus).expect("unit"),
        step,
        modulus,
    );
    let mut y = x;
    for i in 0..=step {
        if let Some(&j) = baby.get(&y) {
            return Ok((i * step + j) % phi);
        }
        y = ((y as u128 * giant as u128) % modulus as u128) as u64;
    }
    Err(Error::NoSolution(format!("no logarithm of {x} base {g}")))
}
