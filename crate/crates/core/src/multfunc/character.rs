use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::unit::{Turn, UnitValue};
use crate::numkernel::{factorize, is_prime, primitive_root, totient};
use crate::{Error, Result};

/// Largest modulus for which a character table is built.
pub const CHARACTER_MODULUS_BUDGET: u64 = 10_000_000;

const NON_UNIT: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Component {
    prime: u64,
    exp: u32,
    modulus: u64,
    /// Numerator of the value angle over `order`, per residue.
    table: Vec<u32>,
    order: u64,
}

impl Component {
    fn build(prime: u64, exp: u32, index: &[u64]) -> Result<Component> {
        let modulus = prime.pow(exp);
        let mut table = vec![NON_UNIT; modulus as usize];
        let order;
        if prime != 2 {
            let phi = totient(modulus)?;
            let j = index[0];
            if j >= phi {
                return Err(Error::invalid(format!(
                    "index {j} out of range for modulus {modulus} (must be < {phi})"
                )));
            }
            order = phi;
            let g = primitive_root(prime, exp)?;
            let mut x = 1u64;
            for r in 0..phi {
                table[x as usize] = ((j * r) % phi) as u32;
                x = x * g % modulus;
            }
        } else if exp <= 2 {
            let j = index[0];
            let phi = modulus / 2;
            if j >= phi {
                return Err(Error::invalid(format!(
                    "index {j} out of range for modulus {modulus} (must be < {phi})"
                )));
            }
            order = phi;
            table[1] = 0;
            if exp == 2 {
                table[3] = j as u32;
            }
        } else {
            let (i, j) = (index[0], index[1]);
            let half = modulus / 4;
            if i >= 2 || j >= half {
                return Err(Error::invalid(format!(
                    "index pair ({i},{j}) out of range for modulus {modulus} (must be < (2,{half}))"
                )));
            }
            order = modulus / 2;
            let mut five = 1u64;
            for s in 0..half {
                for a in 0..2u64 {
                    let x = if a == 0 { five } else { modulus - five };
                    table[x as usize] = ((i * a * half + 2 * j * s) % order) as u32;
                }
                five = five * 5 % modulus;
            }
        }
        Ok(Component {
            prime,
            exp,
            modulus,
            table,
            order,
        })
    }

    fn conductor(&self) -> u64 {
        let mut d = 1u64;
        for _ in 0..=self.exp {
            let trivial = (1..self.modulus)
                .step_by(d as usize)
                .all(|x| self.table[x as usize] == 0 || self.table[x as usize] == NON_UNIT);
            if trivial {
                return d;
            }
            d *= self.prime;
        }
        self.modulus
    }
}

/// Index slots consumed by the component `p^k`.
fn slots(prime: u64, exp: u32) -> usize {
    if prime == 2 && exp >= 3 {
        2
    } else {
        1
    }
}

/// A Dirichlet character mod `q`, assembled from its prime-power components.
///
/// The index holds one entry per odd prime power (the exponent applied to the
/// smallest primitive root), one for `2` or `4`, and a pair `(i, j)` for `2^k`,
/// `k ≥ 3`, acting on `(-1)^i 5^j`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    index: Vec<u64>,
    components: Vec<Component>,
    order: u64,
    conductor: u64,
}

impl DirichletCharacter {
    pub fn new(modulus: u64, index: &[u64]) -> Result<DirichletCharacter> {
        if modulus == 0 {
            return Err(Error::invalid("character modulus must be positive"));
        }
        if modulus > CHARACTER_MODULUS_BUDGET {
            return Err(Error::range(
                "CHARACTER_MODULUS_BUDGET=10^7",
                format!("modulus {modulus}"),
            ));
        }
        let f = factorize(modulus)?;
        let needed: usize = f.entries().iter().map(|&(p, e)| slots(p, e)).sum();
        let index = if index.is_empty() && needed > 0 {
            vec![0; needed]
        } else {
            index.to_vec()
        };
        if index.len() != needed {
            return Err(Error::invalid(format!(
                "modulus {modulus} needs {needed} index entries, got {}",
                index.len()
            )));
        }
        let mut components = Vec::new();
        let mut at = 0;
        for &(p, e) in f.entries() {
            let k = slots(p, e);
            components.push(Component::build(p, e, &index[at..at + k])?);
            at += k;
        }
        let order = components.iter().fold(1u64, |l, c| l.lcm(&c.order));
        let conductor = components.iter().map(Component::conductor).product();
        Ok(DirichletCharacter {
            modulus,
            index,
            components,
            order,
            conductor,
        })
    }

    pub fn principal(modulus: u64) -> Result<DirichletCharacter> {
        Self::new(modulus, &[])
    }

    /// Every character mod `q`, in lexicographic index order.
    pub fn all(modulus: u64) -> Result<Vec<DirichletCharacter>> {
        let ranges = index_ranges(modulus)?;
        let mut out = Vec::new();
        let mut idx = vec![0u64; ranges.len()];
        loop {
            out.push(Self::new(modulus, &idx)?);
            let mut k = ranges.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < ranges[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.index.iter().all(|&j| j == 0)
    }

    /// Exponent of the value group: every value is an `order`-th root of unity.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Primes dividing the modulus (where the character vanishes).
    pub fn zero_primes(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.prime).collect()
    }

    /// Value angle numerator over `order()`, or `None` off the units.
    pub fn angle_numerator(&self, n: u64) -> Option<u64> {
        let mut acc = 0u64;
        for c in &self.components {
            let v = c.table[(n % c.modulus) as usize];
            if v == NON_UNIT {
                return None;
            }
            acc = (acc + v as u64 * (self.order / c.order)) % self.order;
        }
        Some(acc)
    }

    pub fn value(&self, n: u64) -> UnitValue {
        match self.angle_numerator(n) {
            None => UnitValue::Zero,
            Some(a) => UnitValue::Exact(Turn::new(a as i128, self.order).expect("order > 0")),
        }
    }

    /// Value at an arbitrary integer (negative arguments reduce mod `q`).
    pub fn value_signed(&self, n: i128) -> UnitValue {
        self.value(n.rem_euclid(self.modulus as i128) as u64)
    }

    pub fn value_big(&self, n: &BigUint) -> UnitValue {
        let r = (n % self.modulus).to_u64().expect("residue fits");
        self.value(r)
    }

    pub fn conj(&self) -> DirichletCharacter {
        let mut idx = Vec::with_capacity(self.index.len());
        let mut at = 0;
        for c in &self.components {
            if c.prime == 2 && c.exp >= 3 {
                let half = c.modulus / 4;
                idx.push((2 - self.index[at]) % 2);
                idx.push((half - self.index[at + 1]) % half);
                at += 2;
            } else {
                let phi = if c.prime == 2 {
                    c.modulus / 2
                } else {
                    c.modulus / c.prime * (c.prime - 1)
                };
                idx.push((phi - self.index[at]) % phi);
                at += 1;
            }
        }
        Self::new(self.modulus, &idx).expect("conjugate index is valid")
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "char({}", self.modulus)?;
        for j in &self.index {
            write!(f, ",{j}")?;
        }
        write!(f, ")")
    }
}

/// Number of choices for each index slot of a modulus.
pub fn index_ranges(modulus: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::invalid("character modulus must be positive"));
    }
    let mut out = Vec::new();
    for &(p, e) in factorize(modulus)?.entries() {
        let pe = p.pow(e);
        if p == 2 && e >= 3 {
            out.push(2);
            out.push(pe / 4);
        } else if p == 2 {
            out.push(pe / 2);
        } else {
            out.push(pe / p * (p - 1));
        }
    }
    Ok(out)
}

/// The character mod `p^u` sending the smallest primitive root to `e(1/φ(p^u))`.
pub fn cyclic_character(p: u64, u: u32) -> Result<DirichletCharacter> {
    if p == 2 {
        return Err(Error::Unsupported(
            "cyclic_character needs an odd prime; (Z/2^u)^× is not cyclic".into(),
        ));
    }
    if !is_prime(p) || u == 0 {
        return Err(Error::invalid(format!(
            "cyclic_character needs an odd prime and u ≥ 1, got ({p},{u})"
        )));
    }
    let q = p
        .checked_pow(u)
        .filter(|&q| q <= CHARACTER_MODULUS_BUDGET)
        .ok_or_else(|| Error::range("CHARACTER_MODULUS_BUDGET=10^7", format!("{p}^{u}")))?;
    DirichletCharacter::new(q, &[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn turn(n: i128, d: u64) -> UnitValue {
        UnitValue::Exact(Turn::new(n, d).unwrap())
    }

    #[test]
    fn mod_four() {
        let chi = DirichletCharacter::new(4, &[1]).unwrap();
        assert_eq!(chi.value(1), UnitValue::ONE);
        assert_eq!(chi.value(3), UnitValue::MINUS_ONE);
        assert_eq!(chi.value(6), UnitValue::Zero);
        assert_eq!(chi.conductor(), 4);
    }

    #[test]
    fn modulus_one_is_constant() {
        let chi = DirichletCharacter::new(1, &[]).unwrap();
        for n in 1..50 {
            assert_eq!(chi.value(n), UnitValue::ONE);
        }
    }

    #[test]
    fn mod_five_generator() {
        let chi = DirichletCharacter::new(5, &[1]).unwrap();
        assert_eq!(chi.value(2), turn(1, 4));
    }

    #[test]
    fn cyclic_examples() {
        assert_eq!(cyclic_character(3, 1).unwrap().value(2), UnitValue::MINUS_ONE);
        assert_eq!(cyclic_character(5, 1).unwrap().value(2), turn(1, 4));
        assert!(matches!(cyclic_character(2, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn invalid_index() {
        assert!(DirichletCharacter::new(5, &[4]).is_err());
        assert!(DirichletCharacter::new(8, &[1]).is_err());
        assert!(DirichletCharacter::new(8, &[2, 0]).is_err());
    }

    #[test]
    fn character_counts_and_multiplicativity() {
        for q in 1..=60u64 {
            let chars = DirichletCharacter::all(q).unwrap();
            assert_eq!(chars.len() as u64, totient(q).unwrap(), "q={q}");
            for chi in &chars {
                assert_eq!(q % chi.conductor(), 0);
                for m in 1..q + 3 {
                    for n in 1..q + 3 {
                        assert_eq!(chi.value(m).mul(chi.value(n)), chi.value(m * n));
                    }
                }
            }
            // characters are pairwise distinct
            for (i, a) in chars.iter().enumerate() {
                for b in &chars[i + 1..] {
                    assert!((1..=q).any(|n| a.value(n) != b.value(n)));
                }
            }
        }
    }

    #[test]
    fn primitive_counts() {
        // number of primitive characters mod q (OEIS A007431)
        let expected = [1u64, 0, 1, 1, 3, 0, 5, 2, 4, 0, 9, 1, 11, 0, 3, 4, 15];
        for (i, &e) in expected.iter().enumerate() {
            let q = i as u64 + 1;
            let n = DirichletCharacter::all(q)
                .unwrap()
                .iter()
                .filter(|c| c.is_primitive())
                .count() as u64;
            assert_eq!(n, e, "q={q}");
        }
    }

    #[test]
    fn conjugate_values() {
        for q in [7u64, 16, 45, 32] {
            for chi in DirichletCharacter::all(q).unwrap() {
                let c = chi.conj();
                for n in 1..=q {
                    assert_eq!(c.value(n), chi.value(n).conj());
                }
            }
        }
    }
}
