use std::sync::OnceLock;

use super::ARG_MAX;
use crate::{Error, Result};

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factorization {
    entries: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn from_entries(mut entries: Vec<(u64, u32)>) -> Self {
        entries.retain(|&(_, e)| e > 0);
        entries.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(entries.len());
        for (p, e) in entries {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Factorization { entries: merged }
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p`, zero when absent.
    pub fn exponent(&self, p: u64) -> u32 {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Total number of prime factors with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.entries.iter().map(|&(_, e)| e).sum()
    }

    /// Product of the prime powers, `None` on u128 overflow.
    pub fn value(&self) -> Option<u128> {
        self.entries.iter().try_fold(1u128, |acc, &(p, e)| {
            (p as u128).checked_pow(e).and_then(|pe| acc.checked_mul(pe))
        })
    }

    /// Factorization of the product.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        let mut all = self.entries.clone();
        all.extend_from_slice(&other.entries);
        Factorization::from_entries(all)
    }
}

/// Exact prime factorization of `1 <= n <= 2^63`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factor 0"));
    }
    if n > ARG_MAX {
        return Err(Error::range("ARG_MAX=2^63", format!("{n} exceeds 2^63")));
    }
    let mut entries = Vec::new();
    factor_into(n, &mut entries);
    Ok(Factorization::from_entries(entries))
}

pub(crate) fn factor_into(mut n: u64, out: &mut Vec<(u64, u32)>) {
    if n < SPF_LIMIT {
        let table = spf_table();
        while n > 1 {
            let p = match table[n as usize] {
                0 => n,
                s => s as u64,
            };
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        return;
    }
    for &p in SMALL_PRIMES.iter() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        split_large(n, out);
    }
}

fn split_large(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if n < SPF_LIMIT {
        factor_into(n, out);
        return;
    }
    if is_prime(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

const SPF_LIMIT: u64 = 1 << 25;

/// Smallest prime factor for composites below `SPF_LIMIT`; 0 marks a prime.
/// Composite smallest factors are at most sqrt(2^25) < 2^16.
fn spf_table() -> &'static [u16] {
    static TABLE: OnceLock<Vec<u16>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = SPF_LIMIT as usize;
        let mut spf = vec![0u16; n];
        let mut i = 2usize;
        while i * i < n {
            if spf[i] == 0 {
                let mut j = i * i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u16;
                    }
                    j += i;
                }
            }
            i += 1;
        }
        spf
    })
}

const SMALL_PRIMES: [u64; 168] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
    431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
    557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797,
    809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929,
    937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all of u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // bases valid for every n < 2^64
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho with fixed increments c = 1, 2, ...
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let gcd = |mut a: u64, mut b: u64| {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r <<= 1;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}
