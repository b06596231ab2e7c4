use crate::{Error, Result};

/// Largest bound accepted by the prime sieves.
pub const PRIME_BUDGET: u64 = 400_000_000;

/// All primes `p <= n` in ascending order.
pub fn primes_up_to(n: u64) -> Result<Vec<u64>> {
    primes_in(0, n)
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi > PRIME_BUDGET {
        return Err(Error::range(
            "PRIME_BUDGET=4e8",
            format!("prime range end {hi} exceeds the sieve budget"),
        ));
    }
    if hi < 2 || lo > hi {
        return Ok(Vec::new());
    }
    // odd-only sieve: index i stands for 2i+1
    let half = (hi as usize + 1) / 2;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= hi as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    if lo <= 2 {
        out.push(2);
    }
    let start = (lo.max(3) / 2) as usize;
    out.extend(
        (start..half)
            .filter(|&i| !composite[i])
            .map(|i| (2 * i + 1) as u64)
            .filter(|&p| p >= lo),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::is_prime;

    #[test]
    fn small_ranges() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(1).unwrap(), Vec::<u64>::new());
        assert_eq!(primes_in(10, 30).unwrap(), vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(2, 2).unwrap(), vec![2]);
    }

    #[test]
    fn agrees_with_miller_rabin() {
        let ps = primes_up_to(20_000).unwrap();
        let brute: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, brute);
        assert_eq!(primes_up_to(1_000_000).unwrap().len(), 78_498);
    }

    #[test]
    fn budget() {
        assert!(primes_up_to(PRIME_BUDGET + 1).is_err());
    }
}
