//! Order-independent accumulation.
//!
//! Every term is rounded once to a multiple of 2^-96 and accumulated in an
//! `i128`, so integer addition makes the total independent of summation order
//! and of how a range is split between workers.

use num_complex::Complex64;

const SCALE: f64 = 79_228_162_514_264_337_593_543_950_336.0; // 2^96
const TERM_LIMIT: f64 = 1_048_576.0; // 2^20

/// Exact accumulator of terms quantised to multiples of 2^-96.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedSum(i128);

impl FixedSum {
    pub fn add(&mut self, x: f64) {
        debug_assert!(x.abs() < TERM_LIMIT, "term {x} too large for fixed accumulator");
        self.0 += (x * SCALE).round() as i128;
    }

    pub fn merge(&mut self, other: FixedSum) {
        self.0 += other.0;
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

impl std::ops::Add for FixedSum {
    type Output = FixedSum;

    fn add(self, other: FixedSum) -> FixedSum {
        FixedSum(self.0 + other.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct ComplexSum {
    re: FixedSum,
    im: FixedSum,
}

impl ComplexSum {
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn merge(&mut self, other: ComplexSum) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    pub(crate) fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Harmonic number `H_x`, accumulated with [`FixedSum`].
pub(crate) fn harmonic(x: u64) -> f64 {
    let mut s = FixedSum::default();
    for n in 1..=x {
        s.add(1.0 / n as f64);
    }
    s.value()
}

/// Fixed chunk size for range-parallel evaluation; results do not depend on it.
pub(crate) const CHUNK: u64 = 1 << 15;

/// Split `[start, end]` into fixed-size chunks.
pub(crate) fn chunks(start: u64, end: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if start > end {
        return out;
    }
    let mut lo = start;
    loop {
        let hi = lo.saturating_add(CHUNK - 1).min(end);
        out.push((lo, hi));
        if hi == end {
            break;
        }
        lo = hi + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent() {
        let xs: Vec<f64> = (1..2000).map(|n| 1.0 / (n as f64).sqrt()).collect();
        let mut fwd = FixedSum::default();
        xs.iter().for_each(|&x| fwd.add(x));
        let mut rev = FixedSum::default();
        xs.iter().rev().for_each(|&x| rev.add(x));
        assert_eq!(fwd, rev);
    }

    #[test]
    fn harmonic_small() {
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn chunks_cover_range() {
        let cs = chunks(1, 3 * CHUNK + 5);
        assert_eq!(cs.first().unwrap().0, 1);
        assert_eq!(cs.last().unwrap().1, 3 * CHUNK + 5);
        for w in cs.windows(2) {
            assert_eq!(w[0].1 + 1, w[1].0);
        }
    }
}
