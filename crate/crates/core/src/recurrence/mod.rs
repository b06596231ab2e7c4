//! Recurrence of `{(an+b)/(cn+d)}` for 1-bounded multiplicative functions:
//! the criterion, scans of `|f(an+b) − f(cn+d)|`, logarithmic density of
//! return times, certified counterexamples and the Fejér approximation.

mod certificate;
mod fejer;

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::multfunc::{Chord, MultFunction, UnitValue};
use crate::numkernel::ARG_MAX;
use crate::sum::{chunks, FixedSum};
use crate::{Error, Result};

pub use certificate::{
    build_counterexample, build_pair_counterexample, build_pair_counterexample_with,
    verify_certificate, witness_of, CaseTag, CertificateCheck, CertificateRecord, CounterexampleCertificate, Gap,
    ARCHIMEDEAN_SLACK, ARCHIMEDEAN_THRESHOLD,
};
pub use fejer::{fejer, tent, FejerApprox, FejerGridCheck, FEJER_R_BUDGET};

/// Largest scan or density range.
pub const SCAN_BUDGET: u64 = 100_000_000;

/// The pair of linear forms `an+b`, `cn+d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quadruple {
    a: u64,
    b: i64,
    c: u64,
    d: i64,
    normalized: bool,
}

impl Quadruple {
    pub fn new(a: u64, b: i64, c: u64, d: i64) -> Result<Quadruple> {
        if a == 0 || c == 0 {
            return Err(Error::invalid(format!("leading coefficients must be positive, got a={a}, c={c}")));
        }
        Ok(Quadruple {
            a,
            b,
            c,
            d,
            normalized: false,
        })
    }

    /// Divides out `gcd(a, b, c, d)`.
    pub fn normalize(self) -> Quadruple {
        let g = [self.b.unsigned_abs(), self.c, self.d.unsigned_abs()]
            .iter()
            .fold(self.a, |g, &x| g.gcd(&x));
        Quadruple {
            a: self.a / g,
            b: self.b / g as i64,
            c: self.c / g,
            d: self.d / g as i64,
            normalized: true,
        }
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `(an+b, cn+d)`.
    pub fn forms(&self, n: u64) -> (i128, i128) {
        (
            self.a as i128 * n as i128 + self.b as i128,
            self.c as i128 * n as i128 + self.d as i128,
        )
    }

    /// Smallest `n ≥ 1` at which both forms are positive.
    pub fn first_positive(&self) -> u64 {
        let start = |a: u64, b: i64| {
            if b >= 1 {
                1
            } else {
                ((1 - b as i128 + a as i128 - 1) / a as i128).max(1) as u64
            }
        };
        start(self.a, self.b).max(start(self.c, self.d))
    }

    /// Checks that both forms lie in `[1, ARG_MAX]` on `[from, to]`.
    fn check_range(&self, from: u64, to: u64) -> Result<()> {
        if to > SCAN_BUDGET {
            return Err(Error::range("SCAN_BUDGET=10^8", format!("range end {to}")));
        }
        let (lo1, lo2) = self.forms(from);
        if lo1 < 1 || lo2 < 1 {
            return Err(Error::range(
                "positive arguments",
                format!("forms ({self}) are not positive at n={from}"),
            ));
        }
        let (hi1, hi2) = self.forms(to);
        if hi1 > ARG_MAX as i128 || hi2 > ARG_MAX as i128 {
            return Err(Error::range("ARG_MAX=2^63", format!("forms ({self}) at n={to}")));
        }
        Ok(())
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub holds: bool,
    pub normalized: Quadruple,
}

/// `a = c` and (`b = d` or `a | bd`), after normalising.
pub fn criterion(q: Quadruple) -> CriterionResult {
    let n = q.normalize();
    let bd = n.b as i128 * n.d as i128;
    let holds = n.a == n.c && (n.b == n.d || bd % n.a as i128 == 0);
    CriterionResult { holds, normalized: n }
}

/// One improvement of a running minimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRecord {
    pub n: u64,
    pub gap: Chord,
}

/// Running minima of `|f(an+b) − g(cn+d)|` over `[from, to]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanTrace {
    pub quad: Quadruple,
    pub from: u64,
    pub to: u64,
    /// Strict improvements, in increasing `n`; the last one is the minimum.
    pub records: Vec<ScanRecord>,
    /// Samples where either value vanished; they are excluded.
    pub zero_samples: u64,
    pub first_zero: Option<u64>,
}

impl ScanTrace {
    pub fn minimum(&self) -> Option<ScanRecord> {
        self.records.last().copied()
    }

    /// Running minimum after the first `n` samples, if any sample was kept.
    pub fn running_min_at(&self, n: u64) -> Option<Chord> {
        self.records.iter().take_while(|r| r.n <= n).last().map(|r| r.gap)
    }
}

struct ChunkScan {
    records: Vec<ScanRecord>,
    zero_samples: u64,
    first_zero: Option<u64>,
}

fn less(a: Chord, b: Option<Chord>) -> bool {
    match b {
        None => true,
        Some(b) => a < b,
    }
}

/// Scans `|f(an+b) − g(cn+d)|` for `n ∈ [from, to]`, keeping strict running minima.
pub fn scan_gaps(f: &MultFunction, g: &MultFunction, q: &Quadruple, from: u64, to: u64) -> Result<ScanTrace> {
    if from == 0 {
        return Err(Error::invalid("scans start at n ≥ 1"));
    }
    q.check_range(from, to)?;
    let parts: Vec<ChunkScan> = chunks(from, to)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut out = ChunkScan {
                records: Vec::new(),
                zero_samples: 0,
                first_zero: None,
            };
            let mut best: Option<Chord> = None;
            for n in lo..=hi {
                let (x, y) = q.forms(n);
                let u = f.eval_unchecked(x as u64);
                let v = g.eval_unchecked(y as u64);
                if u.is_zero() || v.is_zero() {
                    out.zero_samples += 1;
                    out.first_zero.get_or_insert(n);
                    continue;
                }
                let gap = Chord::between(u, v);
                if less(gap, best) {
                    best = Some(gap);
                    out.records.push(ScanRecord { n, gap });
                }
            }
            out
        })
        .collect();
    let mut trace = ScanTrace {
        quad: *q,
        from,
        to,
        records: Vec::new(),
        zero_samples: 0,
        first_zero: None,
    };
    let mut best: Option<Chord> = None;
    for part in parts {
        trace.zero_samples += part.zero_samples;
        if trace.first_zero.is_none() {
            trace.first_zero = part.first_zero;
        }
        for r in part.records {
            if less(r.gap, best) {
                best = Some(r.gap);
                trace.records.push(r);
            }
        }
    }
    Ok(trace)
}

/// Running minima of `|f(an+b) − f(cn+d)|` for `1 ≤ n ≤ N`.
pub fn liminf_scan(f: &MultFunction, q: &Quadruple, n_max: u64) -> Result<ScanTrace> {
    scan_gaps(f, f, q, 1, n_max)
}

/// Running minima of `|f(an+1) − g(an)|` for `1 ≤ n ≤ N`.
pub fn pair_scan(f: &MultFunction, g: &MultFunction, a: u64, n_max: u64) -> Result<ScanTrace> {
    let q = Quadruple::new(a, 1, a, 0)?;
    scan_gaps(f, g, &q, 1, n_max)
}

/// Logarithmic averages of the indicator of `{n : |f(an+b) − f(cn+d)| < ε}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub eps: f64,
    pub quad: Quadruple,
    pub x: u64,
    /// The average at `X`.
    pub estimate: f64,
    /// Maximum of the running average over the final decade `[X/10, X]`.
    pub upper: f64,
    /// Minimum over the same window.
    pub lower: f64,
    pub hits: u64,
}

/// Density of return times for `(an+b)/(an+d)`.
pub fn density_estimate(f: &MultFunction, eps: f64, a: u64, b: i64, d: i64, x: u64) -> Result<DensityEstimate> {
    density_estimate_for(f, eps, &Quadruple::new(a, b, a, d)?, x)
}

/// Running `Σ_{n≤m, n∈A} (1/n) / Σ_{n≤m} 1/n` over `m ≤ X`.
pub fn density_estimate_for(f: &MultFunction, eps: f64, q: &Quadruple, x: u64) -> Result<DensityEstimate> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("ε must be positive, got {eps}")));
    }
    if x == 0 {
        return Err(Error::invalid("X must be positive"));
    }
    q.check_range(1, x)?;
    let hits: Vec<bool> = chunks(1, x)
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| {
            (lo..=hi).map(|n| {
                let (u, v) = q.forms(n);
                gap_value(f.eval_unchecked(u as u64), f.eval_unchecked(v as u64)) < eps
            })
        })
        .collect();
    let window_start = (x / 10).max(1);
    let mut num = FixedSum::default();
    let mut den = FixedSum::default();
    let (mut upper, mut lower) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut estimate = 0.0;
    for (i, &hit) in hits.iter().enumerate() {
        let n = i as u64 + 1;
        let w = 1.0 / n as f64;
        den.add(w);
        if hit {
            num.add(w);
        }
        if n >= window_start {
            estimate = num.value() / den.value();
            upper = upper.max(estimate);
            lower = lower.min(estimate);
        }
    }
    Ok(DensityEstimate {
        eps,
        quad: *q,
        x,
        estimate,
        upper,
        lower,
        hits: hits.iter().filter(|&&h| h).count() as u64,
    })
}

fn gap_value(u: UnitValue, v: UnitValue) -> f64 {
    Chord::between(u, v).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfunc::Turn;
    use proptest::prelude::*;

    fn quad(a: u64, b: i64, c: u64, d: i64) -> Quadruple {
        Quadruple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn criterion_examples() {
        assert!(criterion(quad(6, 3, 6, 2)).holds);
        assert!(criterion(quad(1, 1, 1, 0)).holds);
        assert!(!criterion(quad(2, 0, 1, 1)).holds);
        let r = criterion(quad(12, 6, 12, 4));
        assert!(r.holds);
        assert_eq!((r.normalized.a(), r.normalized.b(), r.normalized.d()), (6, 3, 2));
        assert!(!criterion(quad(6, 1, 6, 5)).holds);
        assert!(criterion(quad(5, 7, 5, 7)).holds);
        assert!(Quadruple::new(0, 1, 1, 1).is_err());
    }

    proptest! {
        #[test]
        fn criterion_is_scale_invariant(
            a in 1u64..50, b in -50i64..50, c in 1u64..50, d in -50i64..50, u in 1u64..30
        ) {
            let base = criterion(quad(a, b, c, d));
            let scaled = criterion(quad(u * a, u as i64 * b, u * c, u as i64 * d));
            prop_assert_eq!(base.holds, scaled.holds);
            prop_assert_eq!(base.normalized, scaled.normalized);
        }
    }

    #[test]
    fn constant_function_scan_is_zero() {
        let t = liminf_scan(&MultFunction::One, &quad(6, 1, 6, 5), 1000).unwrap();
        assert_eq!(t.records, vec![ScanRecord { n: 1, gap: Chord::Exact(Turn::ZERO) }]);
        let p = pair_scan(&MultFunction::One, &MultFunction::One, 1, 1000).unwrap();
        assert_eq!(p.minimum().unwrap().gap, Chord::Exact(Turn::ZERO));
    }

    /// Oracle: λ by trial division.
    fn liouville(mut n: u64) -> i32 {
        let mut s = 1;
        let mut p = 2;
        while p * p <= n {
            while n % p == 0 {
                n /= p;
                s = -s;
            }
            p += 1;
        }
        if n > 1 {
            s = -s;
        }
        s
    }

    #[test]
    fn liouville_scan_matches_direct_evaluation() {
        let t = liminf_scan(&MultFunction::Liouville, &quad(6, 3, 6, 2), 100).unwrap();
        let first = (1..=100u64)
            .find(|&n| liouville(6 * n + 3) == liouville(6 * n + 2))
            .unwrap();
        assert_eq!(first, 2);
        let min = t.minimum().unwrap();
        assert_eq!(min.n, first);
        assert!(min.gap.is_zero());
        // Running minima never increase.
        assert!(t.records.windows(2).all(|w| w[1].gap < w[0].gap));

        let p = pair_scan(&MultFunction::Liouville, &MultFunction::Liouville, 1, 10).unwrap();
        let first = (1..=10u64).find(|&n| liouville(n + 1) == liouville(n)).unwrap();
        assert_eq!(p.minimum().unwrap().n, first);
        assert_eq!(first, 2);
    }

    #[test]
    fn zero_values_are_flagged() {
        let chi = crate::multfunc::dirichlet_character(3, &[1]).unwrap();
        let f = MultFunction::character(chi);
        let t = liminf_scan(&f, &quad(1, 1, 1, 0), 30).unwrap();
        // Either n or n+1 is a multiple of 3 for two residues out of three.
        assert_eq!(t.zero_samples, 20);
        assert_eq!(t.first_zero, Some(2));
    }

    #[test]
    fn scan_is_independent_of_chunking() {
        let f = MultFunction::roots(7, 3).unwrap();
        let q = quad(2, 1, 2, 0);
        let whole = scan_gaps(&f, &f, &q, 1, 100_000).unwrap();
        // Sequential oracle.
        let mut best: Option<Chord> = None;
        let mut records = Vec::new();
        for n in 1..=100_000u64 {
            let gap = Chord::between(f.eval(2 * n + 1).unwrap(), f.eval(2 * n).unwrap());
            if less(gap, best) {
                best = Some(gap);
                records.push(ScanRecord { n, gap });
            }
        }
        assert_eq!(whole.records, records);
    }

    #[test]
    fn scan_rejects_nonpositive_arguments() {
        let err = liminf_scan(&MultFunction::One, &quad(1, -3, 1, 0), 10).unwrap_err();
        assert_eq!(err.kind(), "range");
        assert!(liminf_scan(&MultFunction::One, &quad(1, 0, 1, 0), SCAN_BUDGET + 1).is_err());
    }

    #[test]
    fn density_of_constant_is_one() {
        let e = density_estimate(&MultFunction::One, 0.1, 3, 1, 2, 5000).unwrap();
        assert_eq!((e.estimate, e.upper, e.lower), (1.0, 1.0, 1.0));
        assert_eq!(e.hits, 5000);
    }

    #[test]
    fn liouville_density_matches_direct_count() {
        let x = 100_000u64;
        let e = density_estimate(&MultFunction::Liouville, 0.5, 6, 3, 2, x).unwrap();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        let mut hits = 0;
        for n in 1..=x {
            den += 1.0 / n as f64;
            if liouville(6 * n + 3) == liouville(6 * n + 2) {
                num += 1.0 / n as f64;
                hits += 1;
            }
        }
        assert_eq!(e.hits, hits);
        assert!((e.estimate - num / den).abs() < 1e-12);
        assert!(e.estimate > 0.1);
        assert!(0.0 <= e.lower && e.lower <= e.estimate && e.estimate <= e.upper && e.upper <= 1.0);
    }

    #[test]
    fn density_is_monotone_in_eps() {
        let f = MultFunction::roots(5, 11).unwrap();
        let mut prev: Option<DensityEstimate> = None;
        for eps in [0.01, 0.3, 0.7, 1.2, 1.18, 1.9, 2.5] {
            let e = density_estimate(&f, eps, 2, 1, 0, 20_000).unwrap();
            if let Some(p) = prev.filter(|p| p.eps <= eps) {
                assert!(p.estimate <= e.estimate && p.upper <= e.upper && p.lower <= e.lower);
                assert!(p.hits <= e.hits);
            }
            prev = Some(e);
        }
    }
}
