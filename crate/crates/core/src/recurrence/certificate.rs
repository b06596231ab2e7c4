//! Explicit functions in 𝓜 for which `|f(an+b) − f(cn+d)|` stays bounded
//! away from zero, with a checkable lower bound.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{criterion, Quadruple};
use crate::expr::{describe, parse_function};
use crate::multfunc::{cyclic_character, Chord, DirichletCharacter, MultFunction, Turn};
use crate::numkernel::{factorize, totient, valuation};
use crate::sum::chunks;
use crate::{Error, Result};

/// Slack allowed by archimedean certificates.
pub const ARCHIMEDEAN_SLACK: f64 = 0.05;
/// Floor for the threshold of archimedean certificates.
pub const ARCHIMEDEAN_THRESHOLD: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// `a ≠ c`, `f(n) = n^{it}`.
    Archimedean,
    /// `a = c`, a prime `p ∤ bd` with `p | a`, `p` odd.
    OddPrimeUnit,
    /// As above with `p = 2`.
    TwoUnit,
    /// `a = c`, `p^k ∥ a`, `p^ℓ ∥ bd` with `0 < ℓ < k`.
    PrimeDivides,
    /// The two-function construction for `|f(n+2) − g(n)|`.
    PairShift,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Archimedean => "archimedean",
            CaseTag::OddPrimeUnit => "odd-p-l0",
            CaseTag::TwoUnit => "p2-l0",
            CaseTag::PrimeDivides => "l-positive",
            CaseTag::PairShift => "pair-shift-2",
        }
    }

    pub fn parse(s: &str) -> Result<CaseTag> {
        [
            CaseTag::Archimedean,
            CaseTag::OddPrimeUnit,
            CaseTag::TwoUnit,
            CaseTag::PrimeDivides,
            CaseTag::PairShift,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown case tag '{s}'")))
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A lower bound `η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gap {
    /// `2 sin(π δ)` for the stored `δ`.
    Chord(Turn),
    Real(f64),
}

impl Gap {
    pub fn value(self) -> f64 {
        match self {
            Gap::Chord(d) => d.chord(),
            Gap::Real(x) => x,
        }
    }

    /// `k·η`, necessarily on the real path.
    pub fn scaled(self, k: f64) -> Gap {
        Gap::Real(k * self.value())
    }

    pub fn parse(s: &str) -> Result<Gap> {
        if let Some(inner) = s.strip_prefix("2sin(pi*").and_then(|r| r.strip_suffix(')')) {
            let (n, d) = inner
                .split_once('/')
                .ok_or_else(|| Error::invalid(format!("malformed chord '{s}'")))?;
            let n: i128 = n.parse().map_err(|_| Error::invalid(format!("malformed chord '{s}'")))?;
            let d: u64 = d.parse().map_err(|_| Error::invalid(format!("malformed chord '{s}'")))?;
            return Ok(Gap::Chord(Turn::new(n, d)?));
        }
        s.parse::<f64>()
            .map(Gap::Real)
            .map_err(|_| Error::invalid(format!("malformed gap '{s}'")))
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Chord(d) => write!(f, "2sin(pi*{d})"),
            Gap::Real(x) => write!(f, "{x:?}"),
        }
    }
}

/// A claim that `|f(an+b) − g(cn+d)| ≥ η − slack` for all `n ≥ n0`, with
/// `g = f` unless given.
#[derive(Clone, Debug)]
pub struct CounterexampleCertificate {
    pub quad: Quadruple,
    pub case: CaseTag,
    pub f: MultFunction,
    pub g: Option<MultFunction>,
    pub eta: Gap,
    pub n0: u64,
    pub slack: f64,
}

impl CounterexampleCertificate {
    pub fn second(&self) -> &MultFunction {
        self.g.as_ref().unwrap_or(&self.f)
    }

    pub fn with_threshold(mut self, n0: u64) -> Self {
        self.n0 = n0;
        self
    }

    pub fn with_eta(mut self, eta: Gap) -> Self {
        self.eta = eta;
        self
    }

    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            case: self.case.as_str().to_string(),
            quad: [self.quad.a() as i64, self.quad.b(), self.quad.c() as i64, self.quad.d()],
            f: describe(&self.f),
            g: self.g.as_ref().map(describe),
            eta: self.eta.to_string(),
            eta_value: self.eta.value(),
            n0: self.n0,
            slack: self.slack,
        }
    }

    pub fn from_record(r: &CertificateRecord) -> Result<CounterexampleCertificate> {
        let [a, b, c, d] = r.quad;
        if a < 1 || c < 1 {
            return Err(Error::invalid("certificate quadruple needs a, c ≥ 1"));
        }
        Ok(CounterexampleCertificate {
            quad: Quadruple::new(a as u64, b, c as u64, d)?,
            case: CaseTag::parse(&r.case)?,
            f: parse_function(&r.f)?,
            g: r.g.as_deref().map(parse_function).transpose()?,
            eta: Gap::parse(&r.eta)?,
            n0: r.n0,
            slack: r.slack,
        })
    }
}

/// Self-contained serialisable form of a certificate; functions are written
/// in the expression grammar and `η` as `2sin(pi*a/b)` or a real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub case: String,
    pub quad: [i64; 4],
    pub f: String,
    pub g: Option<String>,
    pub eta: String,
    pub eta_value: f64,
    pub n0: u64,
    pub slack: f64,
}

fn override_at(p: u64, angle: Turn) -> BTreeMap<u64, Turn> {
    BTreeMap::from([(p, angle)])
}

/// `min over k of ‖θ + k/order‖`, the least distance from `e(θ)` times an
/// `order`-th root of unity to 1.
fn lattice_distance(theta: Turn, order: u64) -> Turn {
    // θ + k/order ranges over a coset of (1/order)Z; its nearest point to 0
    // lies within one step of the reduction of θ.
    let step = Turn::new(1, order).unwrap();
    let k = (theta.to_f64() * order as f64).floor() as i64;
    let base = theta.sub(step.scale(k));
    [base, base.sub(step), base.add(step)]
        .into_iter()
        .map(Turn::dist)
        .min()
        .unwrap()
}

/// Constructs a function violating `liminf |f(an+b) − f(cn+d)| = 0` for a
/// quadruple failing the criterion.
pub fn build_counterexample(q: Quadruple) -> Result<CounterexampleCertificate> {
    let res = criterion(q);
    if res.holds {
        return Err(Error::invalid(format!(
            "({q}) satisfies the recurrence criterion; no counterexample exists"
        )));
    }
    let n = res.normalized;
    if n.a() != n.c() {
        return archimedean(n);
    }
    let a = n.a();
    let (b, d) = (n.b(), n.d());
    let bd = b.unsigned_abs() as u128 * d.unsigned_abs() as u128;
    // bd ≠ 0, since a | 0.
    let (p, k, l) = factorize(a)?
        .entries()
        .iter()
        .map(|&(p, k)| (p, k, valuation_u128(bd, p)))
        .find(|&(_, k, l)| l < k)
        .expect("a does not divide bd, so some prime power of a exceeds that of bd");
    debug_assert!(k > l);
    let start = n.first_positive();
    if l == 0 && p != 2 {
        let diff = (b as i128 - d as i128).unsigned_abs();
        let u = valuation_u128(diff, p) + 1;
        let chi = cyclic_character(p, u)?;
        let phi = totient(chi.modulus())?;
        let f = MultFunction::modify(chi, override_at(p, Turn::ZERO))?;
        return Ok(CounterexampleCertificate {
            quad: n,
            case: CaseTag::OddPrimeUnit,
            f,
            g: None,
            eta: Gap::Chord(Turn::new(1, phi)?),
            n0: start,
            slack: 0.0,
        });
    }
    if l == 0 {
        let diff = (b as i128 - d as i128).unsigned_abs();
        let u = valuation_u128(diff, 2) + 1;
        let modulus = 1u64
            .checked_shl(u)
            .filter(|&m| m <= crate::multfunc::CHARACTER_MODULUS_BUDGET)
            .ok_or_else(|| Error::range("CHARACTER_MODULUS_BUDGET=10^7", format!("2^{u}")))?;
        // Take the character separating b and d by the widest chord.
        let (chi, gap) = DirichletCharacter::all(modulus)?
            .into_iter()
            .filter_map(|chi| match chord_at(&chi, b, d) {
                Chord::Exact(g) if g != Turn::ZERO => Some((chi, g)),
                _ => None,
            })
            .fold(None::<(DirichletCharacter, Turn)>, |best, (chi, g)| match best {
                Some((_, bg)) if bg >= g => best,
                _ => Some((chi, g)),
            })
            .expect("some character mod 2^u separates residues that differ mod 2^u");
        let f = MultFunction::modify(chi, override_at(2, Turn::ZERO))?;
        return Ok(CounterexampleCertificate {
            quad: n,
            case: CaseTag::TwoUnit,
            f,
            g: None,
            eta: Gap::Chord(gap),
            n0: start,
            slack: 0.0,
        });
    }
    // 0 < ℓ < k: a character mod p, with p sent to e(θ/ℓ).
    let chi = if p == 2 {
        DirichletCharacter::principal(2)?
    } else {
        cyclic_character(p, 1)?
    };
    let phi = p - 1;
    let lphi = 2 * l as u64 * phi;
    let (theta, eta) = (0..2 * l as u64)
        .map(|j| {
            let theta = Turn::new(j as i128, lphi).unwrap();
            (theta, lattice_distance(theta, phi))
        })
        .fold((Turn::ZERO, Turn::ZERO), |best, cur| if cur.1 > best.1 { cur } else { best });
    let over = Turn::new(theta.num() as i128, theta.den() * l as u64)?;
    let f = MultFunction::modify(chi, override_at(p, over))?;
    Ok(CounterexampleCertificate {
        quad: n,
        case: CaseTag::PrimeDivides,
        f,
        g: None,
        eta: Gap::Chord(eta),
        n0: start,
        slack: 0.0,
    })
}

fn valuation_u128(mut n: u128, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    if let Ok(small) = u64::try_from(n) {
        return valuation(small, p);
    }
    let mut v = 0;
    while n % p as u128 == 0 {
        n /= p as u128;
        v += 1;
    }
    v
}

fn chord_at(chi: &DirichletCharacter, b: i64, d: i64) -> Chord {
    Chord::between(chi.value_signed(b as i128), chi.value_signed(d as i128))
}

/// `f(n) = n^{it}` with `(a/c)^{it} = −1`.
fn archimedean(q: Quadruple) -> Result<CounterexampleCertificate> {
    let (a, c) = (q.a() as f64, q.c() as f64);
    let t = std::f64::consts::PI / (a / c).ln();
    let f = MultFunction::archimedean_twist(t)?;
    // The chord is 2|cos(t·δ(n)/2)| with δ(n) = log(1 + b/(an)) − log(1 + d/(cn));
    // for |b|/(an), |d|/(cn) ≤ 1/2, |δ(n)| ≤ 2(|b|/a + |d|/c)/n.
    let (rb, rd) = (q.b().unsigned_abs() as f64 / a, q.d().unsigned_abs() as f64 / c);
    let drift = (1.0 - ARCHIMEDEAN_SLACK / 2.0).acos();
    let analytic = (t.abs() * (rb + rd) / drift).max(2.0 * rb).max(2.0 * rd).ceil() as u64;
    Ok(CounterexampleCertificate {
        quad: q,
        case: CaseTag::Archimedean,
        f,
        g: None,
        eta: Gap::Real(2.0),
        n0: analytic.max(ARCHIMEDEAN_THRESHOLD).max(q.first_positive()),
        slack: ARCHIMEDEAN_SLACK,
    })
}

/// The pair with `f(2^ℓ k) = e(ℓθ1)χ(k)`, `g(2^ℓ k) = e(ℓθ2)χ(k)`, χ the
/// non-principal character mod 4, for `θ1 = 1/3`, `θ2 = 1/5`.
pub fn build_pair_counterexample() -> Result<CounterexampleCertificate> {
    build_pair_counterexample_with(Turn::new(1, 3)?, Turn::new(1, 5)?)
}

pub fn build_pair_counterexample_with(theta1: Turn, theta2: Turn) -> Result<CounterexampleCertificate> {
    let chi4 = DirichletCharacter::new(4, &[1])?;
    let f = MultFunction::modify(chi4.clone(), override_at(2, theta1))?;
    let g = MultFunction::modify(chi4, override_at(2, theta2))?;
    // Value sets: multiples of θ and 1/2, i.e. the L-th roots of unity with
    // L = lcm(den θ, 2). η is the least nonzero chord between the two sets.
    let roots = |t: Turn| num_integer::lcm(t.den(), 2);
    let (l1, l2) = (roots(theta1), roots(theta2));
    if l1 * l2 > 1_000_000 {
        return Err(Error::range("value set product ≤ 10^6", format!("{l1}×{l2}")));
    }
    let mut eta: Option<Turn> = None;
    for i in 0..l1 {
        for j in 0..l2 {
            let gap = Turn::new(i as i128, l1)?.sub(Turn::new(j as i128, l2)?).dist();
            if gap != Turn::ZERO && eta.is_none_or(|e| gap < e) {
                eta = Some(gap);
            }
        }
    }
    Ok(CounterexampleCertificate {
        quad: Quadruple::new(1, 2, 1, 0)?,
        case: CaseTag::PairShift,
        f,
        g: Some(g),
        eta: Gap::Chord(eta.expect("value sets have at least two points")),
        n0: 1,
        slack: 0.0,
    })
}

/// Outcome of a successful certificate scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateCheck {
    pub from: u64,
    pub to: u64,
    pub minimum: Chord,
    pub argmin: u64,
    /// Whether every comparison was made on rational angles.
    pub exact: bool,
}

/// Checks `|f(an+b) − g(cn+d)| ≥ η − slack` for `n0 ≤ n ≤ N`; a violation
/// is reported as a certificate failure naming the first witness `n`.
pub fn verify_certificate(cert: &CounterexampleCertificate, n_max: u64) -> Result<CertificateCheck> {
    let q = &cert.quad;
    let from = cert.n0.max(1);
    q.check_range(from, n_max)?;
    let (f, g) = (&cert.f, cert.second());
    let threshold = cert.eta.value() - cert.slack;
    let exact_eta = match cert.eta {
        Gap::Chord(d) if cert.slack == 0.0 => Some(d),
        _ => None,
    };
    let passes = |gap: Chord| match (gap, exact_eta) {
        (Chord::Exact(g), Some(e)) => g >= e,
        (gap, _) => gap.value() >= threshold,
    };
    struct Part {
        min: Option<(Chord, u64)>,
        witness: Option<(u64, Chord)>,
        exact: bool,
    }
    let parts: Vec<Part> = chunks(from, n_max)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut part = Part {
                min: None,
                witness: None,
                exact: true,
            };
            for n in lo..=hi {
                let (x, y) = q.forms(n);
                let (u, v) = (f.eval_unchecked(x as u64), g.eval_unchecked(y as u64));
                let gap = Chord::between(u, v);
                part.exact &= matches!(gap, Chord::Exact(_)) && exact_eta.is_some();
                if part.min.is_none_or(|(m, _)| gap < m) {
                    part.min = Some((gap, n));
                }
                if !passes(gap) {
                    part.witness = Some((n, gap));
                    break;
                }
            }
            part
        })
        .collect();
    let mut min: Option<(Chord, u64)> = None;
    let mut exact = true;
    for part in parts {
        if let Some((n, gap)) = part.witness {
            return Err(Error::certificate(
                format!("|f(an+b) - g(cn+d)| >= eta - slack ({})", cert.case),
                format!(
                    "witness n = {n}: gap {gap} = {:.12} < {} - {} at ({q})",
                    gap.value(),
                    cert.eta,
                    cert.slack
                ),
            ));
        }
        exact &= part.exact;
        if let Some((m, n)) = part.min {
            if min.is_none_or(|(b, _)| m < b) {
                min = Some((m, n));
            }
        }
    }
    let (minimum, argmin) = min.ok_or_else(|| Error::invalid(format!("empty range [{from}, {n_max}]")))?;
    Ok(CertificateCheck {
        from,
        to: n_max,
        minimum,
        argmin,
        exact,
    })
}

/// The witness `n` of a failed verification, if the error is one.
pub fn witness_of(err: &Error) -> Option<u64> {
    match err {
        Error::CertificateFailure { detail, .. } => detail
            .strip_prefix("witness n = ")
            .and_then(|r| r.split(':').next())
            .and_then(|n| n.parse().ok()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(a: u64, b: i64, c: u64, d: i64) -> Quadruple {
        Quadruple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn archimedean_case() {
        let cert = build_counterexample(quad(2, 0, 1, 1)).unwrap();
        assert_eq!(cert.case, CaseTag::Archimedean);
        let t = match cert.f {
            MultFunction::Twist(t) => t,
            _ => panic!("expected a twist"),
        };
        assert!((t - 4.532360141827194).abs() < 1e-12);
        let z = MultFunction::Twist(t).eval(2).unwrap().to_complex();
        assert!((z.re + 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        assert_eq!(cert.n0, ARCHIMEDEAN_THRESHOLD);
        let check = verify_certificate(&cert.clone().with_threshold(100), 1_000_000).unwrap();
        assert!(check.minimum.value() >= 2.0 - ARCHIMEDEAN_SLACK);
        assert!(!check.exact);
    }

    #[test]
    fn two_adic_case() {
        let cert = build_counterexample(quad(6, 1, 6, 5)).unwrap();
        assert_eq!(cert.case, CaseTag::TwoUnit);
        assert_eq!(cert.eta, Gap::Chord(Turn::HALF));
        assert_eq!(cert.eta.value(), 2.0);
        // Brute force: mod-8 characters, the widest separation of 1 and 5.
        let widest = DirichletCharacter::all(8)
            .unwrap()
            .iter()
            .map(|chi| chord_at(chi, 1, 5).value())
            .fold(0.0, f64::max);
        assert_eq!(widest, 2.0);
        let check = verify_certificate(&cert, 1_000_000).unwrap();
        assert!(check.exact);
        assert_eq!(check.minimum, Chord::Exact(Turn::HALF));
    }

    #[test]
    fn doubled_eta_fails_with_witness() {
        let cert = build_counterexample(quad(6, 1, 6, 5)).unwrap();
        let eta = cert.eta;
        let err = verify_certificate(&cert.with_eta(eta.scaled(2.0)), 1000).unwrap_err();
        assert_eq!(err.kind(), "certificate-failure");
        assert_eq!(witness_of(&err), Some(1));
    }

    #[test]
    fn odd_prime_case() {
        // p = 3 divides a but not bd; b − d = 9 so u = 3 and φ(27) = 18.
        let cert = build_counterexample(quad(3, 10, 3, 1)).unwrap();
        assert_eq!(cert.case, CaseTag::OddPrimeUnit);
        assert_eq!(cert.eta, Gap::Chord(Turn::new(1, 18).unwrap()));
        verify_certificate(&cert, 200_000).unwrap();
    }

    #[test]
    fn prime_divides_case() {
        // a = 9, b = 3, d = 1: p = 3, k = 2, ℓ = 1.
        let cert = build_counterexample(quad(9, 3, 9, 1)).unwrap();
        assert_eq!(cert.case, CaseTag::PrimeDivides);
        // θ = 1/(2φ(3)) = 1/4 against the square roots of unity.
        assert_eq!(cert.eta, Gap::Chord(Turn::new(1, 4).unwrap()));
        let check = verify_certificate(&cert, 200_000).unwrap();
        assert_eq!(check.minimum, Chord::Exact(Turn::new(1, 4).unwrap()));
        // p | d instead of p | b, and p = 2 with ℓ = 1 < k = 3.
        for q in [quad(9, 1, 9, 6), quad(8, 3, 8, 2), quad(25, -5, 25, 3)] {
            let cert = build_counterexample(q).unwrap();
            assert_eq!(cert.case, CaseTag::PrimeDivides, "{q}");
            verify_certificate(&cert, 100_000).unwrap();
        }
    }

    #[test]
    fn criterion_quadruples_are_rejected() {
        let err = build_counterexample(quad(6, 3, 6, 2)).unwrap_err();
        assert_eq!(err.kind(), "invalid-input");
    }

    #[test]
    fn pair_counterexample() {
        let cert = build_pair_counterexample().unwrap();
        assert_eq!(cert.eta, Gap::Chord(Turn::new(1, 30).unwrap()));
        assert!((cert.eta.value() - 2.0 * (std::f64::consts::PI / 30.0).sin()).abs() < 1e-15);
        let (f, g) = (&cert.f, cert.second());
        let gap = |n: u64| Chord::between(f.eval(n + 2).unwrap(), g.eval(n).unwrap());
        assert_eq!(gap(1), Chord::Exact(Turn::HALF));
        assert_eq!(gap(3), Chord::Exact(Turn::HALF));
        for n in (4..400).step_by(4) {
            assert!(gap(n).value() >= cert.eta.value() - 1e-15);
        }
        let check = verify_certificate(&cert, 100_000).unwrap();
        assert!(check.exact);
    }

    #[test]
    fn records_round_trip() {
        for cert in [
            build_counterexample(quad(2, 0, 1, 1)).unwrap(),
            build_counterexample(quad(6, 1, 6, 5)).unwrap(),
            build_counterexample(quad(9, 3, 9, 1)).unwrap(),
            build_pair_counterexample().unwrap(),
        ] {
            let rec = cert.to_record();
            let back = CounterexampleCertificate::from_record(&rec).unwrap();
            assert_eq!(back.to_record(), rec);
            let a = verify_certificate(&cert, 5000).unwrap();
            let b = verify_certificate(&back, 5000).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn lattice_distance_matches_enumeration() {
        for order in 1..12u64 {
            for den in 1..40u64 {
                for num in 0..den {
                    let theta = Turn::new(num as i128, den).unwrap();
                    let brute = (0..order)
                        .map(|k| theta.add(Turn::new(k as i128, order).unwrap()).dist())
                        .min()
                        .unwrap();
                    assert_eq!(lattice_distance(theta, order), brute);
                }
            }
        }
    }
}
