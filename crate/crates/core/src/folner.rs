//! Multiplicative Følner sets, the `Q = AW` progression trick and the
//! character-shift identities along `Q ↦ Qp`.
//!
//! For a Følner element `Q`, `A` collects the prime powers of `Q` at primes
//! dividing `a1` and `W = Q/A`. The residue `r_Q` is fixed by CRT so that
//! `a1·r_Q + b1 = W·ℓ_Q` and `a2·r_Q + b2 = A·m_Q` with controlled gcds, which
//! lets `f(a1Q²n + a1r_Q + b1) = f(W)·f(a1A²Wn + ℓ_Q)` split off a fixed factor.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::multfunc::{DirichletCharacter, MultFunction, UnitValue};
use crate::numkernel::{crt_solve_big, factorize, gcd, is_prime, mod_inverse_big, valuation, ARG_MAX};
use crate::sum::{chunks, ComplexSum};
use crate::{Error, Result};

/// Most elements a Følner set may have.
pub const FOLNER_SET_BUDGET: u64 = 1_000_000;
/// Largest bit length of a Følner element.
pub const FOLNER_BITS_BUDGET: u64 = 4096;
/// Largest CRT modulus rechecked by exhaustive search.
pub const BRUTE_FORCE_BUDGET: u64 = 10_000_000;

/// Primes and an exponent window `(lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FolnerParams {
    primes: Vec<u64>,
    lo: u32,
    hi: u32,
}

impl FolnerParams {
    pub fn new(primes: Vec<u64>, lo: u32, hi: u32) -> Result<FolnerParams> {
        if hi <= lo {
            return Err(Error::invalid(format!("exponent window ({lo}, {hi}] is empty")));
        }
        for (i, &p) in primes.iter().enumerate() {
            if !is_prime(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            if primes[..i].contains(&p) {
                return Err(Error::invalid(format!("prime {p} listed twice")));
            }
        }
        let count = (hi - lo) as f64;
        if count.powi(primes.len() as i32) > FOLNER_SET_BUDGET as f64 {
            return Err(Error::range(
                "FOLNER_SET_BUDGET=10^6",
                format!("{} elements", count.powi(primes.len() as i32)),
            ));
        }
        let bits: f64 = primes.iter().map(|&p| hi as f64 * (p as f64).log2()).sum();
        if bits > FOLNER_BITS_BUDGET as f64 {
            return Err(Error::range(
                "FOLNER_BITS_BUDGET=4096",
                format!("largest element has about {bits:.0} bits"),
            ));
        }
        Ok(FolnerParams { primes, lo, hi })
    }

    /// The first `k` primes.
    pub fn first_primes(k: usize, lo: u32, hi: u32) -> Result<FolnerParams> {
        let primes = (2u64..).filter(|&p| is_prime(p)).take(k).collect();
        Self::new(primes, lo, hi)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    pub fn width(&self) -> u32 {
        self.hi - self.lo
    }

    pub fn len(&self) -> usize {
        (self.width() as usize).pow(self.primes.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn position(&self, p: u64) -> Option<usize> {
        self.primes.iter().position(|&q| q == p)
    }
}

/// `Q = Π p^{θ_p}` with every `θ_p` in the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolnerElement {
    primes: Vec<u64>,
    exponents: Vec<u32>,
    value: BigInt,
}

impl FolnerElement {
    pub fn from_exponents(params: &FolnerParams, exponents: Vec<u32>) -> Result<FolnerElement> {
        if exponents.len() != params.primes.len() {
            return Err(Error::invalid("exponent tuple length differs from prime count"));
        }
        if let Some(e) = exponents.iter().find(|&&e| e <= params.lo || e > params.hi) {
            return Err(Error::invalid(format!(
                "exponent {e} outside the window ({}, {}]",
                params.lo, params.hi
            )));
        }
        let value = params
            .primes
            .iter()
            .zip(&exponents)
            .fold(BigInt::one(), |acc, (&p, &e)| acc * BigInt::from(p).pow(e));
        Ok(FolnerElement {
            primes: params.primes.clone(),
            exponents,
            value,
        })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.primes
            .iter()
            .position(|&q| q == p)
            .map_or(0, |i| self.exponents[i])
    }

    /// `(p, θ_p)` pairs.
    pub fn factorization(&self) -> Vec<(u64, u32)> {
        self.primes.iter().copied().zip(self.exponents.iter().copied()).collect()
    }
}

impl fmt::Display for FolnerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// All elements, exponent tuples in lexicographic order.
pub fn folner_set(params: &FolnerParams) -> Result<Vec<FolnerElement>> {
    let k = params.primes.len();
    let mut out = Vec::with_capacity(params.len());
    let mut exps = vec![params.lo + 1; k];
    loop {
        out.push(FolnerElement::from_exponents(params, exps.clone())?);
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] <= params.hi {
                break;
            }
            exps[i] = params.lo + 1;
        }
    }
}

/// `|Φ ∩ Φ/p| / |Φ|`, counted over the set.
pub fn folner_ratio(params: &FolnerParams, p: u64) -> Result<Ratio<u64>> {
    let i = params
        .position(p)
        .ok_or_else(|| Error::invalid(format!("{p} is not one of the Følner primes")))?;
    let set = folner_set(params)?;
    let survivors = set.iter().filter(|q| q.exponents[i] < params.hi).count() as u64;
    Ok(Ratio::new(survivors, set.len() as u64))
}

/// `f(Q)` from the exponent tuple of `Q`.
fn eval_element(f: &MultFunction, q: &FolnerElement) -> UnitValue {
    eval_prime_powers(f, &q.factorization())
}

fn eval_prime_powers(f: &MultFunction, entries: &[(u64, u32)]) -> UnitValue {
    entries.iter().fold(UnitValue::ONE, |acc, &(p, e)| {
        acc.mul(f.prime_value(p).pow(e as i64))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageBound {
    pub prime: u64,
    /// `|(1 − f(p)) · 𝔼_{Q∈Φ} f(Q)|`.
    pub lhs: f64,
    /// `2 (1 − ratio(p))`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicativeAverage {
    pub average: Complex64,
    pub bounds: Vec<AverageBound>,
}

/// `𝔼_{Q∈Φ} f(Q)` with the shift bound checked at every Følner prime.
pub fn multiplicative_average(f: &MultFunction, params: &FolnerParams) -> Result<MultiplicativeAverage> {
    let set = folner_set(params)?;
    let mut s = ComplexSum::default();
    for q in &set {
        s.add(eval_element(f, q).to_complex());
    }
    let average = s.value() / set.len() as f64;
    let mut bounds = Vec::new();
    for &p in &params.primes {
        let ratio = folner_ratio(params, p)?;
        let ratio = *ratio.numer() as f64 / *ratio.denom() as f64;
        let lhs = ((Complex64::new(1.0, 0.0) - f.prime_value(p).to_complex()) * average).norm();
        let bound = 2.0 * (1.0 - ratio);
        bounds.push(AverageBound {
            prime: p,
            lhs,
            bound,
            holds: lhs <= bound + 1e-12,
        });
    }
    Ok(MultiplicativeAverage { average, bounds })
}

/// One CRT condition on `r_Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RCondition {
    pub prime: u64,
    /// True for a prime of `W` (first congruence), false for a prime of `A`.
    pub from_w: bool,
    pub residue: BigInt,
    pub modulus: BigInt,
}

/// `Q = AW` with the CRT residue `r_Q` and the cofactors `ℓ_Q`, `m_Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QDecomposition {
    pub q: BigInt,
    /// `(p, θ_p)` for the Følner primes.
    pub exponents: Vec<(u64, u32)>,
    pub a1: i64,
    pub b1: i64,
    pub a2: i64,
    pub b2: i64,
    /// The input pairs were exchanged to make `a1·b2 − a2·b1` positive.
    pub swapped: bool,
    pub a: BigInt,
    pub w: BigInt,
    /// `a1·b2 − a2·b1 > 0`.
    pub u: BigInt,
    pub mu: u32,
    pub nu: u32,
    pub r_q: BigInt,
    /// Product of the moduli of the CRT conditions (divides `Q²`).
    pub crt_modulus: BigInt,
    pub l_q: BigInt,
    pub m_q: BigInt,
}

fn big_pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

impl QDecomposition {
    /// The CRT conditions that define `r_Q`.
    pub fn conditions(&self) -> Vec<RCondition> {
        let (a1, b1, a2, b2) = (
            BigInt::from(self.a1),
            BigInt::from(self.b1),
            BigInt::from(self.a2),
            BigInt::from(self.b2),
        );
        let mut out = Vec::new();
        for &(p, theta) in &self.exponents {
            if self.a1 % p as i64 != 0 {
                // a1·r + b1 ≡ W (mod p^{θ+1+ν})
                let m = big_pow(p, theta + 1 + self.nu);
                let inv = mod_inverse_big(&a1, &m).expect("p ∤ a1");
                let residue = ((&self.w - &b1) * inv).mod_floor(&m);
                out.push(RCondition { prime: p, from_w: true, residue, modulus: m });
            } else {
                // r ≡ (A b1 − b2 W) a2^{-1} W^{-1} (mod p^{θ+1+μ})
                let m = big_pow(p, theta + 1 + self.mu);
                let inv_a2 = mod_inverse_big(&a2, &m).expect("gcd(a1, a2) = 1");
                let inv_w = mod_inverse_big(&self.w, &m).expect("p ∤ W");
                let residue = ((&self.a * &b1 - &b2 * &self.w) * inv_a2 * inv_w).mod_floor(&m);
                out.push(RCondition { prime: p, from_w: false, residue, modulus: m });
            }
        }
        out
    }

    /// The decomposition with a different `r_Q` (for negative controls);
    /// `ℓ_Q`, `m_Q` are recomputed by floor division.
    pub fn with_r(&self, r: BigInt) -> QDecomposition {
        let mut d = self.clone();
        d.l_q = (BigInt::from(d.a1) * &r + d.b1).div_floor(&d.w);
        d.m_q = (BigInt::from(d.a2) * &r + d.b2).div_floor(&d.a);
        d.r_q = r;
        d
    }
}

fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// CRT decomposition of a Følner element for the pair of forms
/// `a1 n + b1`, `a2 n + b2`.
///
/// Preconditions: `a1, a2 ≥ 1`; `gcd(a1,a2) = gcd(a1,b1) = gcd(a2,b2) = 1`;
/// `a1 b2 ≠ a2 b1`; every prime of `a1` and of `u` is a Følner prime;
/// `lo ≥ max(μ, ν)`; and `lo ≥ ν_p(u)` for each prime `p | u`.
#[allow(clippy::too_many_arguments)]
pub fn q_decompose(
    params: &FolnerParams,
    q: &FolnerElement,
    a1: i64,
    b1: i64,
    a2: i64,
    b2: i64,
    mu: u32,
    nu: u32,
) -> Result<QDecomposition> {
    if q.primes != params.primes {
        return Err(Error::invalid("element does not belong to these parameters"));
    }
    if a1 < 1 || a2 < 1 {
        return Err(Error::precondition(format!("a1 = {a1} and a2 = {a2} must be positive")));
    }
    for (name, x, y) in [("gcd(a1,a2)", a1, a2), ("gcd(a1,b1)", a1, b1), ("gcd(a2,b2)", a2, b2)] {
        if gcd_i64(x, y) != 1 {
            return Err(Error::precondition(format!("{name} = {} ≠ 1", gcd_i64(x, y))));
        }
    }
    let det = a1 as i128 * b2 as i128 - a2 as i128 * b1 as i128;
    if det == 0 {
        return Err(Error::precondition("a1·b2 − a2·b1 = 0"));
    }
    let swapped = det < 0;
    let (a1, b1, a2, b2) = if swapped { (a2, b2, a1, b1) } else { (a1, b1, a2, b2) };
    let u = det.unsigned_abs();
    for p in factorize(a1 as u64)?.primes() {
        if params.position(p).is_none() {
            return Err(Error::precondition(format!(
                "prime {p} of a1 = {a1} is not a Følner prime"
            )));
        }
    }
    if params.lo < mu.max(nu) {
        return Err(Error::precondition(format!(
            "window lower end {} must be ≥ max(μ, ν) = {}",
            params.lo,
            mu.max(nu)
        )));
    }
    let u_fac = if u <= ARG_MAX as u128 {
        factorize(u as u64)?
    } else {
        return Err(Error::range("ARG_MAX=2^63", format!("u = {u}")));
    };
    for &(p, e) in u_fac.entries() {
        if params.position(p).is_none() {
            return Err(Error::precondition(format!(
                "prime {p} of u = {u} is not a Følner prime"
            )));
        }
        if params.lo < e {
            return Err(Error::precondition(format!(
                "window lower end {} must be ≥ ν_{p}(u) = {e}",
                params.lo
            )));
        }
    }

    let mut a = BigInt::one();
    let mut w = BigInt::one();
    for (p, theta) in q.factorization() {
        if a1 as u64 % p == 0 {
            a *= big_pow(p, theta);
        } else {
            w *= big_pow(p, theta);
        }
    }
    let mut dec = QDecomposition {
        q: q.value.clone(),
        exponents: q.factorization(),
        a1,
        b1,
        a2,
        b2,
        swapped,
        a,
        w,
        u: BigInt::from(u),
        mu,
        nu,
        r_q: BigInt::zero(),
        crt_modulus: BigInt::one(),
        l_q: BigInt::zero(),
        m_q: BigInt::zero(),
    };
    let system: Vec<(BigInt, BigInt)> = dec
        .conditions()
        .into_iter()
        .map(|c| (c.residue, c.modulus))
        .collect();
    let (r, m) = crt_solve_big(&system)?;
    dec = dec.with_r(r);
    dec.crt_modulus = m;
    Ok(dec)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub holds: bool,
}

/// Outcome of [`verify_qtrick`]: every identity checked, all holding.
#[derive(Clone, Debug, Serialize)]
pub struct QtrickReport {
    pub checks: Vec<IdentityCheck>,
}

/// Exact verification of a decomposition; the first failing identity is
/// reported as a certificate failure.
pub fn verify_qtrick(dec: &QDecomposition) -> Result<QtrickReport> {
    let (a1, b1, a2, b2) = (
        BigInt::from(dec.a1),
        BigInt::from(dec.b1),
        BigInt::from(dec.a2),
        BigInt::from(dec.b2),
    );
    let mut checks: Vec<(String, bool)> = vec![
        ("A*W = Q".into(), &dec.a * &dec.w == dec.q),
        ("gcd(A, W) = 1".into(), dec.a.gcd(&dec.w).is_one()),
        ("u = a1*b2 - a2*b1 > 0".into(), dec.u == &a1 * &b2 - &a2 * &b1 && dec.u.is_positive()),
        (
            "0 <= r_Q < Q^2".into(),
            !dec.r_q.is_negative() && dec.r_q < &dec.q * &dec.q,
        ),
        (
            "W divides a1*r_Q + b1 (integrality of l_Q)".into(),
            (&a1 * &dec.r_q + &b1).is_multiple_of(&dec.w),
        ),
        ("l_Q*W = a1*r_Q + b1".into(), &dec.l_q * &dec.w == &a1 * &dec.r_q + &b1),
        (
            "A divides a2*r_Q + b2 (integrality of m_Q)".into(),
            (&a2 * &dec.r_q + &b2).is_multiple_of(&dec.a),
        ),
        ("m_Q*A = a2*r_Q + b2".into(), &dec.m_q * &dec.a == &a2 * &dec.r_q + &b2),
        (
            "gcd(l_Q, a1*A^2*W) = 1".into(),
            dec.l_q.gcd(&(&a1 * &dec.a * &dec.a * &dec.w)).is_one(),
        ),
        (
            "gcd(a2*A*W^2, m_Q) = u".into(),
            (&a2 * &dec.a * &dec.w * &dec.w).gcd(&dec.m_q) == dec.u,
        ),
    ];
    for c in dec.conditions() {
        let kind = if c.from_w { "first" } else { "second" };
        checks.push((
            format!("{kind} congruence at p = {}", c.prime),
            (&dec.r_q - &c.residue).is_multiple_of(&c.modulus),
        ));
    }
    for p in factorize(dec.a1 as u64)?.primes() {
        let p = BigInt::from(p);
        checks.push((
            format!("l_Q ≡ m_Q (mod {p})"),
            (&dec.l_q - &dec.m_q).is_multiple_of(&p),
        ));
    }
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::certificate(
            name.clone(),
            format!("Q = {}, r_Q = {}, l_Q = {}, m_Q = {}", dec.q, dec.r_q, dec.l_q, dec.m_q),
        ));
    }
    Ok(QtrickReport {
        checks: checks
            .into_iter()
            .map(|(identity, holds)| IdentityCheck { identity, holds })
            .collect(),
    })
}

/// Recomputes `r_Q` by scanning `0 ≤ r < crt_modulus` against the CRT
/// conditions; returns the unique solution.
pub fn brute_force_r(dec: &QDecomposition) -> Result<u64> {
    let m = dec
        .crt_modulus
        .to_u64()
        .filter(|&m| m <= BRUTE_FORCE_BUDGET)
        .ok_or_else(|| {
            Error::range("BRUTE_FORCE_BUDGET=10^7", format!("CRT modulus {}", dec.crt_modulus))
        })?;
    let conds: Vec<(u64, u64)> = dec
        .conditions()
        .iter()
        .map(|c| (c.residue.to_u64().unwrap(), c.modulus.to_u64().unwrap()))
        .collect();
    let hits: Vec<u64> = (0..m)
        .filter(|r| conds.iter().all(|&(t, md)| r % md == t))
        .collect();
    match hits.as_slice() {
        [r] => Ok(*r),
        _ => Err(Error::certificate(
            "unique CRT solution",
            format!("{} solutions below {m}", hits.len()),
        )),
    }
}

/// `Qp` if it lies in the Følner set; `None` marks `Q` as exceptional for `p`.
pub fn shift_partner(params: &FolnerParams, q: &FolnerElement, p: u64) -> Result<Option<FolnerElement>> {
    let i = params
        .position(p)
        .ok_or_else(|| Error::invalid(format!("{p} is not one of the Følner primes")))?;
    if q.exponents[i] >= params.hi {
        return Ok(None);
    }
    let mut exps = q.exponents.clone();
    exps[i] += 1;
    FolnerElement::from_exponents(params, exps).map(Some)
}

/// The four characters of the shift claims: `χ_{f,1}, χ_{g,1}` with modulus
/// supported on primes of `a1`, `χ_{f,2}, χ_{g,2}` with modulus coprime to `a1`.
#[derive(Clone, Debug)]
pub struct ClaimCharacters {
    pub f1: DirichletCharacter,
    pub f2: DirichletCharacter,
    pub g1: DirichletCharacter,
    pub g2: DirichletCharacter,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftCheck {
    pub identity: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftReport {
    pub q: String,
    pub qp: String,
    pub p: u64,
    pub checks: Vec<ShiftCheck>,
}

impl ShiftReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum ShiftOutcome {
    Checked(ShiftReport),
    /// `Qp` falls outside the set (the claims exclude such `Q`).
    Exceptional { q: String, p: u64 },
}

/// Why a character tuple is outside the claims' hypotheses, if it is.
pub fn claim_admissibility(dec: &QDecomposition, params: &FolnerParams, chars: &ClaimCharacters) -> Option<String> {
    let a1 = dec.a1 as u64;
    let part1 = |name: &str, chi: &DirichletCharacter| -> Option<String> {
        for (p, e) in factorize(chi.modulus()).ok()?.entries().iter().copied() {
            if a1 % p != 0 {
                return Some(format!("{name}: prime {p} of the modulus does not divide a1"));
            }
            if e > dec.mu {
                return Some(format!("{name}: exponent of {p} exceeds μ = {}", dec.mu));
            }
        }
        None
    };
    let part2 = |name: &str, chi: &DirichletCharacter, bound: &dyn Fn(u64, u32) -> Option<String>| -> Option<String> {
        for (p, e) in factorize(chi.modulus()).ok()?.entries().iter().copied() {
            if a1 % p == 0 {
                return Some(format!("{name}: prime {p} of the modulus divides a1"));
            }
            if params.position(p).is_none() {
                return Some(format!("{name}: prime {p} of the modulus is not a Følner prime"));
            }
            if let Some(msg) = bound(p, e) {
                return Some(format!("{name}: {msg}"));
            }
        }
        None
    };
    let nu = dec.nu;
    let theta = |p: u64| dec.exponents.iter().find(|e| e.0 == p).map_or(0, |e| e.1);
    let u = dec.u.to_u64().unwrap_or(0);
    part1("chi_f1", &chars.f1)
        .or_else(|| part1("chi_g1", &chars.g1))
        .or_else(|| {
            part2("chi_f2", &chars.f2, &|p, e| {
                (e > nu).then(|| format!("exponent of {p} exceeds ν = {nu}"))
            })
        })
        .or_else(|| {
            part2("chi_g2", &chars.g2, &|p, e| {
                let need = valuation(u, p) + e;
                (theta(p) < need).then(|| {
                    format!("θ_{p}(W) = {} < ν_{p}(u) + {e}", theta(p))
                })
            })
        })
}

/// Checks the four identities relating `ℓ_Q, m_Q` to `ℓ_{Qp}, m_{Qp}`:
/// `χ_{f,1}(ℓ_{Qp}) = χ̄_{f,1}(p) χ_{f,1}(ℓ_Q)`, `χ_{f,2}(ℓ_{Qp}) = χ_{f,2}(ℓ_Q)`,
/// `χ_{g,1}(m_{Qp}/u) = χ̄_{g,1}(p) χ_{g,1}(m_Q/u)`, `χ_{g,2}(m_{Qp}/u) = χ_{g,2}(m_Q/u)`.
pub fn verify_character_shift(
    params: &FolnerParams,
    dec_q: &QDecomposition,
    dec_qp: &QDecomposition,
    p: u64,
    chars: &ClaimCharacters,
) -> Result<ShiftOutcome> {
    if dec_q.a1 as u64 % p == 0 {
        return Err(Error::precondition(format!("p = {p} divides a1 = {}", dec_q.a1)));
    }
    let i = params
        .position(p)
        .ok_or_else(|| Error::precondition(format!("{p} is not one of the Følner primes")))?;
    if dec_q.exponents[i].1 >= params.hi {
        return Ok(ShiftOutcome::Exceptional { q: dec_q.q.to_string(), p });
    }
    let same_setup = (dec_q.a1, dec_q.b1, dec_q.a2, dec_q.b2, dec_q.mu, dec_q.nu)
        == (dec_qp.a1, dec_qp.b1, dec_qp.a2, dec_qp.b2, dec_qp.mu, dec_qp.nu);
    if !same_setup || dec_qp.q != &dec_q.q * BigInt::from(p) {
        return Err(Error::invalid("second decomposition is not the one of Qp"));
    }
    if let Some(why) = claim_admissibility(dec_q, params, chars) {
        return Err(Error::precondition(why));
    }
    let big = |chi: &DirichletCharacter, n: &BigInt| -> UnitValue {
        let m = BigInt::from(chi.modulus());
        chi.value(n.mod_floor(&m).to_u64().expect("residue fits"))
    };
    let mq = &dec_q.m_q / &dec_q.u;
    let mqp = &dec_qp.m_q / &dec_qp.u;
    let rows = [
        (
            "chi_f1(l_Qp) = conj(chi_f1(p)) chi_f1(l_Q)",
            big(&chars.f1, &dec_qp.l_q),
            chars.f1.value(p).conj().mul(big(&chars.f1, &dec_q.l_q)),
        ),
        (
            "chi_f2(l_Qp) = chi_f2(l_Q)",
            big(&chars.f2, &dec_qp.l_q),
            big(&chars.f2, &dec_q.l_q),
        ),
        (
            "chi_g1(m_Qp/u) = conj(chi_g1(p)) chi_g1(m_Q/u)",
            big(&chars.g1, &mqp),
            chars.g1.value(p).conj().mul(big(&chars.g1, &mq)),
        ),
        (
            "chi_g2(m_Qp/u) = chi_g2(m_Q/u)",
            big(&chars.g2, &mqp),
            big(&chars.g2, &mq),
        ),
    ];
    let checks = rows
        .into_iter()
        .map(|(identity, lhs, rhs)| ShiftCheck {
            identity,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            holds: lhs.is_exact() && lhs == rhs,
        })
        .collect();
    Ok(ShiftOutcome::Checked(ShiftReport {
        q: dec_q.q.to_string(),
        qp: dec_qp.q.to_string(),
        p,
        checks,
    }))
}

/// `𝔼_{Q∈Φ} 𝔼^log_{n≤X} f(a1Q²n + a1r_Q + b1) g(a2Q²n + a2r_Q + b2)`, evaluated
/// through `f(W) f(a1A²Wn + ℓ_Q) · g(A) g(a2AW²n + m_Q)`.
#[allow(clippy::too_many_arguments)]
pub fn averaged_correlation(
    f: &MultFunction,
    g: &MultFunction,
    a1: i64,
    b1: i64,
    a2: i64,
    b2: i64,
    params: &FolnerParams,
    mu: u32,
    nu: u32,
    x: u64,
) -> Result<Complex64> {
    if x < 2 {
        return Err(Error::invalid(format!("range end X = {x} must be ≥ 2")));
    }
    let set = folner_set(params)?;
    let decs: Vec<QDecomposition> = set
        .iter()
        .map(|q| q_decompose(params, q, a1, b1, a2, b2, mu, nu))
        .collect::<Result<_>>()?;
    let limit = BigInt::from(ARG_MAX);
    let xb = BigInt::from(x);
    // After a sign swap the first form belongs to g.
    let (ff, gg) = if decs[0].swapped { (g, f) } else { (f, g) };
    let per_q: Vec<Complex64> = decs
        .par_iter()
        .map(|d| -> Result<Complex64> {
            let step1 = BigInt::from(d.a1) * &d.a * &d.a * &d.w;
            let step2 = BigInt::from(d.a2) * &d.a * &d.w * &d.w;
            for (step, off) in [(&step1, &d.l_q), (&step2, &d.m_q)] {
                let top = step * &xb + off;
                if top > limit {
                    return Err(Error::range(
                        "ARG_MAX=2^63",
                        format!("argument {top} for Q = {}; shrink the exponent window or X", d.q),
                    ));
                }
                if (step + off).sign() != Sign::Plus {
                    return Err(Error::range(
                        "positive arguments",
                        format!("nonpositive argument at n = 1 for Q = {}", d.q),
                    ));
                }
            }
            let (s1, o1) = (step1.to_i128().unwrap(), d.l_q.to_i128().unwrap());
            let (s2, o2) = (step2.to_i128().unwrap(), d.m_q.to_i128().unwrap());
            let w_fac: Vec<(u64, u32)> = d.exponents.iter().copied().filter(|&(p, _)| d.a1 as u64 % p != 0).collect();
            let a_fac: Vec<(u64, u32)> = d.exponents.iter().copied().filter(|&(p, _)| d.a1 as u64 % p == 0).collect();
            let front = eval_prime_powers(ff, &w_fac).mul(eval_prime_powers(gg, &a_fac));
            let mut s = ComplexSum::default();
            for (lo, hi) in chunks(1, x) {
                for n in lo..=hi {
                    let u = ff.eval_unchecked((s1 * n as i128 + o1) as u64);
                    let v = gg.eval_unchecked((s2 * n as i128 + o2) as u64);
                    s.add(u.mul(v).to_complex() / n as f64);
                }
            }
            Ok(front.to_complex() * s.value())
        })
        .collect::<Result<_>>()?;
    let mut total = ComplexSum::default();
    per_q.iter().for_each(|&z| total.add(z / (x as f64).ln()));
    Ok(total.value() / set.len() as f64)
}
