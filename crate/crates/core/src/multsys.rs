//! Multiplicative rotation systems `T_n(z_1, …, z_ℓ) = (f_1(n)z_1, …, f_ℓ(n)z_ℓ)`
//! on products of circles, with arcs kept in exact rational arithmetic
//! whenever the rotation angles are rational.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::multfunc::{MultFunction, Turn, UnitValue};
use crate::numkernel::{Rational, ARG_MAX};
use crate::recurrence::{Quadruple, SCAN_BUDGET};
use crate::sum::chunks;
use crate::{Error, Result};

/// Tolerance for comparisons on the floating path.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Largest denominator of the default arc family.
pub const DEFAULT_ARC_DENOMINATOR: u64 = 64;

/// A point or length on `ℝ/ℤ`: rational when possible, else floating.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Float(f64),
}

impl Real {
    pub fn zero() -> Real {
        Real::Exact(Rational::zero())
    }

    pub fn one() -> Real {
        Real::Exact(Rational::one())
    }

    pub fn ratio(num: i128, den: i128) -> Result<Real> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(Real::Exact(Rational::new(num, den)))
    }

    pub fn of_turn(t: Turn) -> Real {
        Real::Exact(Rational::new(t.num() as i128, t.den() as i128))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Real::Float(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn add(self, o: Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            (a, b) => Real::Float(a.to_f64() + b.to_f64()),
        }
    }

    pub fn sub(self, o: Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a - b),
            (a, b) => Real::Float(a.to_f64() - b.to_f64()),
        }
    }

    pub fn mul(self, o: Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            (a, b) => Real::Float(a.to_f64() * b.to_f64()),
        }
    }

    /// Reduction into `[0, 1)`.
    pub fn frac(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(r - r.floor()),
            Real::Float(x) => {
                let y = x.rem_euclid(1.0);
                Real::Float(if y >= 1.0 { 0.0 } else { y })
            }
        }
    }

    pub fn is_positive(self) -> bool {
        match self {
            Real::Exact(r) => r.is_positive(),
            Real::Float(x) => x > 0.0,
        }
    }

    fn min(self, o: Real) -> Real {
        if o < self {
            o
        } else {
            self
        }
    }

    fn max(self, o: Real) -> Real {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Some(a.cmp(b)),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Real::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An arc `[start, start + length)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: Real,
    length: Real,
}

impl Arc {
    pub fn new(start: Real, length: Real) -> Result<Arc> {
        if !length.is_positive() || length > Real::one() {
            return Err(Error::invalid(format!("arc length {length} must lie in (0, 1]")));
        }
        Ok(Arc {
            start: start.frac(),
            length,
        })
    }

    /// `[num/den, num/den + len_num/len_den)`.
    pub fn rational(num: i128, den: i128, len_num: i128, len_den: i128) -> Result<Arc> {
        Arc::new(Real::ratio(num, den)?, Real::ratio(len_num, len_den)?)
    }

    pub fn start(&self) -> Real {
        self.start
    }

    pub fn length(&self) -> Real {
        self.length
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}+{})", self.start, self.start, self.length)
    }
}

/// A finite union of arcs, kept as sorted disjoint intervals `[lo, hi)` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArcSet {
    intervals: Vec<(Real, Real)>,
}

impl ArcSet {
    pub fn empty() -> ArcSet {
        ArcSet::default()
    }

    pub fn from_arc(arc: Arc) -> ArcSet {
        ArcSet::from_arcs(&[arc])
    }

    pub fn from_arcs(arcs: &[Arc]) -> ArcSet {
        let mut pieces = Vec::new();
        for a in arcs {
            push_wrapped(&mut pieces, a.start, a.start.add(a.length));
        }
        ArcSet::normalized(pieces)
    }

    fn normalized(mut pieces: Vec<(Real, Real)>) -> ArcSet {
        pieces.retain(|(lo, hi)| lo < hi);
        pieces.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut out: Vec<(Real, Real)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        ArcSet { intervals: out }
    }

    /// Intervals `[lo, hi)` within `[0, 1]`.
    pub fn intervals(&self) -> &[(Real, Real)] {
        &self.intervals
    }

    /// The set as disjoint arcs sorted by start; an interval ending at 1
    /// joins one starting at 0.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut iv = self.intervals.clone();
        let wraps = iv.len() > 1
            && iv.first().map(|f| f.0 == Real::zero()).unwrap_or(false)
            && iv.last().map(|l| l.1 == Real::one()).unwrap_or(false);
        let mut head = None;
        if wraps {
            head = Some(iv.remove(0));
        }
        let mut out: Vec<Arc> = iv
            .iter()
            .map(|&(lo, hi)| Arc {
                start: lo,
                length: hi.sub(lo),
            })
            .collect();
        if let (Some((_, h_hi)), Some(last)) = (head, out.last_mut()) {
            last.length = last.length.add(h_hi);
        }
        out
    }

    pub fn measure(&self) -> Real {
        self.intervals
            .iter()
            .fold(Real::zero(), |acc, &(lo, hi)| acc.add(hi.sub(lo)))
    }

    pub fn is_exact(&self) -> bool {
        self.intervals.iter().all(|(a, b)| a.is_exact() && b.is_exact())
    }

    /// `{x + shift : x ∈ self}`.
    pub fn rotate(&self, shift: Real) -> ArcSet {
        let mut pieces = Vec::with_capacity(self.intervals.len() + 1);
        for &(lo, hi) in &self.intervals {
            let start = lo.add(shift).frac();
            push_wrapped(&mut pieces, start, start.add(hi.sub(lo)));
        }
        ArcSet::normalized(pieces)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = self.intervals[i];
            let (b0, b1) = other.intervals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet { intervals: out }
    }
}

/// Adds `[start, end)` with `start ∈ [0, 1)` and `end ≤ start + 1`, split at 1.
fn push_wrapped(out: &mut Vec<(Real, Real)>, start: Real, end: Real) {
    if end > Real::one() {
        out.push((start, Real::one()));
        out.push((Real::zero(), end.sub(Real::one())));
    } else {
        out.push((start, end));
    }
}

/// How a coordinate rotates under `T_n`.
#[derive(Clone, Debug)]
pub enum Coordinate {
    /// By the value `f(n)` of a function in 𝓜.
    Function(MultFunction),
    /// By the angle listed for `n` (1-based); need not be multiplicative.
    Table(Vec<Turn>),
}

impl Coordinate {
    fn angle(&self, n: u64) -> Result<Real> {
        match self {
            Coordinate::Function(f) => match f.eval(n)? {
                UnitValue::Exact(t) => Ok(Real::of_turn(t)),
                UnitValue::Float(z) => Ok(Real::Float((z.arg() / std::f64::consts::TAU).rem_euclid(1.0)).frac()),
                UnitValue::Zero => Err(Error::precondition(format!("coordinate function vanishes at {n}"))),
            },
            Coordinate::Table(t) => (n as usize)
                .checked_sub(1)
                .and_then(|i| t.get(i))
                .map(|&a| Real::of_turn(a))
                .ok_or_else(|| Error::range("table length", format!("n = {n} beyond a table of {}", t.len()))),
        }
    }

    fn limit(&self) -> u64 {
        match self {
            Coordinate::Function(_) => ARG_MAX,
            Coordinate::Table(t) => t.len() as u64,
        }
    }
}

/// The action `T_n z = (angle_i(n) + z_i)_i` on `(ℝ/ℤ)^ℓ`.
#[derive(Clone, Debug)]
pub struct RotationSystem {
    coords: Vec<Coordinate>,
}

impl RotationSystem {
    pub fn new(coords: Vec<Coordinate>) -> Result<RotationSystem> {
        if coords.is_empty() {
            return Err(Error::invalid("a rotation system needs at least one coordinate"));
        }
        for c in &coords {
            if let Coordinate::Function(f) = c {
                if !f.in_m() {
                    return Err(Error::precondition(
                        "coordinate functions must be unimodular (vanish at no prime)",
                    ));
                }
            }
        }
        Ok(RotationSystem { coords })
    }

    pub fn from_functions(fs: Vec<MultFunction>) -> Result<RotationSystem> {
        RotationSystem::new(fs.into_iter().map(Coordinate::Function).collect())
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    /// Rotation angles of `T_n`.
    pub fn angles(&self, n: u64) -> Result<Vec<Real>> {
        if n == 0 {
            return Err(Error::invalid("T_n is defined for n ≥ 1"));
        }
        self.coords.iter().map(|c| c.angle(n)).collect()
    }

    fn check_sets(&self, sets: &[ArcSet]) -> Result<()> {
        if sets.len() != self.coords.len() {
            return Err(Error::invalid(format!(
                "{} arc sets given for a {}-dimensional system",
                sets.len(),
                self.coords.len()
            )));
        }
        Ok(())
    }
}

/// `T_n^{-1}(A_1 × … × A_ℓ)`, coordinatewise `A_i − angle_i(n)`.
pub fn preimage(sys: &RotationSystem, n: u64, sets: &[ArcSet]) -> Result<Vec<ArcSet>> {
    sys.check_sets(sets)?;
    let angles = sys.angles(n)?;
    Ok(sets
        .iter()
        .zip(angles)
        .map(|(s, a)| s.rotate(Real::zero().sub(a)))
        .collect())
}

fn product_measure(sets: &[ArcSet]) -> Real {
    sets.iter().fold(Real::one(), |acc, s| acc.mul(s.measure()))
}

/// `μ(T_p^{-1}A ∩ T_q^{-1}A)` for the product set `A`.
pub fn recurrence_measure(sys: &RotationSystem, p: u64, q: u64, sets: &[ArcSet]) -> Result<Real> {
    let a = preimage(sys, p, sets)?;
    let b = preimage(sys, q, sets)?;
    let inter: Vec<ArcSet> = a.iter().zip(&b).map(|(x, y)| x.intersect(y)).collect();
    Ok(product_measure(&inter))
}

/// The ratios `p_n/q_n` to test.
#[derive(Clone, Debug)]
pub enum RatioSequence {
    Forms(Quadruple),
    Explicit(Vec<(u64, u64)>),
}

impl RatioSequence {
    fn at(&self, n: u64) -> Result<(u64, u64)> {
        match self {
            RatioSequence::Forms(q) => {
                let (x, y) = q.forms(n);
                if x < 1 || y < 1 {
                    return Err(Error::range("positive arguments", format!("forms ({q}) at n = {n}")));
                }
                Ok((x as u64, y as u64))
            }
            RatioSequence::Explicit(v) => (n as usize)
                .checked_sub(1)
                .and_then(|i| v.get(i))
                .copied()
                .ok_or_else(|| Error::range("sequence length", format!("n = {n} beyond {} terms", v.len()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceEvent {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub measure: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceScan {
    pub from: u64,
    pub to: u64,
    pub events: Vec<RecurrenceEvent>,
    /// Largest run of consecutive non-events inside `[from, to]`.
    pub largest_gap: u64,
    /// Events at which the chord bound of a one-dimensional single arc failed.
    pub bridge_violations: Vec<u64>,
    /// Whether the chord bound applied (one coordinate, one arc of length ≤ 1/2).
    pub bridge_checked: bool,
}

impl RecurrenceScan {
    pub fn count(&self) -> usize {
        self.events.len()
    }

    /// Finite-range proxy for "infinitely many n".
    pub fn recurs(&self, min_events: usize, max_gap: u64) -> bool {
        self.count() >= min_events && self.largest_gap <= max_gap
    }
}

/// The chord bound: overlap of `A − α` and `A − β` for an arc `A` of length
/// `L ≤ 1/2` forces `‖α − β‖ < L`, i.e. `|e(α) − e(β)| < 2 sin(πL)`.
fn bridge_holds(alpha: Real, beta: Real, length: Real) -> bool {
    let diff = alpha.sub(beta).frac();
    let dist = diff.min(Real::one().sub(diff));
    match (dist, length) {
        (Real::Exact(_), Real::Exact(_)) => dist < length,
        _ => dist.to_f64() < length.to_f64() + FLOAT_TOLERANCE,
    }
}

/// Every `n ∈ [from, to]` with `μ(T_{p_n}^{-1}A ∩ T_{q_n}^{-1}A) > 0`.
pub fn scan_recurrence(
    sys: &RotationSystem,
    seq: &RatioSequence,
    sets: &[ArcSet],
    from: u64,
    to: u64,
) -> Result<RecurrenceScan> {
    sys.check_sets(sets)?;
    if from == 0 || from > to {
        return Err(Error::invalid(format!("empty or invalid range [{from}, {to}]")));
    }
    if to > SCAN_BUDGET {
        return Err(Error::range("SCAN_BUDGET=10^8", format!("range end {to}")));
    }
    let single = match (sys.dimension(), sets[0].arcs().as_slice()) {
        (1, [arc]) if arc.length <= Real::ratio(1, 2)? => Some(arc.length),
        _ => None,
    };
    let parts: Vec<Result<(Vec<RecurrenceEvent>, Vec<u64>)>> = chunks(from, to)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut events = Vec::new();
            let mut violations = Vec::new();
            for n in lo..=hi {
                let (p, q) = seq.at(n)?;
                let measure = recurrence_measure(sys, p, q, sets)?;
                if measure.is_positive() {
                    if let Some(len) = single {
                        if !bridge_holds(sys.coords[0].angle(p)?, sys.coords[0].angle(q)?, len) {
                            violations.push(n);
                        }
                    }
                    events.push(RecurrenceEvent { n, p, q, measure });
                }
            }
            Ok((events, violations))
        })
        .collect();
    let mut events = Vec::new();
    let mut bridge_violations = Vec::new();
    for part in parts {
        let (e, v) = part?;
        events.extend(e);
        bridge_violations.extend(v);
    }
    let mut largest_gap = 0;
    let mut prev = from - 1;
    for e in &events {
        largest_gap = largest_gap.max(e.n - prev - 1);
        prev = e.n;
    }
    largest_gap = largest_gap.max(to - prev);
    Ok(RecurrenceScan {
        from,
        to,
        events,
        largest_gap,
        bridge_violations,
        bridge_checked: single.is_some(),
    })
}

/// Arcs `[i/k, j/k)`, `0 ≤ i < j ≤ k`, over denominators `k ≤ max_den`, reduced
/// and without repeats.
pub fn arc_family(max_den: u64) -> Vec<Arc> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for k in 1..=max_den as i128 {
        for i in 0..k {
            for j in i + 1..=k {
                let (s, l) = (Rational::new(i, k), Rational::new(j - i, k));
                if seen.insert((s, l)) {
                    out.push(Arc {
                        start: Real::Exact(s),
                        length: Real::Exact(l),
                    });
                }
            }
        }
    }
    out
}

fn random_arc(rng: &mut ChaCha8Rng, max_den: u64) -> Arc {
    let k = rng.gen_range(1..=max_den) as i128;
    let i = rng.gen_range(0..k);
    let len = rng.gen_range(1..=k);
    Arc {
        start: Real::Exact(Rational::new(i, k)),
        length: Real::Exact(Rational::new(len, k)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomsReport {
    pub trials: u64,
    pub seed: u64,
    pub arc_family: String,
    pub composition_failures: u64,
    pub measure_failures: u64,
    /// First `(n, m)` breaking `T_n ∘ T_m = T_{nm}`.
    pub composition_witness: Option<(u64, u64)>,
    /// First `n` whose preimage changed the measure.
    pub measure_witness: Option<u64>,
}

impl AxiomsReport {
    pub fn passed(&self) -> bool {
        self.composition_failures == 0 && self.measure_failures == 0
    }
}

fn angles_agree(a: Real, b: Real) -> bool {
    match (a, b) {
        (Real::Exact(x), Real::Exact(y)) => (x - y).is_integer(),
        _ => {
            let d = a.sub(b).frac().to_f64();
            d.min(1.0 - d) <= 1e-9
        }
    }
}

fn measures_agree(a: Real, b: Real) -> bool {
    match (a, b) {
        (Real::Exact(x), Real::Exact(y)) => x == y,
        _ => (a.to_f64() - b.to_f64()).abs() <= FLOAT_TOLERANCE,
    }
}

/// Checks `T_n ∘ T_m = T_{nm}` and `μ(T_n^{-1}A) = μ(A)` on random `n, m ≤ 10^4`
/// (kept within table lengths) and random arcs of the default family.
pub fn action_axioms_check(sys: &RotationSystem, trials: u64, seed: u64) -> Result<AxiomsReport> {
    let limit = sys.coords.iter().map(Coordinate::limit).min().unwrap_or(ARG_MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomsReport {
        trials,
        seed,
        arc_family: format!("arcs with rational endpoints of denominator <= {DEFAULT_ARC_DENOMINATOR}"),
        composition_failures: 0,
        measure_failures: 0,
        composition_witness: None,
        measure_witness: None,
    };
    for _ in 0..trials {
        let n = rng.gen_range(1..=10_000u64.min(limit));
        let m = rng.gen_range(1..=10_000u64.min(limit / n).max(1));
        let sets: Vec<ArcSet> = (0..sys.dimension())
            .map(|_| ArcSet::from_arc(random_arc(&mut rng, DEFAULT_ARC_DENOMINATOR)))
            .collect();
        let (an, am, anm) = (sys.angles(n)?, sys.angles(m)?, sys.angles(n * m)?);
        let composed = an.iter().zip(&am).zip(&anm).all(|((x, y), z)| angles_agree(x.add(*y), *z));
        if !composed {
            report.composition_failures += 1;
            report.composition_witness.get_or_insert((n, m));
        }
        let pre = preimage(sys, n, &sets)?;
        if !measures_agree(product_measure(&pre), product_measure(&sets)) {
            report.measure_failures += 1;
            report.measure_witness.get_or_insert(n);
        }
    }
    Ok(report)
}
