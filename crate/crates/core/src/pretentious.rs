//! Pretentious distances, logarithmic averages and correlations, Halász-type
//! diagnostics, aperiodicity profiles and prime character sums.
//!
//! All sums run over fixed chunks and use [`FixedSum`] accumulation, so the
//! results do not depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::multfunc::{DirichletCharacter, MultFunction};
use crate::numkernel::{gcd, primes_in, primes_up_to, ARG_MAX, PRIME_BUDGET};
use crate::sum::{chunks, harmonic, ComplexSum, FixedSum};
use crate::{Error, Result};

/// Prime window `(A, B]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceWindow {
    lower: f64,
    upper: f64,
}

impl DistanceWindow {
    pub fn new(lower: f64, upper: f64) -> Result<DistanceWindow> {
        if !(lower >= 1.0 && upper > lower && upper.is_finite()) {
            return Err(Error::invalid(format!(
                "window ({lower}, {upper}] needs 1 ≤ A < B"
            )));
        }
        if upper > PRIME_BUDGET as f64 {
            return Err(Error::range(
                "PRIME_BUDGET=4*10^8",
                format!("window upper end {upper}"),
            ));
        }
        Ok(DistanceWindow { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    fn primes(&self) -> Result<Vec<u64>> {
        primes_in(self.lower.floor() as u64 + 1, self.upper.floor() as u64)
    }
}

fn prime_chunks(primes: &[u64]) -> Vec<&[u64]> {
    primes.chunks(1 << 12).collect()
}

/// Exact accumulator behind [`distance`]: `Σ_{A<p≤B} (1 − Re f(p)ḡ(p))/p`.
pub fn distance_squared_sum(
    f: &MultFunction,
    g: &MultFunction,
    window: &DistanceWindow,
) -> Result<FixedSum> {
    let primes = window.primes()?;
    let parts: Vec<FixedSum> = prime_chunks(&primes)
        .into_par_iter()
        .map(|ps| {
            let mut s = FixedSum::default();
            for &p in ps {
                let w = f.prime_value(p).to_complex() * g.prime_value(p).to_complex().conj();
                s.add((1.0 - w.re) / p as f64);
            }
            s
        })
        .collect();
    Ok(parts.into_iter().fold(FixedSum::default(), |a, b| a + b))
}

/// `𝔻(f, g; A, B)`.
pub fn distance(f: &MultFunction, g: &MultFunction, window: &DistanceWindow) -> Result<f64> {
    Ok(distance_squared_sum(f, g, window)?.value().max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogAverage {
    pub value: Complex64,
    pub x: u64,
    pub progression: Option<(u64, u64)>,
}

fn check_progression(progression: Option<(u64, u64)>) -> Result<()> {
    if let Some((l, r)) = progression {
        if l == 0 || r >= l {
            return Err(Error::invalid(format!(
                "progression ({l}, {r}) needs L ≥ 1 and 0 ≤ r < L"
            )));
        }
    }
    Ok(())
}

/// Sum of `term(n)/n` over `1 ≤ n ≤ x`, chunk-parallel.
fn weighted_sum<F>(x: u64, term: F) -> Result<Complex64>
where
    F: Fn(u64) -> Result<Complex64> + Sync,
{
    let parts: Vec<ComplexSum> = chunks(1, x)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut s = ComplexSum::default();
            for n in lo..=hi {
                s.add(term(n)? / n as f64);
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let mut total = ComplexSum::default();
    parts.into_iter().for_each(|p| total.merge(p));
    Ok(total.value())
}

fn check_x(x: u64) -> Result<()> {
    if x < 2 {
        return Err(Error::invalid(format!("range end X = {x} must be ≥ 2")));
    }
    Ok(())
}

/// `(1/log X) Σ_{n≤X} f(Ln+r)/n` (or `f(n)` without a progression).
pub fn log_average(f: &MultFunction, x: u64, progression: Option<(u64, u64)>) -> Result<LogAverage> {
    check_x(x)?;
    check_progression(progression)?;
    let (l, r) = progression.unwrap_or((1, 0));
    let top = l as u128 * x as u128 + r as u128;
    if top > ARG_MAX as u128 {
        return Err(Error::range("ARG_MAX=2^63", format!("argument {top}")));
    }
    let s = weighted_sum(x, |n| Ok(f.eval_unchecked(l * n + r).to_complex()))?;
    Ok(LogAverage {
        value: s / (x as f64).ln(),
        x,
        progression,
    })
}

/// `(1/log X) Σ_{n≤X} f(a1 m + b1) g(a2 m + b2)/n` with `m = n` or `m = Ln + r`.
#[allow(clippy::too_many_arguments)]
pub fn correlation(
    f: &MultFunction,
    g: &MultFunction,
    a1: i64,
    b1: i64,
    a2: i64,
    b2: i64,
    x: u64,
    progression: Option<(u64, u64)>,
) -> Result<Complex64> {
    check_x(x)?;
    check_progression(progression)?;
    let (l, r) = progression.unwrap_or((1, 0));
    let arg = |a: i64, b: i64, n: u64| -> Result<u64> {
        let m = l as i128 * n as i128 + r as i128;
        let v = a as i128 * m + b as i128;
        if v <= 0 || v > ARG_MAX as i128 {
            return Err(Error::range(
                "positive arguments ≤ 2^63",
                format!("argument {v} at n = {n}"),
            ));
        }
        Ok(v as u64)
    };
    let s = weighted_sum(x, |n| {
        let u = f.eval_unchecked(arg(a1, b1, n)?);
        let v = g.eval_unchecked(arg(a2, b2, n)?);
        Ok(u.mul(v).to_complex())
    })?;
    Ok(s / (x as f64).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalaszGap {
    /// `|𝔼^log_{n≤X} f(n)|`.
    pub lhs: f64,
    /// `exp(−½ Σ_{p≤X} (1 − Re f(p))/p)`.
    pub rhs: f64,
    pub ratio: f64,
}

pub fn halasz_gap(f: &MultFunction, x: u64) -> Result<HalaszGap> {
    let lhs = log_average(f, x, None)?.value.norm();
    let d2 = distance_squared_sum(f, &MultFunction::One, &DistanceWindow::new(1.0, x as f64)?)?;
    let rhs = (-0.5 * d2.value()).exp();
    Ok(HalaszGap {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Characters searched by the aperiodicity profile: primitive characters of
/// conductor `≤ bound`, or with `imprimitive` every character of modulus `≤ bound`.
pub fn characters_up_to(bound: f64, imprimitive: bool) -> Result<Vec<DirichletCharacter>> {
    let q_max = bound.floor().max(0.0) as u64;
    let mut out = Vec::new();
    for q in 1..=q_max {
        for chi in DirichletCharacter::all(q)? {
            if imprimitive || chi.is_primitive() {
                out.push(chi);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProfileOptions {
    /// Search every character of modulus `≤ B`, not only primitive ones.
    pub imprimitive: bool,
    /// Golden-section refinement around the best grid point.
    pub refine: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub modulus: u64,
    pub index: Vec<u64>,
    pub conductor: u64,
    /// `𝔻(f, χ n^{it}; 1, X)` for each grid point.
    pub distances: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileArgmin {
    pub modulus: u64,
    pub index: Vec<u64>,
    pub t: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AperiodicityProfile {
    pub b: f64,
    pub x: u64,
    pub t_grid: Vec<f64>,
    /// Largest gap between consecutive grid points.
    pub resolution: f64,
    pub rows: Vec<ProfileRow>,
    /// Minimum over the grid only.
    pub grid_infimum: ProfileArgmin,
    /// Result of the local refinement, when requested.
    pub refined: Option<ProfileArgmin>,
    /// `min(grid, refined)`.
    pub infimum: f64,
}

struct PrimeTable {
    log_p: Vec<f64>,
    inv_p: Vec<f64>,
    primes: Vec<u64>,
    f_values: Vec<Complex64>,
}

impl PrimeTable {
    fn new(f: &MultFunction, x: u64) -> Result<PrimeTable> {
        let primes = primes_up_to(x)?;
        Ok(PrimeTable {
            log_p: primes.iter().map(|&p| (p as f64).ln()).collect(),
            inv_p: primes.iter().map(|&p| 1.0 / p as f64).collect(),
            f_values: primes.iter().map(|&p| f.prime_value(p).to_complex()).collect(),
            primes,
        })
    }

    /// `f(p) χ̄(p)` per prime.
    fn weights(&self, chi: &DirichletCharacter) -> Vec<Complex64> {
        self.primes
            .iter()
            .zip(&self.f_values)
            .map(|(&p, &fp)| fp * chi.value(p).to_complex().conj())
            .collect()
    }

    /// `𝔻(f, χ n^{it}; 1, X)` from precomputed weights.
    fn distance(&self, weights: &[Complex64], t: f64) -> f64 {
        let mut s = FixedSum::default();
        for i in 0..weights.len() {
            let phase = Complex64::from_polar(1.0, -t * self.log_p[i]);
            s.add((1.0 - (weights[i] * phase).re) * self.inv_p[i]);
        }
        s.value().max(0.0).sqrt()
    }
}

/// Evenly spaced grid of `points` values on `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `inf 𝔻(f(n), χ(n) n^{it}; 1, X)` over the characters of conductor `≤ B`
/// and the supplied `t` grid.
pub fn aperiodicity_profile(
    f: &MultFunction,
    b: f64,
    x: u64,
    t_grid: &[f64],
    options: ProfileOptions,
) -> Result<AperiodicityProfile> {
    check_x(x)?;
    if t_grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    if !(b >= 1.0) {
        return Err(Error::invalid(format!("B = {b} must be ≥ 1")));
    }
    let t_max = b * x as f64;
    if let Some(t) = t_grid.iter().find(|t| !(t.abs() <= t_max)) {
        return Err(Error::invalid(format!("grid point {t} outside [-BX, BX]")));
    }
    let table = PrimeTable::new(f, x)?;
    let chars = characters_up_to(b, options.imprimitive)?;
    let weights: Vec<Vec<Complex64>> = chars.iter().map(|c| table.weights(c)).collect();
    let rows: Vec<ProfileRow> = chars
        .iter()
        .zip(&weights)
        .map(|(chi, w)| ProfileRow {
            modulus: chi.modulus(),
            index: chi.index().to_vec(),
            conductor: chi.conductor(),
            distances: t_grid.par_iter().map(|&t| table.distance(w, t)).collect(),
        })
        .collect();

    let mut best = (0usize, 0usize, f64::INFINITY);
    for (ci, row) in rows.iter().enumerate() {
        for (ti, &d) in row.distances.iter().enumerate() {
            if d < best.2 {
                best = (ci, ti, d);
            }
        }
    }
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let resolution = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let grid_infimum = ProfileArgmin {
        modulus: chars[best.0].modulus(),
        index: chars[best.0].index().to_vec(),
        t: t_grid[best.1],
        distance: best.2,
    };

    let refined = options.refine.then(|| {
        let t0 = t_grid[best.1];
        let h = if resolution > 0.0 { resolution } else { 1.0 };
        let (lo, hi) = ((t0 - h).max(-t_max), (t0 + h).min(t_max));
        let w = &weights[best.0];
        let (t, d) = golden_section(|t| table.distance(w, t), lo, hi, 60);
        ProfileArgmin {
            modulus: grid_infimum.modulus,
            index: grid_infimum.index.clone(),
            t,
            distance: d,
        }
    });
    let infimum = refined
        .as_ref()
        .map_or(best.2, |r| r.distance.min(best.2));
    Ok(AperiodicityProfile {
        b,
        x,
        t_grid: t_grid.to_vec(),
        resolution,
        rows,
        grid_infimum,
        refined,
        infimum,
    })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `Σ_{Y≤p≤X} χ(p) p^{−1−ia}`.
pub fn prime_character_sum(chi: &DirichletCharacter, a: f64, y: u64, x: u64) -> Result<Complex64> {
    if y > x {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let primes = primes_in(y, x)?;
    let parts: Vec<ComplexSum> = prime_chunks(&primes)
        .into_par_iter()
        .map(|ps| {
            let mut s = ComplexSum::default();
            for &p in ps {
                let pf = p as f64;
                let term = chi.value(p).to_complex() * Complex64::from_polar(1.0 / pf, -a * pf.ln());
                s.add(term);
            }
            s
        })
        .collect();
    let mut total = ComplexSum::default();
    parts.into_iter().for_each(|p| total.merge(p));
    Ok(total.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcentrationResidual {
    /// `Σ_{n≤X} |f(Qn+a) − χ(a)(Qn)^{it} exp(F(Q,X))| / n`.
    pub lhs: f64,
    /// `log X · (𝔻(f, χ n^{it}; p_K, X) + p_K^{−1/2})`.
    pub rhs_core: f64,
    pub ratio: f64,
    /// Largest prime such that every prime up to it divides `Q`.
    pub p_k: u64,
    /// `F(Q, X) = Σ_{p≤X, p∤Q} (f(p) χ̄(p) p^{−it} − 1)/p`.
    pub exponent: Complex64,
    /// The distance term is ≥ 1, where the estimate carries no information.
    pub out_of_regime: bool,
}

pub fn concentration_residual(
    f: &MultFunction,
    chi: &DirichletCharacter,
    t: f64,
    q: u64,
    a: u64,
    x: u64,
) -> Result<ConcentrationResidual> {
    check_x(x)?;
    if q == 0 || q % chi.modulus() != 0 {
        return Err(Error::invalid(format!(
            "character modulus {} must divide Q = {q}",
            chi.modulus()
        )));
    }
    if gcd(a % q, q) != 1 {
        return Err(Error::invalid(format!("gcd(a, Q) = gcd({a}, {q}) must be 1")));
    }
    if q % 2 != 0 {
        return Err(Error::invalid(format!(
            "Q = {q} must be divisible by the primes up to p_K (at least by 2)"
        )));
    }
    if (q as u128) * (x as u128) + a as u128 > ARG_MAX as u128 {
        return Err(Error::range("ARG_MAX=2^63", "Q·X + a exceeds 2^63"));
    }
    let mut p_k = 2;
    for p in primes_up_to(x.max(3))?.into_iter().skip(1) {
        if q % p != 0 {
            break;
        }
        p_k = p;
    }
    let twisted = MultFunction::product(MultFunction::character(chi.clone()), MultFunction::Twist(t));
    let mut exponent = ComplexSum::default();
    for p in primes_up_to(x)? {
        if q % p != 0 {
            let w = f.prime_value(p).to_complex() * twisted.prime_value(p).to_complex().conj();
            exponent.add((w - 1.0) / p as f64);
        }
    }
    let exponent = exponent.value();
    let scale = chi.value(a).to_complex() * exponent.exp();
    let lhs = weighted_sum(x, |n| {
        let m = q * n;
        let target = scale * Complex64::from_polar(1.0, t * (m as f64).ln());
        Ok(Complex64::new((f.eval_unchecked(m + a).to_complex() - target).norm(), 0.0))
    })?
    .re;
    let d = if (p_k as f64) < x as f64 {
        distance(f, &twisted, &DistanceWindow::new(p_k as f64, x as f64)?)?
    } else {
        0.0
    };
    let rhs_core = (x as f64).ln() * (d + (p_k as f64).powf(-0.5));
    Ok(ConcentrationResidual {
        lhs,
        rhs_core,
        ratio: lhs / rhs_core,
        p_k,
        exponent,
        out_of_regime: d >= 1.0,
    })
}

/// `(Σ_{n≤X} 1/n) / log X`, the bound on any 1-bounded logarithmic average.
pub fn log_average_bound(x: u64) -> f64 {
    harmonic(x) / (x as f64).ln()
}
