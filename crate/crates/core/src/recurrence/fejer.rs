//! Cesàro means of the Fourier series of a tent approximating the indicator
//! of `[0, ε) ∪ (1 − ε, 1)` on the circle.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::{Error, Result};

/// Largest degree considered when searching for the minimal `R`.
pub const FEJER_R_BUDGET: u64 = 1 << 17;

const GRID: usize = 10_000;

/// The tent of half-width `ε` and height 1 centred at 0.
pub fn tent(eps: f64, x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    tent_at_distance(eps, y.min(1.0 - y))
}

fn tent_at_distance(eps: f64, d: f64) -> f64 {
    (1.0 - d / eps).max(0.0)
}

/// Distance from grid point `i/GRID` to the nearest integer, rounded once.
fn grid_distance(i: usize) -> f64 {
    i.min(GRID - i) as f64 / GRID as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FejerApprox {
    pub eps: f64,
    pub r: u64,
    /// `c_ℓ` for `0 ≤ ℓ < R`; `c_{−ℓ} = c_ℓ`.
    pub coefficients: Vec<f64>,
    /// Sup-norm error against the tent on the 10^4-point grid.
    pub grid_error: f64,
    /// Whether `grid_error < ε²` for this `R`.
    pub meets_bound: bool,
    /// Least `R` with grid error below `ε²`.
    pub minimal_r: u64,
}

/// Checks of the approximation on the grid `{i/10^4}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FejerGridCheck {
    /// `h_ε ≤ 1_{[0,ε)∪(1−ε,1)}` at every grid point.
    pub dominated: bool,
    /// Least value of the polynomial on the grid.
    pub min_polynomial: f64,
    /// `h_ε(x) ≥ ε² + Re Σ_{1≤|ℓ|<R} c_ℓ e(ℓx)` at every grid point.
    pub lower_bound_holds: bool,
    /// Least value of `h_ε(x) − ε² − Σ_{1≤|ℓ|<R} c_ℓ e(ℓx)`.
    pub lower_bound_margin: f64,
}

fn coefficient(eps: f64, r: u64, l: u64) -> f64 {
    if l == 0 {
        return eps;
    }
    let s = (PI * l as f64 * eps).sin();
    (1.0 - l as f64 / r as f64) * s * s / (PI * PI * (l * l) as f64 * eps)
}

fn coefficients(eps: f64, r: u64) -> Vec<f64> {
    (0..r).map(|l| coefficient(eps, r, l)).collect()
}

/// `cos(2π k/GRID)` for every residue `k`.
fn cosine_table() -> Vec<f64> {
    (0..GRID).map(|k| (TAU * k as f64 / GRID as f64).cos()).collect()
}

/// Values of `Σ_{|ℓ|<R} c_ℓ e(ℓ i/GRID)` for every grid index `i`.
fn grid_values(coeffs: &[f64], table: &[f64]) -> Vec<f64> {
    (0..GRID)
        .map(|i| {
            let mut s = coeffs[0];
            for (l, c) in coeffs.iter().enumerate().skip(1) {
                s += 2.0 * c * table[(l * i) % GRID];
            }
            s
        })
        .collect()
}

fn grid_error(eps: f64, r: u64, table: &[f64]) -> f64 {
    grid_values(&coefficients(eps, r), table)
        .iter()
        .enumerate()
        .map(|(i, v)| (tent_at_distance(eps, grid_distance(i)) - v).abs())
        .fold(0.0, f64::max)
}

/// Coefficients of degree `< R`, with the least `R` meeting the `ε²` bound.
pub fn fejer(eps: f64, r: u64) -> Result<FejerApprox> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::invalid(format!("ε must lie in (0, 1/4), got {eps}")));
    }
    if r == 0 || r > FEJER_R_BUDGET {
        return Err(Error::range("FEJER_R_BUDGET=2^17", format!("R = {r}")));
    }
    let table = cosine_table();
    let bound = eps * eps;
    let passes = |r: u64| grid_error(eps, r, &table) < bound;
    let mut hi = 1;
    while !passes(hi) {
        hi *= 2;
        if hi > FEJER_R_BUDGET {
            return Err(Error::range(
                "FEJER_R_BUDGET=2^17",
                format!("no R up to the budget meets the ε² bound for ε = {eps}"),
            ));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Bisection assumes monotone errors; step down while smaller R also pass.
    while hi > 1 && passes(hi - 1) {
        hi -= 1;
    }
    let err = grid_error(eps, r, &table);
    Ok(FejerApprox {
        eps,
        r,
        coefficients: coefficients(eps, r),
        grid_error: err,
        meets_bound: err < bound,
        minimal_r: hi,
    })
}

impl FejerApprox {
    /// `Σ_{|ℓ|<R} c_ℓ e(ℓx)`, real by symmetry.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = self.coefficients[0];
        for (l, c) in self.coefficients.iter().enumerate().skip(1) {
            s += 2.0 * c * (TAU * l as f64 * x).cos();
        }
        s
    }

    pub fn tent(&self, x: f64) -> f64 {
        tent(self.eps, x)
    }

    pub fn check_grid(&self) -> FejerGridCheck {
        let values = grid_values(&self.coefficients, &cosine_table());
        let eps = self.eps;
        let mut out = FejerGridCheck {
            dominated: true,
            min_polynomial: f64::INFINITY,
            lower_bound_holds: true,
            lower_bound_margin: f64::INFINITY,
        };
        for (i, &v) in values.iter().enumerate() {
            let d = grid_distance(i);
            let h = tent_at_distance(eps, d);
            let indicator = if d < eps { 1.0 } else { 0.0 };
            out.dominated &= h <= indicator;
            out.min_polynomial = out.min_polynomial.min(v);
            let margin = h - eps * eps - (v - self.coefficients[0]);
            out.lower_bound_margin = out.lower_bound_margin.min(margin);
        }
        out.lower_bound_holds = out.lower_bound_margin >= 0.0;
        out
    }
}
