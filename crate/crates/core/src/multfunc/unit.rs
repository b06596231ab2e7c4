use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;

use crate::{Error, Result};

/// A rational angle `num/den` in `[0, 1)`, standing for `e(num/den)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Turn {
    num: u64,
    den: u64,
}

impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };
    pub const HALF: Turn = Turn { num: 1, den: 2 };

    /// Reduces `num/den` modulo 1.
    pub fn new(num: i128, den: u64) -> Result<Turn> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be positive"));
        }
        Ok(Self::reduce(num.rem_euclid(den as i128) as u128, den as u128))
    }

    fn reduce(num: u128, den: u128) -> Turn {
        let g = num.gcd(&den);
        let (n, d) = (num / g, den / g);
        let d = u64::try_from(d).expect("angle denominator overflowed u64");
        Turn { num: n as u64, den: d }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn add(self, other: Turn) -> Turn {
        let (a, b, c, d) = (
            self.num as u128,
            self.den as u128,
            other.num as u128,
            other.den as u128,
        );
        let l = b / b.gcd(&d) * d;
        Self::reduce((a * (l / b) + c * (l / d)) % l, l)
    }

    pub fn neg(self) -> Turn {
        Self::reduce((self.den - self.num) as u128 % self.den as u128, self.den as u128)
    }

    pub fn sub(self, other: Turn) -> Turn {
        self.add(other.neg())
    }

    /// `k` times the angle, modulo 1.
    pub fn scale(self, k: i64) -> Turn {
        let n = (self.num as i128 * (k as i128).rem_euclid(self.den as i128))
            .rem_euclid(self.den as i128);
        Self::reduce(n as u128, self.den as u128)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist(self) -> Turn {
        if 2 * self.num as u128 <= self.den as u128 {
            self
        } else {
            self.neg()
        }
    }

    /// `|e(self) - 1| = 2 sin(π ‖self‖)`.
    pub fn chord(self) -> f64 {
        2.0 * (PI * self.dist().to_f64()).sin()
    }

    /// `e(self)`, exact at multiples of a quarter turn.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, TAU * self.to_f64()),
        }
    }
}

impl Ord for Turn {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Turn {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A value of a 1-bounded completely multiplicative function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnitValue {
    Exact(Turn),
    Float(Complex64),
    Zero,
}

impl UnitValue {
    pub const ONE: UnitValue = UnitValue::Exact(Turn::ZERO);
    pub const MINUS_ONE: UnitValue = UnitValue::Exact(Turn::HALF);

    /// `e(x)` on the floating path.
    pub fn from_turns(x: f64) -> UnitValue {
        UnitValue::Float(Complex64::from_polar(1.0, TAU * x))
    }

    pub fn mul(self, other: UnitValue) -> UnitValue {
        use UnitValue::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Exact(a), Exact(b)) => Exact(a.add(b)),
            (a, b) => Float(a.to_complex() * b.to_complex()),
        }
    }

    pub fn pow(self, k: i64) -> UnitValue {
        use UnitValue::*;
        match self {
            _ if k == 0 => UnitValue::ONE,
            Zero => Zero,
            Exact(t) => Exact(t.scale(k)),
            Float(z) => Float(z.powi(k as i32)),
        }
    }

    pub fn conj(self) -> UnitValue {
        use UnitValue::*;
        match self {
            Zero => Zero,
            Exact(t) => Exact(t.neg()),
            Float(z) => Float(z.conj()),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            UnitValue::Zero => Complex64::new(0.0, 0.0),
            UnitValue::Exact(t) => t.to_complex(),
            UnitValue::Float(z) => z,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, UnitValue::Zero)
    }

    pub fn is_exact(self) -> bool {
        matches!(self, UnitValue::Exact(_))
    }

    /// Angle in turns, in `[0, 1)`; `None` for zero.
    pub fn angle(self) -> Option<f64> {
        match self {
            UnitValue::Zero => None,
            UnitValue::Exact(t) => Some(t.to_f64()),
            UnitValue::Float(z) => Some((z.arg() / TAU).rem_euclid(1.0)),
        }
    }

    /// Equality: exact on the exact path, within `tol` otherwise.
    pub fn approx_eq(self, other: UnitValue, tol: f64) -> bool {
        match (self, other) {
            (UnitValue::Exact(a), UnitValue::Exact(b)) => a == b,
            (UnitValue::Zero, UnitValue::Zero) => true,
            (a, b) => (a.to_complex() - b.to_complex()).norm() <= tol,
        }
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitValue::Zero => write!(f, "0"),
            UnitValue::Exact(t) => write!(f, "e({t})"),
            UnitValue::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// `|u - v|`, kept exact (as the angular distance) when both are exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chord {
    /// Chord `2 sin(π δ)` for the stored `δ ∈ [0, 1/2]`.
    Exact(Turn),
    Approx(f64),
}

impl Chord {
    pub fn between(u: UnitValue, v: UnitValue) -> Chord {
        match (u, v) {
            (UnitValue::Exact(a), UnitValue::Exact(b)) => Chord::Exact(a.sub(b).dist()),
            (a, b) => Chord::Approx((a.to_complex() - b.to_complex()).norm()),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Chord::Exact(d) => d.chord(),
            Chord::Approx(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Chord::Exact(d) => d == Turn::ZERO,
            Chord::Approx(x) => x == 0.0,
        }
    }
}

impl PartialOrd for Chord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Chord::Exact(a), Chord::Exact(b)) => Some(a.cmp(b)),
            (a, b) => a.value().partial_cmp(&b.value()),
        }
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chord::Exact(d) => write!(f, "2sin(pi*{d})"),
            Chord::Approx(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: i128, d: u64) -> Turn {
        Turn::new(n, d).unwrap()
    }

    #[test]
    fn turn_arithmetic() {
        assert_eq!(t(1, 3).add(t(1, 2)), t(5, 6));
        assert_eq!(t(2, 3).add(t(1, 3)), Turn::ZERO);
        assert_eq!(t(-1, 4), t(3, 4));
        assert_eq!(t(1, 3).scale(-1), t(2, 3));
        assert_eq!(t(3, 4).dist(), t(1, 4));
        assert!(t(1, 5) < t(1, 4));
    }

    #[test]
    fn exact_products_stay_exact() {
        let a = UnitValue::Exact(t(1, 3));
        let b = UnitValue::Exact(t(1, 2));
        assert_eq!(a.mul(b), UnitValue::Exact(t(5, 6)));
        assert!(matches!(a.mul(UnitValue::from_turns(0.1)), UnitValue::Float(_)));
        assert_eq!(a.mul(UnitValue::Zero), UnitValue::Zero);
    }

    #[test]
    fn chord_exact_vs_float() {
        let c = Chord::between(UnitValue::ONE, UnitValue::MINUS_ONE);
        assert_eq!(c, Chord::Exact(Turn::HALF));
        assert!((c.value() - 2.0).abs() < 1e-15);
        let d = Chord::between(UnitValue::from_turns(0.0), UnitValue::from_turns(0.5));
        assert!((d.value() - 2.0).abs() < 1e-12);
    }
}
