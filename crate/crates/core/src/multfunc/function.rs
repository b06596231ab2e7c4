use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::character::DirichletCharacter;
use super::unit::{Chord, Turn, UnitValue};
use crate::numkernel::{factorize, is_prime, ARG_MAX};
use crate::{Error, Result};

/// A function with prescribed values on finitely many primes, following
/// `base` elsewhere.
#[derive(Clone, Debug)]
pub struct ModifiedFunction {
    base: MultFunction,
    overrides: BTreeMap<u64, Turn>,
}

impl ModifiedFunction {
    pub fn base(&self) -> &MultFunction {
        &self.base
    }

    pub fn overrides(&self) -> &BTreeMap<u64, Turn> {
        &self.overrides
    }
}

/// A 1-bounded completely multiplicative function, given by its prime values.
#[derive(Clone, Debug)]
pub enum MultFunction {
    One,
    Liouville,
    Character(Arc<DirichletCharacter>),
    Modified(Arc<ModifiedFunction>),
    /// `n ↦ n^{it}`.
    Twist(f64),
    /// Prime values are pseudo-random `order`-th roots of unity keyed by `seed`.
    Roots { order: u64, seed: u64 },
    Product(Arc<MultFunction>, Arc<MultFunction>),
    Power(Arc<MultFunction>, i64),
    Conjugate(Arc<MultFunction>),
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl MultFunction {
    pub fn character(chi: DirichletCharacter) -> MultFunction {
        MultFunction::Character(Arc::new(chi))
    }

    pub fn product(f: MultFunction, g: MultFunction) -> MultFunction {
        MultFunction::Product(Arc::new(f), Arc::new(g))
    }

    pub fn power(f: MultFunction, l: i64) -> MultFunction {
        MultFunction::Power(Arc::new(f), l)
    }

    pub fn conjugate(f: MultFunction) -> MultFunction {
        MultFunction::Conjugate(Arc::new(f))
    }

    pub fn archimedean_twist(t: f64) -> Result<MultFunction> {
        if !t.is_finite() {
            return Err(Error::invalid(format!("twist parameter {t} is not finite")));
        }
        Ok(MultFunction::Twist(t))
    }

    pub fn roots(order: u64, seed: u64) -> Result<MultFunction> {
        if order == 0 {
            return Err(Error::invalid("roots order must be positive"));
        }
        Ok(MultFunction::Roots { order, seed })
    }

    /// Overrides the prime values of `base`, without requiring the result to
    /// lie in 𝓜.
    pub fn modify_partial(base: MultFunction, overrides: BTreeMap<u64, Turn>) -> Result<MultFunction> {
        if let Some(&p) = overrides.keys().find(|&&p| !is_prime(p)) {
            return Err(Error::invalid(format!("override key {p} is not prime")));
        }
        Ok(MultFunction::Modified(Arc::new(ModifiedFunction { base, overrides })))
    }

    /// Overrides prime values of a character; every prime dividing the
    /// modulus must be overridden so the result is unimodular.
    pub fn modify(base: DirichletCharacter, overrides: BTreeMap<u64, Turn>) -> Result<MultFunction> {
        if let Some(p) = base.zero_primes().into_iter().find(|p| !overrides.contains_key(p)) {
            return Err(Error::invalid(format!(
                "prime {p} divides the modulus {} but has no override",
                base.modulus()
            )));
        }
        Self::modify_partial(MultFunction::character(base), overrides)
    }

    /// Primes at which the function vanishes.
    pub fn zero_primes(&self) -> Vec<u64> {
        use MultFunction::*;
        let mut out = match self {
            One | Liouville | Twist(_) | Roots { .. } => vec![],
            Character(chi) => chi.zero_primes(),
            Modified(m) => m
                .base
                .zero_primes()
                .into_iter()
                .filter(|p| !m.overrides.contains_key(p))
                .collect(),
            Product(f, g) => {
                let mut v = f.zero_primes();
                v.extend(g.zero_primes());
                v
            }
            Power(_, 0) => vec![],
            Power(f, _) | Conjugate(f) => f.zero_primes(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Membership in 𝓜: no prime value is zero.
    pub fn in_m(&self) -> bool {
        self.zero_primes().is_empty()
    }

    /// True when every value is an exact root of unity (or zero).
    pub fn is_exact(&self) -> bool {
        use MultFunction::*;
        match self {
            One | Liouville | Character(_) | Roots { .. } => true,
            Twist(_) => false,
            Modified(m) => m.base.is_exact(),
            Product(f, g) => f.is_exact() && g.is_exact(),
            Power(f, _) | Conjugate(f) => f.is_exact(),
        }
    }

    /// True when `f(p)` takes finitely many values as `p` ranges over primes.
    pub fn is_finitely_generated(&self) -> bool {
        use MultFunction::*;
        match self {
            One | Liouville | Character(_) | Roots { .. } => true,
            Twist(t) => *t == 0.0,
            Modified(m) => m.base.is_finitely_generated(),
            Product(f, g) => f.is_finitely_generated() && g.is_finitely_generated(),
            Power(f, _) | Conjugate(f) => f.is_finitely_generated(),
        }
    }

    pub fn eval(&self, n: u64) -> Result<UnitValue> {
        if n == 0 {
            return Err(Error::invalid("functions are evaluated at positive integers"));
        }
        if n > ARG_MAX {
            return Err(Error::range("ARG_MAX=2^63", format!("argument {n}")));
        }
        Ok(self.eval_unchecked(n))
    }

    /// Evaluation at a signed argument that must be positive.
    pub fn eval_signed(&self, n: i128) -> Result<UnitValue> {
        if n <= 0 {
            return Err(Error::range("positive arguments", format!("argument {n}")));
        }
        if n > ARG_MAX as i128 {
            return Err(Error::range("ARG_MAX=2^63", format!("argument {n}")));
        }
        Ok(self.eval_unchecked(n as u64))
    }

    /// Evaluation for `1 ≤ n ≤ 2^63`, which the caller guarantees.
    pub(crate) fn eval_unchecked(&self, n: u64) -> UnitValue {
        if self.direct() {
            self.eval_direct(n)
        } else {
            let mut entries = Vec::new();
            crate::numkernel::factor_into(n, &mut entries);
            self.eval_entries(n, &entries)
        }
    }

    /// Evaluation from a known factorization of `n`.
    pub fn eval_factored(&self, entries: &[(u64, u32)]) -> UnitValue {
        let n = entries
            .iter()
            .try_fold(1u64, |acc, &(p, e)| p.checked_pow(e).and_then(|pe| acc.checked_mul(pe)));
        match n {
            Some(n) if n <= ARG_MAX => self.eval_entries(n, entries),
            _ => entries.iter().fold(UnitValue::ONE, |acc, &(p, e)| {
                acc.mul(self.prime_value(p).pow(e as i64))
            }),
        }
    }

    pub fn prime_value(&self, p: u64) -> UnitValue {
        self.eval_entries(p, &[(p, 1)])
    }

    /// Kinds evaluable without factoring the argument.
    fn direct(&self) -> bool {
        use MultFunction::*;
        match self {
            One | Character(_) | Twist(_) => true,
            Liouville | Roots { .. } => false,
            Modified(m) => m.base.direct(),
            Product(f, g) => f.direct() && g.direct(),
            Power(f, _) | Conjugate(f) => f.direct(),
        }
    }

    fn eval_direct(&self, n: u64) -> UnitValue {
        use MultFunction::*;
        match self {
            One => UnitValue::ONE,
            Character(chi) => chi.value(n),
            Twist(t) => UnitValue::Float(Complex64::from_polar(1.0, t * (n as f64).ln())),
            Modified(m) => {
                let mut rest = n;
                let mut acc = UnitValue::ONE;
                for (&p, &v) in &m.overrides {
                    let mut e = 0i64;
                    while rest % p == 0 {
                        rest /= p;
                        e += 1;
                    }
                    if e > 0 {
                        acc = acc.mul(UnitValue::Exact(v.scale(e)));
                    }
                }
                acc.mul(m.base.eval_direct(rest))
            }
            Product(f, g) => f.eval_direct(n).mul(g.eval_direct(n)),
            Power(f, l) => f.eval_direct(n).pow(*l),
            Conjugate(f) => f.eval_direct(n).conj(),
            Liouville | Roots { .. } => unreachable!("not a direct kind"),
        }
    }

    fn eval_entries(&self, n: u64, entries: &[(u64, u32)]) -> UnitValue {
        use MultFunction::*;
        match self {
            One | Character(_) | Twist(_) => self.eval_direct(n),
            Liouville => {
                let omega: u32 = entries.iter().map(|&(_, e)| e).sum();
                if omega % 2 == 0 {
                    UnitValue::ONE
                } else {
                    UnitValue::MINUS_ONE
                }
            }
            Roots { order, seed } => {
                let mut acc = 0u128;
                for &(p, e) in entries {
                    let h = splitmix(p ^ splitmix(*seed)) % order;
                    acc = (acc + h as u128 * e as u128) % *order as u128;
                }
                UnitValue::Exact(Turn::new(acc as i128, *order).expect("order > 0"))
            }
            Modified(m) => {
                if m.base.direct() {
                    return self.eval_direct(n);
                }
                let mut rest = n;
                let mut acc = UnitValue::ONE;
                let mut kept = Vec::with_capacity(entries.len());
                for &(p, e) in entries {
                    match m.overrides.get(&p) {
                        Some(v) => {
                            acc = acc.mul(UnitValue::Exact(v.scale(e as i64)));
                            rest /= p.pow(e);
                        }
                        None => kept.push((p, e)),
                    }
                }
                acc.mul(m.base.eval_entries(rest, &kept))
            }
            Product(f, g) => f.eval_entries(n, entries).mul(g.eval_entries(n, entries)),
            Power(f, l) => f.eval_entries(n, entries).pow(*l),
            Conjugate(f) => f.eval_entries(n, entries).conj(),
        }
    }
}

/// Result of locating the `ℓ`-th root of unity closest to a unit value.
#[derive(Clone, Copy, Debug)]
pub struct NearestRoot {
    pub j: u64,
    /// `|a − e(j/ℓ)|`.
    pub distance: Chord,
    /// `(π/(2ℓ))·|a^ℓ − 1|`.
    pub bound: f64,
    pub holds: bool,
}

/// The `j` minimising `|a − e(j/ℓ)|`, with the bound `|a − e(j/ℓ)| ≤ (π/2ℓ)|a^ℓ − 1|`.
pub fn nearest_root(a: UnitValue, l: u64) -> Result<NearestRoot> {
    if l == 0 {
        return Err(Error::invalid("root order must be positive"));
    }
    let j = match a {
        UnitValue::Zero => return Err(Error::invalid("nearest_root needs a unit value")),
        UnitValue::Exact(t) => {
            let (num, den) = (t.num() as u128, t.den() as u128);
            ((2 * num * l as u128 + den) / (2 * den)) as u64 % l
        }
        UnitValue::Float(z) => {
            if (z.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("|a| = {} is not 1", z.norm())));
            }
            (a.angle().expect("unit") * l as f64).round() as u64 % l
        }
    };
    let root = UnitValue::Exact(Turn::new(j as i128, l)?);
    let distance = Chord::between(a, root);
    let lhs = (a.pow(l as i64).to_complex() - Complex64::new(1.0, 0.0)).norm();
    let bound = PI / (2.0 * l as f64) * lhs;
    let holds = distance.value() <= bound * (1.0 + 1e-12) + 1e-15;
    Ok(NearestRoot {
        j,
        distance,
        bound,
        holds,
    })
}

/// Convenience: `factorize` then evaluate (used where the factorization is
/// needed anyway).
pub fn eval_with_factorization(f: &MultFunction, n: u64) -> Result<UnitValue> {
    Ok(f.eval_factored(factorize(n)?.entries()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chi4() -> DirichletCharacter {
        DirichletCharacter::new(4, &[1]).unwrap()
    }

    fn turn(n: i128, d: u64) -> Turn {
        Turn::new(n, d).unwrap()
    }

    fn overrides(pairs: &[(u64, Turn)]) -> BTreeMap<u64, Turn> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(MultFunction::Liouville.eval(60).unwrap(), UnitValue::ONE);
        assert_eq!(MultFunction::character(chi4()).eval(6).unwrap(), UnitValue::Zero);
        let m = MultFunction::modify(chi4(), overrides(&[(2, turn(1, 3))])).unwrap();
        assert_eq!(m.eval(6).unwrap(), UnitValue::Exact(turn(5, 6)));
        assert!(m.in_m());
    }

    #[test]
    fn modify_requires_coverage() {
        assert!(MultFunction::modify(chi4(), BTreeMap::new()).is_err());
        assert!(MultFunction::modify_partial(MultFunction::One, overrides(&[(4, Turn::ZERO)])).is_err());
        let trivial = DirichletCharacter::new(1, &[]).unwrap();
        let f = MultFunction::modify(trivial, BTreeMap::new()).unwrap();
        assert_eq!(f.eval(97).unwrap(), UnitValue::ONE);
        let g = MultFunction::modify(chi4(), overrides(&[(2, Turn::ZERO)])).unwrap();
        assert_eq!(g.eval(2).unwrap(), UnitValue::ONE);
        assert_eq!(g.eval(3).unwrap(), UnitValue::MINUS_ONE);
    }

    #[test]
    fn algebra_examples() {
        let l2 = MultFunction::power(MultFunction::Liouville, 2);
        for n in 1..200 {
            assert_eq!(l2.eval(n).unwrap(), UnitValue::ONE);
        }
        let tw = MultFunction::archimedean_twist(1.5).unwrap();
        let c = MultFunction::conjugate(tw);
        let v = c.eval(10).unwrap().to_complex();
        let expect = Complex64::from_polar(1.0, -1.5 * 10f64.ln());
        assert!((v - expect).norm() < 1e-12);
        let p = MultFunction::product(MultFunction::character(chi4()), MultFunction::Liouville);
        assert_eq!(p.eval(15).unwrap(), UnitValue::MINUS_ONE);
        assert!(MultFunction::Liouville.eval(0).is_err());
        assert!(MultFunction::Liouville.eval(ARG_MAX + 1).is_err());
    }

    #[test]
    fn nearest_root_examples() {
        let r = nearest_root(UnitValue::Exact(turn(1, 3)), 3).unwrap();
        assert_eq!(r.j, 1);
        assert!(r.distance.is_zero() && r.holds);
        let r = nearest_root(UnitValue::from_turns(0.3), 2).unwrap();
        assert_eq!(r.j, 1);
        assert!(r.holds);
        let r = nearest_root(UnitValue::from_turns(0.49), 1).unwrap();
        assert_eq!(r.j, 0);
        assert!(r.holds);
    }

    fn battery() -> Vec<MultFunction> {
        let chi = DirichletCharacter::new(45, &[2, 1]).unwrap();
        vec![
            MultFunction::One,
            MultFunction::Liouville,
            MultFunction::character(chi4()),
            MultFunction::character(chi.clone()),
            MultFunction::modify(chi, overrides(&[(3, turn(1, 7)), (5, turn(2, 5))])).unwrap(),
            MultFunction::Twist(0.7),
            MultFunction::Roots { order: 6, seed: 11 },
            MultFunction::product(
                MultFunction::Liouville,
                MultFunction::power(MultFunction::Roots { order: 5, seed: 2 }, 3),
            ),
            MultFunction::conjugate(MultFunction::product(
                MultFunction::Twist(-2.0),
                MultFunction::character(chi4()),
            )),
            MultFunction::modify_partial(MultFunction::Liouville, overrides(&[(2, turn(1, 3))])).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn complete_multiplicativity(m in 1u64..=1_000_000, n in 1u64..=1_000_000) {
            for f in battery() {
                let lhs = f.eval(m * n).unwrap();
                let rhs = f.eval(m).unwrap().mul(f.eval(n).unwrap());
                if f.is_exact() {
                    prop_assert_eq!(lhs, rhs);
                } else {
                    prop_assert!(lhs.approx_eq(rhs, 1e-10));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn character_periodicity(q in 1u64..200, n in 1u64..1_000_000_000, seed in any::<u64>()) {
            let ranges = crate::multfunc::index_ranges(q).unwrap();
            let idx: Vec<u64> = ranges.iter().enumerate()
                .map(|(i, &r)| splitmix(seed ^ i as u64) % r).collect();
            let chi = DirichletCharacter::new(q, &idx).unwrap();
            prop_assert_eq!(chi.value(n), chi.value(n % q));
        }

        #[test]
        fn factored_matches_direct(n in 1u64..=u32::MAX as u64) {
            for f in battery() {
                let a = f.eval(n).unwrap();
                let b = eval_with_factorization(&f, n).unwrap();
                prop_assert!(a.approx_eq(b, 1e-10));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100_000))]
        #[test]
        fn nearest_root_inequality(x in 0.0f64..1.0, l in 1u64..=12) {
            let r = nearest_root(UnitValue::from_turns(x), l).unwrap();
            prop_assert!(r.holds, "x={x} l={l} dist={} bound={}", r.distance.value(), r.bound);
            for k in 0..l {
                let other = UnitValue::from_turns(k as f64 / l as f64);
                prop_assert!(r.distance.value() <= Chord::between(UnitValue::from_turns(x), other).value() + 1e-12);
            }
        }
    }

    #[test]
    fn cyclic_value_set_gap() {
        use crate::multfunc::cyclic_character;
        for (p, u) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (5, 2), (3, 3)] {
            let chi = cyclic_character(p, u).unwrap();
            let q = chi.modulus();
            let phi = q / p * (p - 1);
            let mut vals: Vec<Turn> = (1..q)
                .filter_map(|n| match chi.value(n) {
                    UnitValue::Exact(t) => Some(t),
                    _ => None,
                })
                .collect();
            vals.sort();
            vals.dedup();
            assert_eq!(vals.len() as u64, phi);
            let mut min = Turn::HALF;
            for (i, a) in vals.iter().enumerate() {
                for b in &vals[i + 1..] {
                    min = min.min(a.sub(*b).dist());
                }
            }
            assert_eq!(min, turn(1, phi));
        }
    }
}
