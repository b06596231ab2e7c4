//! Parsers for the comma-separated argument forms.

use std::str::FromStr;

use mrec_core::multfunc::{DirichletCharacter, MultFunction, Turn};
use mrec_core::multsys::{Arc, ArcSet, Real};
use mrec_core::recurrence::Quadruple;
use mrec_core::{expr, Error, Result};

fn bad(what: &str, text: &str) -> Error {
    Error::InvalidInput(format!("malformed {what} '{text}'"))
}

pub fn list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad(what, text)))
        .collect()
}

pub fn fixed<T: FromStr + Copy, const N: usize>(text: &str, what: &str) -> Result<[T; N]> {
    let v: Vec<T> = list(text, what)?;
    v.try_into()
        .map_err(|_| Error::InvalidInput(format!("{what} needs {N} comma-separated values, got '{text}'")))
}

pub fn quad(text: &str) -> Result<Quadruple> {
    let [a, b, c, d] = fixed::<i64, 4>(text, "quadruple a,b,c,d")?;
    if a < 1 || c < 1 {
        return Err(Error::InvalidInput(format!("quadruple '{text}' needs a, c ≥ 1")));
    }
    Quadruple::new(a as u64, b, c as u64, d)
}

pub fn function(text: &str) -> Result<MultFunction> {
    expr::parse_function(text)
}

/// `q,i1,i2,…` (a bare modulus is the principal character).
pub fn character(text: &str) -> Result<DirichletCharacter> {
    let v: Vec<u64> = list(text, "character q,index...")?;
    let (&q, index) = v.split_first().ok_or_else(|| bad("character", text))?;
    DirichletCharacter::new(q, index)
}

pub fn turn(text: &str) -> Result<Turn> {
    let (n, d) = text.trim().split_once('/').ok_or_else(|| bad("angle a/b", text))?;
    let n: i128 = n.trim().parse().map_err(|_| bad("angle a/b", text))?;
    let d: u64 = d.trim().parse().map_err(|_| bad("angle a/b", text))?;
    Turn::new(n, d)
}

/// `a/b` as an exact rational, otherwise a decimal.
pub fn real(text: &str) -> Result<Real> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad("rational", text))?;
        let d: i128 = d.trim().parse().map_err(|_| bad("rational", text))?;
        return Real::ratio(n, d);
    }
    if let Ok(i) = t.parse::<i128>() {
        return Real::ratio(i, 1);
    }
    t.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(Real::Float)
        .ok_or_else(|| bad("real", text))
}

/// `start:length` arcs joined by `+`, e.g. `0:1/8+1/2:1/8`.
pub fn arc_set(text: &str) -> Result<ArcSet> {
    let arcs = text
        .split('+')
        .map(|piece| {
            let (s, l) = piece.split_once(':').ok_or_else(|| bad("arc start:length", piece))?;
            Arc::new(real(s)?, real(l)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ArcSet::from_arcs(&arcs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(quad("6, 3,6,2").unwrap().to_string(), "6,3,6,2");
        assert!(quad("0,1,1,1").is_err());
        assert!(quad("1,2,3").is_err());
        assert_eq!(turn("2/6").unwrap(), Turn::new(1, 3).unwrap());
        assert_eq!(real("1/4").unwrap(), Real::ratio(1, 4).unwrap());
        assert_eq!(real("0.1").unwrap(), Real::Float(0.1));
        let s = arc_set("0:1/8+1/2:1/8").unwrap();
        assert_eq!(s.measure(), Real::ratio(1, 4).unwrap());
        assert!(character("4,1").unwrap().order() == 2);
    }
}
