//! A small grammar naming multiplicative functions.
//!
//! ```text
//! expr  := "one" | "liouville"
//!        | "char(" q ("," index)* ")"      -- char(q) is principal
//!        | "cyclic(" p "," u ")"
//!        | "roots(" k "," seed ")"
//!        | "twist(" real ")"
//!        | "modify(" expr ",{" (prime ":" angle ("," prime ":" angle)*)? "})"
//!        | "pow(" expr "," integer ")" | "conj(" expr ")" | "mul(" expr "," expr ")"
//! angle := integer "/" positive      -- e(a/b)
//! ```
//!
//! Whitespace between tokens is ignored. Diagnostics carry byte offsets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::multfunc::{cyclic_character, DirichletCharacter, MultFunction, Turn};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionExpr {
    One,
    Liouville,
    Char { modulus: u64, index: Vec<u64> },
    Cyclic { prime: u64, exponent: u32 },
    Roots { order: u64, seed: u64 },
    Twist(f64),
    Modify(Box<FunctionExpr>, BTreeMap<u64, Turn>),
    Pow(Box<FunctionExpr>, i64),
    Conj(Box<FunctionExpr>),
    Mul(Box<FunctionExpr>, Box<FunctionExpr>),
}

impl FunctionExpr {
    /// Builds the function the expression names.
    pub fn build(&self) -> Result<MultFunction> {
        use FunctionExpr::*;
        Ok(match self {
            One => MultFunction::One,
            Liouville => MultFunction::Liouville,
            Char { modulus, index } => MultFunction::character(DirichletCharacter::new(*modulus, index)?),
            Cyclic { prime, exponent } => MultFunction::character(cyclic_character(*prime, *exponent)?),
            Roots { order, seed } => MultFunction::roots(*order, *seed)?,
            Twist(t) => MultFunction::archimedean_twist(*t)?,
            Modify(base, overrides) => MultFunction::modify_partial(base.build()?, overrides.clone())?,
            Pow(f, l) => MultFunction::power(f.build()?, *l),
            Conj(f) => MultFunction::conjugate(f.build()?),
            Mul(f, g) => MultFunction::product(f.build()?, g.build()?),
        })
    }

    /// The expression of an existing function.
    pub fn of(f: &MultFunction) -> FunctionExpr {
        use FunctionExpr as E;
        match f {
            MultFunction::One => E::One,
            MultFunction::Liouville => E::Liouville,
            MultFunction::Character(chi) => E::Char {
                modulus: chi.modulus(),
                index: chi.index().to_vec(),
            },
            MultFunction::Modified(m) => E::Modify(Box::new(E::of(m.base())), m.overrides().clone()),
            MultFunction::Twist(t) => E::Twist(*t),
            MultFunction::Roots { order, seed } => E::Roots {
                order: *order,
                seed: *seed,
            },
            MultFunction::Product(f, g) => E::Mul(Box::new(E::of(f)), Box::new(E::of(g))),
            MultFunction::Power(f, l) => E::Pow(Box::new(E::of(f)), *l),
            MultFunction::Conjugate(f) => E::Conj(Box::new(E::of(f))),
        }
    }
}

/// Canonical text of a function.
pub fn describe(f: &MultFunction) -> String {
    FunctionExpr::of(f).to_string()
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FunctionExpr::*;
        match self {
            One => write!(f, "one"),
            Liouville => write!(f, "liouville"),
            Char { modulus, index } => {
                write!(f, "char({modulus}")?;
                for i in index {
                    write!(f, ",{i}")?;
                }
                write!(f, ")")
            }
            Cyclic { prime, exponent } => write!(f, "cyclic({prime},{exponent})"),
            Roots { order, seed } => write!(f, "roots({order},{seed})"),
            Twist(t) => write!(f, "twist({t:?})"),
            Modify(base, overrides) => {
                write!(f, "modify({base},{{")?;
                for (k, (p, a)) in overrides.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}:{a}")?;
                }
                write!(f, "}})")
            }
            Pow(e, l) => write!(f, "pow({e},{l})"),
            Conj(e) => write!(f, "conj({e})"),
            Mul(a, b) => write!(f, "mul({a},{b})"),
        }
    }
}

impl FromStr for FunctionExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<FunctionExpr> {
        parse_function_expr(s)
    }
}

pub fn parse_function_expr(text: &str) -> Result<FunctionExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and builds in one step.
pub fn parse_function(text: &str) -> Result<MultFunction> {
    parse_function_expr(text)?.build()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected '{}', found '{}'", c as char, x as char))),
            None => Err(self.error(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(usize, &str)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a function name"));
        }
        // ASCII alphanumerics only, so this slice is valid UTF-8.
        Ok((start, std::str::from_utf8(&self.src[start..self.pos]).unwrap()))
    }

    /// A numeric token: sign, digits, and for reals `.`, `e`, `+`, `-`.
    fn number_token(&mut self, real: bool) -> (usize, &str) {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while let Some(&c) = self.src.get(self.pos) {
            let ok = c.is_ascii_digit()
                || (real && (c == b'.' || c == b'e' || c == b'E'))
                || (real && (c == b'-' || c == b'+') && matches!(self.src[self.pos - 1], b'e' | b'E'));
            if !ok {
                break;
            }
            self.pos += 1;
        }
        (start, std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn integer<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let (start, tok) = self.number_token(false);
        let tok = tok.to_string();
        if tok.is_empty() {
            return Err(self.error_at(start, format!("expected {what}")));
        }
        tok.parse()
            .map_err(|_| self.error_at(start, format!("malformed {what} '{tok}'")))
    }

    fn real(&mut self) -> Result<f64> {
        let (start, tok) = self.number_token(true);
        let tok = tok.to_string();
        if tok.is_empty() {
            // `inf` and `NaN` are words, not numbers, and are rejected here.
            return Err(self.error_at(start, "expected a real number"));
        }
        tok.parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or_else(|| self.error_at(start, format!("malformed real '{tok}'")))
    }

    fn angle(&mut self) -> Result<Turn> {
        self.skip_ws();
        let start = self.pos;
        let num: i128 = self
            .integer("angle numerator")
            .map_err(|_| self.error_at(start, "malformed angle: expected a/b"))?;
        if !self.eat(b'/') {
            return Err(self.error_at(start, "malformed angle: expected a/b"));
        }
        let den: u64 = self
            .integer("angle denominator")
            .map_err(|_| self.error_at(start, "malformed angle: expected a/b"))?;
        Turn::new(num, den).map_err(|_| self.error_at(start, "malformed angle: zero denominator"))
    }

    fn expr(&mut self) -> Result<FunctionExpr> {
        use FunctionExpr::*;
        let (start, name) = self.ident()?;
        let name = name.to_string();
        let e = match name.as_str() {
            "one" => One,
            "liouville" => Liouville,
            "char" => {
                self.expect(b'(')?;
                let modulus = self.integer("modulus")?;
                let mut index = Vec::new();
                while self.eat(b',') {
                    index.push(self.integer("character index")?);
                }
                self.expect(b')')?;
                Char { modulus, index }
            }
            "cyclic" => {
                self.expect(b'(')?;
                let prime = self.integer("prime")?;
                self.expect(b',')?;
                let exponent = self.integer("exponent")?;
                self.expect(b')')?;
                Cyclic { prime, exponent }
            }
            "roots" => {
                self.expect(b'(')?;
                let order = self.integer("order")?;
                self.expect(b',')?;
                let seed = self.integer("seed")?;
                self.expect(b')')?;
                Roots { order, seed }
            }
            "twist" => {
                self.expect(b'(')?;
                let t = self.real()?;
                self.expect(b')')?;
                Twist(t)
            }
            "modify" => {
                self.expect(b'(')?;
                let base = self.expr()?;
                self.expect(b',')?;
                self.expect(b'{')?;
                let mut overrides = BTreeMap::new();
                if !self.eat(b'}') {
                    loop {
                        self.skip_ws();
                        let at = self.pos;
                        let p: u64 = self.integer("prime")?;
                        self.expect(b':')?;
                        let a = self.angle()?;
                        if overrides.insert(p, a).is_some() {
                            return Err(self.error_at(at, format!("prime {p} overridden twice")));
                        }
                        if self.eat(b'}') {
                            break;
                        }
                        self.expect(b',')?;
                    }
                }
                self.expect(b')')?;
                Modify(Box::new(base), overrides)
            }
            "pow" => {
                self.expect(b'(')?;
                let base = self.expr()?;
                self.expect(b',')?;
                let l = self.integer("exponent")?;
                self.expect(b')')?;
                Pow(Box::new(base), l)
            }
            "conj" => {
                self.expect(b'(')?;
                let base = self.expr()?;
                self.expect(b')')?;
                Conj(Box::new(base))
            }
            "mul" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Mul(Box::new(a), Box::new(b))
            }
            _ => return Err(self.error_at(start, format!("unknown name '{name}'"))),
        };
        Ok(e)
    }
}
