//! Integer polynomials and rational functions in one variable, with a small
//! text syntax (`Y^3 + 2*Y - 1`, `(Y^2 + 1)/(Y - 3)`).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::{FieldElement, FiniteField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("SyntaxError({pos}): {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("MixedVariables({0}, {1})")]
    MixedVariables(String, String),
    #[error("Overflow: coefficient exceeds 64 bits")]
    Overflow,
}

/// Dense polynomial over `Z`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![0, 1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    fn checked_add(&self, other: &IntPoly) -> Result<IntPoly, PolyError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| self.coeff(i).checked_add(other.coeff(i)).ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(IntPoly::new)
    }

    fn checked_neg(&self) -> Result<IntPoly, PolyError> {
        self.coeffs
            .iter()
            .map(|c| c.checked_neg().ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(IntPoly::new)
    }

    fn checked_mul(&self, other: &IntPoly) -> Result<IntPoly, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(IntPoly::default());
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let t = a.checked_mul(b).ok_or(PolyError::Overflow)?;
                out[i + j] = out[i + j].checked_add(t).ok_or(PolyError::Overflow)?;
            }
        }
        Ok(IntPoly::new(out))
    }

    /// Coefficients reduced into `0..p`, trailing zeros removed.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .coeffs
            .iter()
            .map(|&c| crate::arith::reduce_i64(c, p))
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    /// Horner evaluation in `F`, coefficients mapped through `Z → F_p ⊂ F`.
    pub fn eval(&self, field: &FiniteField, x: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(field.zero(), |acc, &c| {
            field.add(field.mul(acc, x), field.from_int(c))
        })
    }

    /// Whether every monomial has odd degree.
    pub fn is_odd(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c == 0 || i % 2 == 1)
    }

    fn fmt_with(&self, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            first = false;
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "{var}")?,
                (1, m) => write!(f, "{m}*{var}")?,
                (k, 1) => write!(f, "{var}^{k}")?,
                (k, m) => write!(f, "{m}*{var}^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with("X", f)
    }
}

/// `num/den` over `Z`; no cancellation is attempted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    pub num: IntPoly,
    pub den: IntPoly,
}

impl RationalFunction {
    pub fn poly(num: IntPoly) -> Self {
        RationalFunction {
            num,
            den: IntPoly::constant(1),
        }
    }

    pub fn constant(c: i64) -> Self {
        Self::poly(IntPoly::constant(c))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0) && self.den.coeff(0).abs() == 1
    }

    /// The numerator as a polynomial when the denominator is `±1`.
    pub fn as_polynomial(&self) -> Option<IntPoly> {
        if !self.is_polynomial() {
            return None;
        }
        if self.den.coeff(0) == 1 {
            Some(self.num.clone())
        } else {
            self.num.checked_neg().ok()
        }
    }

    /// True when the denominator vanishes identically modulo `p`.
    pub fn degenerate_mod(&self, p: u64) -> bool {
        self.den.reduce_mod(p).is_empty()
    }

    /// `None` at a pole.
    pub fn eval(&self, field: &FiniteField, x: FieldElement) -> Option<FieldElement> {
        let den = self.den.eval(field, x);
        if den.is_zero() {
            return None;
        }
        field.div(self.num.eval(field, x), den)
    }

    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
            var: None,
        };
        let r = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.err("unexpected trailing input"));
        }
        Ok(r)
    }

    fn add(&self, o: &Self) -> Result<Self, PolyError> {
        if self.den == o.den {
            return Ok(RationalFunction {
                num: self.num.checked_add(&o.num)?,
                den: self.den.clone(),
            });
        }
        Ok(RationalFunction {
            num: self.num.checked_mul(&o.den)?.checked_add(&o.num.checked_mul(&self.den)?)?,
            den: self.den.checked_mul(&o.den)?,
        })
    }

    fn neg(&self) -> Result<Self, PolyError> {
        Ok(RationalFunction {
            num: self.num.checked_neg()?,
            den: self.den.clone(),
        })
    }

    fn mul(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(RationalFunction {
            num: self.num.checked_mul(&o.num)?,
            den: self.den.checked_mul(&o.den)?,
        })
    }

    fn div(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(RationalFunction {
            num: self.num.checked_mul(&o.den)?,
            den: self.den.checked_mul(&o.num)?,
        })
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_polynomial() {
            return p.fmt_with("Y", f);
        }
        write!(f, "(")?;
        self.num.fmt_with("Y", f)?;
        write!(f, ")/(")?;
        self.den.fmt_with("Y", f)?;
        write!(f, ")")
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        RationalFunction::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_poly(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses a polynomial; a non-trivial denominator is a syntax error.
pub fn parse_poly(text: &str) -> Result<IntPoly, PolyError> {
    RationalFunction::parse(text)?
        .as_polynomial()
        .ok_or(PolyError::Syntax {
            pos: 0,
            msg: "expected a polynomial".into(),
        })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: Option<String>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.into(),
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

    fn expr(&mut self) -> Result<RationalFunction, PolyError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.add(&rhs)? } else { acc.add(&rhs.neg()?)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, PolyError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' { acc.mul(&rhs)? } else { acc.div(&rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction, PolyError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return self.unary()?.neg();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let k = self.number()?;
        let mut acc = RationalFunction::constant(1);
        for _ in 0..k {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<i64, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::Overflow)
    }

    fn atom(&mut self) -> Result<RationalFunction, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(RationalFunction::constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                match &self.var {
                    Some(v) if *v != name => {
                        return Err(PolyError::MixedVariables(v.clone(), name));
                    }
                    _ => self.var = Some(name),
                }
                Ok(RationalFunction::poly(IntPoly::x()))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}
