//! Text syntax for operators: parsing and canonical printing.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' nat]
//! atom   := '(' expr ')' | rational | generator
//! rational  := nat ['/' nat]
//! generator := ('x' | 'd' | '∂' | 's') index      index in 1..=n
//! ```
//!
//! `d`/`∂` name the operator generators of the (q-)Weyl algebras, `s` those of
//! the shift algebra; the letter must match the algebra being parsed.
//! Products are read left to right and normalized immediately, so `d1*x1`
//! parses to the normal form `x1*d1+1`.
//!
//! [`print_canonical`] renders an operator deterministically: terms sorted by
//! total degree, then lexicographically on the exponent vector
//! `(x1, .., xn, d1, .., dn)`, both descending; `^` omitted for exponent 1;
//! unit coefficients omitted; rationals printed as `p/q`.

use crate::arith::{cmp_mono, MonomialOrder, Rational};
use crate::ore::{AlgebraKind, AlgebraSpec, OrePoly};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Parse failure: a message and the byte offset in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    chars: Vec<char>,
    offsets: Vec<usize>,
    pos: usize,
    algebra: &'a AlgebraSpec,
}

impl<'a> Parser<'a> {
    fn new(input: &str, algebra: &'a AlgebraSpec) -> Self {
        let mut chars = Vec::new();
        let mut offsets = Vec::new();
        for (o, c) in input.char_indices() {
            chars.push(c);
            offsets.push(o);
        }
        Parser { chars, offsets, pos: 0, algebra }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let position = self
            .offsets
            .get(self.pos)
            .copied()
            .unwrap_or_else(|| self.offsets.last().map_or(0, |o| o + 1));
        Err(ParseError { message: message.into(), position })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse::<BigInt>().expect("digits parse as an integer"))
    }

    fn expr(&mut self) -> Result<OrePoly, ParseError> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            let _ = self.eat('+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<OrePoly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = acc.multiply(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OrePoly, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.natural()?;
            let e: u32 = match e.try_into() {
                Ok(v) => v,
                Err(_) => return self.err("exponent too large"),
            };
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<OrePoly, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.natural()?;
                let den = if self.eat('/') {
                    let d = self.natural()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    d
                } else {
                    BigInt::one()
                };
                Ok(OrePoly::constant(self.algebra, Rational::new(num, den)))
            }
            Some(c) if c == 'x' || c == 'd' || c == 's' || c == '∂' => {
                self.bump();
                let idx = self.natural()?;
                let idx: usize = match idx.try_into() {
                    Ok(v) => v,
                    Err(_) => return self.err("generator index too large"),
                };
                if idx < 1 || idx > self.algebra.n {
                    return self.err(format!(
                        "generator index {} out of range 1..={}",
                        idx, self.algebra.n
                    ));
                }
                let i = idx - 1;
                match c {
                    'x' => Ok(OrePoly::x(self.algebra, i)),
                    'd' | '∂' => {
                        if self.algebra.kind == AlgebraKind::Shift {
                            self.err("the shift algebra uses generators s1.., not d1..")
                        } else {
                            Ok(OrePoly::d(self.algebra, i))
                        }
                    }
                    's' => {
                        if self.algebra.kind == AlgebraKind::Shift {
                            Ok(OrePoly::d(self.algebra, i))
                        } else {
                            self.err("s-generators only exist in the shift algebra")
                        }
                    }
                    _ => unreachable!(),
                }
            }
            Some(c) => self.err(format!("unexpected character '{}'", c)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an operator expression over the given algebra into normal form.
pub fn parse(input: &str, algebra: &AlgebraSpec) -> Result<OrePoly, ParseError> {
    let mut p = Parser::new(input, algebra);
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

fn coeff_string(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical rendering of a normal-form operator (see the module docs for the
/// term order and formatting rules).
pub fn print_canonical(p: &OrePoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let n = p.n();
    let op = p.algebra().op_symbol();
    let mut items: Vec<(Vec<u32>, Rational)> =
        p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    items.sort_by(|(a, _), (b, _)| cmp_mono(b, a, MonomialOrder::DegLex));
    let mut out = String::new();
    for (k, (mono, c)) in items.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push('-');
        } else {
            out.push('+');
        }
        let mut parts: Vec<String> = Vec::new();
        let is_const = mono.iter().all(|&e| e == 0);
        if !mag.is_one() || is_const {
            parts.push(coeff_string(&mag));
        }
        for (i, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if i < n {
                format!("x{}", i + 1)
            } else {
                format!("{}{}", op, i - n + 1)
            };
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{}^{}", name, e));
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratq};

    #[test]
    fn parse_and_normalize() {
        let alg = AlgebraSpec::weyl(1);
        let p = parse("d1*x1", &alg).unwrap();
        assert_eq!(print_canonical(&p), "x1*d1+1");
    }

    #[test]
    fn parse_rationals_and_powers() {
        let alg = AlgebraSpec::weyl(2);
        let p = parse("1/2*x1^2*d2 - 3*x2 + 4", &alg).unwrap();
        assert_eq!(print_canonical(&p), "1/2*x1^2*d2-3*x2+4");
    }

    #[test]
    fn parse_parentheses_and_unary_minus() {
        let alg = AlgebraSpec::weyl(1);
        let p = parse("-(x1+1)*(d1-2)", &alg).unwrap();
        let q = parse("x1+1", &alg)
            .unwrap()
            .multiply(&parse("d1-2", &alg).unwrap())
            .neg();
        assert_eq!(p, q);
    }

    #[test]
    fn parse_partial_symbol_alias() {
        let alg = AlgebraSpec::weyl(1);
        assert_eq!(parse("∂1", &alg).unwrap(), parse("d1", &alg).unwrap());
    }

    #[test]
    fn parse_power_of_sum() {
        let alg = AlgebraSpec::weyl(1);
        let p = parse("(x1+d1)^2", &alg).unwrap();
        let s = parse("x1+d1", &alg).unwrap();
        assert_eq!(p, s.multiply(&s));
    }

    #[test]
    fn shift_algebra_symbols() {
        let alg = AlgebraSpec::shift(1);
        let p = parse("s1*x1", &alg).unwrap();
        assert_eq!(print_canonical(&p), "x1*s1+s1");
        assert!(parse("d1", &alg).is_err());
        let weyl = AlgebraSpec::weyl(1);
        assert!(parse("s1", &weyl).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let alg = AlgebraSpec::weyl(2);
        assert!(parse("x0", &alg).is_err());
        assert!(parse("x3", &alg).is_err());
        assert!(parse("x1 +", &alg).is_err());
        assert!(parse("(x1", &alg).is_err());
        assert!(parse("x1 x2", &alg).is_err());
        assert!(parse("3/0", &alg).is_err());
        let e = parse("x1 + %", &alg).unwrap_err();
        assert!(e.position >= 5);
    }

    #[test]
    fn canonical_order_is_deglex_then_lex() {
        let alg = AlgebraSpec::weyl(2);
        let p = parse("2*d2 + d1 + d1^2 + x1*d2 + x1*d1*d2", &alg).unwrap();
        assert_eq!(print_canonical(&p), "x1*d1*d2+x1*d2+d1^2+d1+2*d2");
    }

    #[test]
    fn roundtrip_parse_print() {
        let alg = AlgebraSpec::weyl(2);
        for s in [
            "x1*d1*d2+x1*d2+d1^2+d1+2*d2",
            "x1^2*x2*d1+x1^2*d1*d2+2*x1*x2+5*x1*d2+x1",
            "-x1+1/3",
            "0",
        ] {
            let p = parse(s, &alg).unwrap();
            assert_eq!(print_canonical(&p), s);
        }
    }

    #[test]
    fn unit_coefficients_and_constants() {
        let alg = AlgebraSpec::weyl(1);
        let one = OrePoly::one(&alg);
        assert_eq!(print_canonical(&one), "1");
        let c = OrePoly::constant(&alg, ratq(-3, 4));
        assert_eq!(print_canonical(&c), "-3/4");
        let p = OrePoly::x(&alg, 0).scalar_mul(&rat(-1));
        assert_eq!(print_canonical(&p), "-x1");
    }
}
