//! Parser for the polynomial text syntax: `+ - * / ^ ( )`, integers, `i`, `h`, `x<n>`,
//! `xi<n>`. Division is only allowed by nonzero constants.

use crate::error::{Error, Result};
use crate::hbar::HbarPoly;
use crate::poly::{Poly, VarSpec};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i64),
    Imag,
    Hbar,
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(spec: VarSpec, src: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let read_num = |k: &mut usize| -> std::result::Result<u64, String> {
        let start = *k;
        while *k < chars.len() && chars[*k].is_ascii_digit() {
            *k += 1;
        }
        let s: String = chars[start..*k].iter().collect();
        s.parse::<u64>().map_err(|_| format!("bad number `{s}`"))
    };
    while k < chars.len() {
        let ch = chars[k];
        match ch {
            ' ' | '\t' => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1
            }
            '-' => {
                out.push(Token::Minus);
                k += 1
            }
            '*' => {
                out.push(Token::Star);
                k += 1
            }
            '/' => {
                out.push(Token::Slash);
                k += 1
            }
            '^' => {
                out.push(Token::Caret);
                k += 1
            }
            '(' => {
                out.push(Token::Open);
                k += 1
            }
            ')' => {
                out.push(Token::Close);
                k += 1
            }
            '0'..='9' => {
                let n = read_num(&mut k)?;
                out.push(Token::Num(i64::try_from(n).map_err(|_| "number too large".to_string())?));
            }
            'i' if chars.get(k + 1) != Some(&'x') => {
                out.push(Token::Imag);
                k += 1;
            }
            'h' => {
                out.push(Token::Hbar);
                k += 1;
            }
            'x' => {
                let fibre = chars.get(k + 1) == Some(&'i');
                k += if fibre { 2 } else { 1 };
                let n = read_num(&mut k)? as usize;
                if n == 0 {
                    return Err("variable indices start at 1".into());
                }
                let v = if fibre {
                    if n > spec.fibre {
                        return Err(format!("xi{n} exceeds the rank {}", spec.fibre));
                    }
                    spec.xi(n - 1)
                } else {
                    if n > spec.base {
                        return Err(format!("x{n} exceeds the base dimension {}", spec.base));
                    }
                    spec.x(n - 1)
                };
                out.push(Token::Var(v));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    spec: VarSpec,
    order: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> std::result::Result<HbarPoly, String> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?).map_err(|e| e.to_string())?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?).map_err(|e| e.to_string())?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> std::result::Result<HbarPoly, String> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Star => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?).map_err(|e| e.to_string())?;
                }
                Token::Slash => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let c = as_constant(&d).ok_or("division by a non-constant")?;
                    let inv = c.inv().ok_or("division by zero")?;
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> std::result::Result<HbarPoly, String> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let Some(Token::Num(e)) = self.bump() else {
                return Err("exponent must be a nonnegative integer".into());
            };
            let mut acc = self.constant(Scalar::one());
            for _ in 0..e {
                acc = acc.mul(&base).map_err(|e| e.to_string())?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<HbarPoly, String> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.scale(&Scalar::from_int(-1)));
        }
        if self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn constant(&self, c: Scalar) -> HbarPoly {
        HbarPoly::from_poly(Poly::constant(self.spec, c), self.order)
    }

    fn atom(&mut self) -> std::result::Result<HbarPoly, String> {
        match self.bump() {
            Some(Token::Num(n)) => Ok(self.constant(Scalar::from_int(n))),
            Some(Token::Imag) => Ok(self.constant(Scalar::i())),
            Some(Token::Hbar) => {
                let mut p = HbarPoly::zero(self.spec, self.order);
                if self.order == 0 {
                    return Err("`h` is not allowed here".into());
                }
                p.add_at(1, &Poly::one(self.spec));
                Ok(p)
            }
            Some(Token::Var(v)) => Ok(HbarPoly::from_poly(Poly::var(self.spec, v), self.order)),
            Some(Token::Open) => {
                let inner = self.expr()?;
                if self.bump() != Some(Token::Close) {
                    return Err("missing `)`".into());
                }
                Ok(inner)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

fn as_constant(p: &HbarPoly) -> Option<Scalar> {
    if p.is_zero() {
        return Some(Scalar::zero());
    }
    if p.top_power() != Some(0) {
        return None;
    }
    let c = p.at(0);
    c.is_constant().then(|| c.constant_term())
}

/// Parses a polynomial that may contain `h`, truncating at `order`.
pub fn parse_hbar_poly(spec: VarSpec, order: usize, src: &str) -> Result<HbarPoly> {
    let toks = lex(spec, src).map_err(|msg| Error::Parse { line: 0, msg })?;
    if toks.is_empty() {
        return Err(Error::Parse { line: 0, msg: "empty polynomial".into() });
    }
    let mut p = Parser { toks: &toks, pos: 0, spec, order };
    let out = p.expr().map_err(|msg| Error::Parse { line: 0, msg })?;
    if p.pos != toks.len() {
        return Err(Error::Parse { line: 0, msg: "trailing input".into() });
    }
    Ok(out)
}

/// Parses an `h`-free polynomial.
pub fn parse_poly(spec: VarSpec, src: &str) -> Result<Poly> {
    Ok(parse_hbar_poly(spec, 0, src)?.at(0))
}

/// Parses a Gaussian-rational constant such as `-3/4+1/2*i`.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let p = parse_poly(VarSpec::new(0, 0), src)?;
    Ok(p.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_canonical_text() {
        let spec = VarSpec::new(2, 2);
        for src in
            ["x1^2 + 2*x1*xi1 + xi1^2", "-3 + 1/2*i*x2*xi2", "-xi2 + (1/2-1/3*i)*xi1*xi2", "-(1+i)*x1", "0", "-x1^2"]
        {
            let p = parse_poly(spec, src).unwrap();
            assert_eq!(p.to_string(), src);
        }
    }

    #[test]
    fn hbar_and_errors() {
        let spec = VarSpec::new(0, 1);
        let p = parse_hbar_poly(spec, 2, "(1+h)*(1-h) + h^3").unwrap();
        assert_eq!(p.to_string(), "1 - h^2");
        assert!(parse_poly(spec, "h").is_err());
        assert!(parse_poly(spec, "xi2").is_err());
        assert!(parse_poly(spec, "1/xi1").is_err());
        assert!(parse_poly(spec, "1/0").is_err());
        assert_eq!(parse_scalar("-3/4+1/2*i").unwrap().to_string(), "-3/4+1/2*i");
    }
}
