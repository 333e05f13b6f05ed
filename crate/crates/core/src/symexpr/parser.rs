//! Recursive-descent parser for the expression grammar used by the CLI and
//! tests. Precedence: `^` over `*` `/` over `+` `-`; `^` is right-associative;
//! unary minus binds tighter than `*`.

use super::{Expr, UnaryOp, Var};
use crate::error::ParseError;
use std::f64::consts::{E, PI};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // exponent part, only if followed by digits (so `2*e` still
                // lexes `e` as an identifier)
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("invalid number literal `{s}`"),
                })?;
                toks.push((start, Tok::Num(v)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::Syntax {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = lhs + self.parse_mul()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = lhs - self.parse_mul()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_mul(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = lhs * self.parse_unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = lhs / self.parse_unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            Ok(-self.parse_unary()?)
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            // right-associative; allow a unary-minus exponent
            let expo = self.parse_unary()?;
            Ok(base.pow(expo))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::num(v)),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.parse_ident(pos, &name),
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected expression".to_string(),
            }),
        }
    }

    fn parse_ident(&mut self, pos: usize, name: &str) -> Result<Expr, ParseError> {
        if let Some(Tok::LParen) = self.peek() {
            self.bump();
            let op = match name {
                "exp" => Some(UnaryOp::Exp),
                "log" => Some(UnaryOp::Log),
                "sin" => Some(UnaryOp::Sin),
                "cos" => Some(UnaryOp::Cos),
                "tan" => Some(UnaryOp::Tan),
                "sqrt" => Some(UnaryOp::Sqrt),
                "conj" => Some(UnaryOp::Conj),
                "re" => Some(UnaryOp::Re),
                "im" => Some(UnaryOp::Im),
                _ => None,
            };
            if let Some(op) = op {
                let arg = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::Unary(op, std::sync::Arc::new(arg)));
            }
            if name == "ifpos" {
                let g = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let a = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::ifpos(g, a, b));
            }
            return Err(ParseError::UnknownIdentifier {
                pos,
                name: name.to_string(),
            });
        }
        match name {
            "x" => Ok(Expr::Var(Var::X)),
            "y" => Ok(Expr::Var(Var::Y)),
            "t" => Ok(Expr::Var(Var::T)),
            // convenience alias for entire functions: w = x + i*y
            "w" => Ok(Expr::x() + Expr::i() * Expr::y()),
            "pi" => Ok(Expr::num(PI)),
            "e" => Ok(Expr::num(E)),
            "i" => Ok(Expr::i()),
            _ => Err(ParseError::UnknownIdentifier {
                pos,
                name: name.to_string(),
            }),
        }
    }
}

/// Parses expression text into an [`Expr`].
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.parse_expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.here(),
            msg: "trailing input".to_string(),
        });
    }
    Ok(e)
}
