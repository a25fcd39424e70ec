//! Textual syntax for terms.
//!
//! ```text
//! expr := term (";" term)*
//! term := atom ("*" atom)*
//! atom := "id(" n ")" | "eta(" m "," n ")" | "eps(" m "," n ")" | "(" expr ")"
//! ```
//!
//! `;` is diagrammatic composition and `*` the tensor product; `*` binds
//! tighter. Whitespace is ignored. Positions in errors are byte offsets.

use thiserror::Error;

use crate::term::{GenKind, Generator, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("number out of range")]
    NumberTooLarge,
    #[error(transparent)]
    Term(#[from] TermError),
}

pub fn parse_expr(input: &str) -> Result<Term, ParseError> {
    let mut p = Parser { input, pos: 0 };
    let t = p.expr()?;
    p.skip_ws();
    if p.pos < input.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        let rest = &self.input[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.input[self.pos..].chars().next()
    }

    fn unexpected(&mut self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        };
        ParseError {
            position: self.pos,
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found,
            },
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.unexpected(&format!("{c:?}")))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.input[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return Err(self.unexpected("a number"));
        }
        self.pos += digits;
        self.input[start..self.pos].parse().map_err(|_| ParseError {
            position: start,
            kind: ParseErrorKind::NumberTooLarge,
        })
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.input[start..]
            .bytes()
            .take_while(u8::is_ascii_alphabetic)
            .count();
        self.pos += len;
        &self.input[start..self.pos]
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term()?;
        while self.peek() == Some(';') {
            let at = self.pos;
            self.pos += 1;
            let next = self.term()?;
            acc = acc.compose(&next).map_err(|e| ParseError {
                position: at,
                kind: e.into(),
            })?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.tensor(&self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some('(') {
            self.pos += 1;
            let t = self.expr()?;
            self.expect(')')?;
            return Ok(t);
        }
        let start = self.pos;
        let kind = match self.ident() {
            "id" => None,
            "eta" => Some(GenKind::Eta),
            "eps" => Some(GenKind::Eps),
            _ => {
                self.pos = start;
                return Err(self.unexpected("id, eta, eps or '('"));
            }
        };
        self.expect('(')?;
        let first = self.number()?;
        let t = match kind {
            None => Term::identity(first),
            Some(kind) => {
                self.expect(',')?;
                let n = self.number()?;
                let gen = Generator::new(kind, first, n).map_err(|e| ParseError {
                    position: start,
                    kind: e.into(),
                })?;
                Term::generator(gen)
            }
        };
        self.expect(')')?;
        Ok(t)
    }
}
