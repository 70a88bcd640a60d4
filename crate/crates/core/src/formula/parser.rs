//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula  := implies
//! implies  := or ("->" implies)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "!" unary | quant | atom
//! quant    := ("exists" | "forall") var ("," var)* ":" formula
//! atom     := "0" | "1/2" | "1" | "(" formula ")"
//!           | pred "(" var ("," var)? ")" | var "==" var | var "!=" var
//! ```

use super::{Formula, FormulaError};
use crate::kleene::TruthValue;
use crate::structure::PredicateSignature;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Type(#[from] FormulaError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Const(TruthValue),
    LParen,
    RParen,
    Comma,
    Colon,
    EqEq,
    NotEq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Exists,
    Forall,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Const(v) => format!("`{v}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::EqEq => "`==`".into(),
        Tok::NotEq => "`!=`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Exists => "`exists`".into(),
        Tok::Forall => "`forall`".into(),
        Tok::End => "end of input".into(),
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError::Syntax {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Lexed {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += width;
            *col += width;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '|' => push(Tok::Pipe, 1, &mut i, &mut col),
            '=' if next == Some('=') => push(Tok::EqEq, 2, &mut i, &mut col),
            '!' if next == Some('=') => push(Tok::NotEq, 2, &mut i, &mut col),
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '0' => push(Tok::Const(TruthValue::False), 1, &mut i, &mut col),
            '1' if next == Some('/') => {
                if chars.get(i + 2) == Some(&'2') {
                    push(Tok::Const(TruthValue::Maybe), 3, &mut i, &mut col)
                } else {
                    return Err(err(line, col, "expected `1/2`".into()));
                }
            }
            '1' => push(Tok::Const(TruthValue::True), 1, &mut i, &mut col),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut i, &mut col);
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
        if out
            .last()
            .is_some_and(|l| matches!(l.tok, Tok::Const(_)) && l.line == start_line && l.column == start_col)
        {
            // a constant directly followed by an identifier character (e.g. `10`, `1x`)
            if let Some(&c) = chars.get(i) {
                if c.is_ascii_alphanumeric() || c == '_' {
                    return Err(err(line, col, format!("unexpected character `{c}` after constant")));
                }
            }
        }
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let l = &self.toks[self.pos];
        ParseError::Syntax {
            line: l.line,
            column: l.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", describe(&want), describe(self.peek()))))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", describe(&other)))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => {
                let universal = *self.peek() == Tok::Forall;
                self.bump();
                let mut vars = vec![self.ident("a variable")?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    vars.push(self.ident("a variable")?);
                }
                self.expect(Tok::Colon)?;
                let mut body = self.formula()?;
                for v in vars.into_iter().rev() {
                    body = if universal {
                        Formula::forall(v, body)
                    } else {
                        Formula::exists(v, body)
                    };
                }
                Ok(body)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Tok::Const(v) => Ok(Formula::Const(v)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match self.peek() {
                Tok::LParen => {
                    self.bump();
                    let a = self.ident("a variable")?;
                    let f = if *self.peek() == Tok::Comma {
                        self.bump();
                        let b = self.ident("a variable")?;
                        Formula::pred2(name, a, b)
                    } else {
                        Formula::pred1(name, a)
                    };
                    self.expect(Tok::RParen)?;
                    Ok(f)
                }
                Tok::EqEq => {
                    self.bump();
                    let b = self.ident("a variable")?;
                    Ok(Formula::eq(name, b))
                }
                Tok::NotEq => {
                    self.bump();
                    let b = self.ident("a variable")?;
                    Ok(Formula::not(Formula::eq(name, b)))
                }
                other => Err(self.error(format!(
                    "expected `(`, `==` or `!=` after `{name}`, found {}",
                    describe(other)
                ))),
            },
            other => {
                // report at the offending token
                self.pos = self.pos.saturating_sub(usize::from(other != Tok::End));
                Err(self.error(format!("expected a formula, found {}", describe(&other))))
            }
        }
    }
}

/// Parses a formula without checking predicate names.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(f)
}

/// Parses a formula and checks every predicate against `sig`.
pub fn parse_checked(text: &str, sig: &PredicateSignature) -> Result<Formula, ParseError> {
    let f = parse(text)?;
    f.check(sig)?;
    Ok(f)
}
