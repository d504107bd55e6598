//! Text grammar for formulas and sequents.
//!
//! From loosest to tightest binding:
//!
//! ```text
//! imp    := or ( "->" imp )?                  right-associative
//! or     := and ( "|" and )*                  left-associative
//! and    := unary ( "&" unary )*              left-associative
//! unary  := "~" unary | "[" n "]" unary | "<" n ">" unary
//!         | "forall" ident "." unary | "exists" ident "." unary
//!         | atom
//! atom   := ident | "false" | "true" | "(" imp ")"
//! ```
//!
//! The quantifiers are prefix operators like `~`, so `forall p. p | q` reads
//! as `(forall p. p) | q`. The Unicode spellings `¬ ∧ ∨ → ⇒ ⊥ ⊤` are
//! accepted as aliases.

use std::fmt;

use crate::syntax::{AgentId, Formula, FormulaMultiset, Level, Sequent, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>, expected: &[&str]) -> Self {
        ParseError {
            span,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// The error message followed by the input line with the span underlined.
    pub fn annotate(&self, input: &str) -> String {
        let prefix_chars = input[..self.span.start.min(input.len())].chars().count();
        let width = input[self.span.start.min(input.len())..self.span.end.min(input.len())]
            .chars()
            .count()
            .max(1);
        format!(
            "{}\n  {}\n  {}{}",
            self,
            input,
            " ".repeat(prefix_chars),
            "^".repeat(width)
        )
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Turnstile,
    Comma,
    Dot,
    False,
    True,
    Forall,
    Exists,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::Turnstile => "=>",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::False => "false",
            Tok::True => "true",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = |tok: Tok| (tok, SourceSpan { start, end: start + c.len_utf8() });
        let tok = match c {
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            '<' => single(Tok::LAngle),
            '>' => single(Tok::RAngle),
            '~' | '¬' => single(Tok::Tilde),
            '&' | '∧' => single(Tok::Amp),
            '|' | '∨' => single(Tok::Pipe),
            '→' => single(Tok::Arrow),
            '⇒' => single(Tok::Turnstile),
            ',' => single(Tok::Comma),
            '.' => single(Tok::Dot),
            '⊥' => single(Tok::False),
            '⊤' => single(Tok::True),
            '-' | '=' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        let tok = if c == '-' { Tok::Arrow } else { Tok::Turnstile };
                        out.push((tok, SourceSpan { start, end: start + 2 }));
                        continue;
                    }
                    _ => {
                        return Err(ParseError::new(
                            SourceSpan { start, end: start + 1 },
                            format!("unexpected character `{c}`"),
                            &[if c == '-' { "->" } else { "=>" }],
                        ))
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let mut end = start;
                while let Some(&(i, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = i + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let span = SourceSpan { start, end };
                let n = input[start..end].parse::<u32>().map_err(|_| {
                    ParseError::new(span, "agent number out of range", &[])
                })?;
                out.push((Tok::Int(n), span));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = start;
                while let Some(&(i, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        end = i + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &input[start..end];
                let tok = match word {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, SourceSpan { start, end }));
                continue;
            }
            other => {
                return Err(ParseError::new(
                    SourceSpan { start, end: start + other.len_utf8() },
                    format!("unexpected character `{other}`"),
                    &[],
                ))
            }
        };
        chars.next();
        out.push(tok);
    }
    out.push((Tok::Eof, SourceSpan { start: input.len(), end: input.len() }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    level: Level,
}

const FORMULA_START: &[&str] = &["identifier", "false", "true", "(", "~", "[", "<", "forall", "exists"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&[want.spelling()]))
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::new(
            self.span(),
            format!("unexpected {}", self.peek().describe()),
            expected,
        )
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn agent(&mut self, close: Tok) -> Result<AgentId, ParseError> {
        let (tok, span) = self.bump();
        let id = match tok {
            Tok::Int(n) => AgentId::new(n)
                .map_err(|_| ParseError::new(span, "agent numbers start at 1", &[]))?,
            _ => return Err(ParseError::new(span, format!("unexpected {}", tok.describe()), &["agent number"])),
        };
        self.expect(close)?;
        Ok(id)
    }

    fn binder(&mut self) -> Result<Var, ParseError> {
        let (kw, kw_span) = self.bump();
        if self.level == Level::L1 {
            return Err(ParseError::new(
                kw_span,
                format!("second-order construct `{}` is not allowed in L1", kw.spelling()),
                &[],
            ));
        }
        let (tok, span) = self.bump();
        let v = match tok {
            Tok::Ident(name) => Var::new(&name),
            _ => return Err(ParseError::new(span, format!("unexpected {}", tok.describe()), &["identifier"])),
        };
        self.expect(Tok::Dot)?;
        Ok(v)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let i = self.agent(Tok::RBracket)?;
                Ok(Formula::boxed(i, self.unary()?))
            }
            Tok::LAngle => {
                self.bump();
                let i = self.agent(Tok::RAngle)?;
                Ok(Formula::diamond(i, self.unary()?))
            }
            Tok::Forall => {
                let v = self.binder()?;
                Ok(Formula::forall(v, self.unary()?))
            }
            Tok::Exists => {
                let v = self.binder()?;
                Ok(Formula::exists(v, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::var(&name))
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::LParen => {
                self.bump();
                let f = self.imp()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.unexpected(FORMULA_START)),
        }
    }

    fn formula_list(&mut self, stop: &Tok) -> Result<FormulaMultiset, ParseError> {
        let mut out = FormulaMultiset::new();
        if self.peek() == stop {
            return Ok(out);
        }
        loop {
            out.push(self.imp()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if t == stop => return Ok(out),
                _ => return Err(self.unexpected(&[",", stop.spelling_or_eof()])),
            }
        }
    }
}

impl Tok {
    fn spelling_or_eof(&self) -> &'static str {
        match self {
            Tok::Eof => "end of input",
            other => other.spelling(),
        }
    }
}

/// Parses one formula. At [`Level::L1`] quantifiers are rejected.
pub fn parse_formula(text: &str, level: Level) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, level };
    let f = p.imp()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["->", "|", "&", "end of input"]));
    }
    Ok(f)
}

/// Parses `F1, ..., Fn => G1, ..., Gm`; either side may be empty and
/// duplicates are kept. Sequents are always quantifier-free.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, level: Level::L1 };
    let ant = p.formula_list(&Tok::Turnstile)?;
    p.expect(Tok::Turnstile)?;
    let suc = p.formula_list(&Tok::Eof)?;
    Ok(Sequent::new(ant, suc))
}
