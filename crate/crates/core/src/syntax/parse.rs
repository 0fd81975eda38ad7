//! Concrete syntax.
//!
//! ```text
//! term ::= '\' ident+ '.' term | 'let' '<' ident (',' ident)+ '>' '=' term 'in' term | app
//! app  ::= atom+ [trailing '\' or 'let' term]
//! atom ::= ident | natural | 'S' atom | '<' term (',' term)+ '>' | '(' term ')'
//!        | 'rec' '(' term ',' term ',' term ',' term ')'
//!        | 'iter' '(' term ',' term ',' term ')' | 'min' '(' term ',' term ',' term ')'
//!        | '@' ident ['[' text ']']
//! ```
//!
//! Line comments start with `--`. `λ`, `⟨`, `⟩`, `⊸` and `⊗` are accepted as
//! alternatives to `\`, `<`, `>`, `-o` and `*`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{check_linear, freshen, let_tuple, mk_tuple, numeral, Calculus, Term, Var, Violation};
use crate::typing::LinType;

/// Literals above this bound are rejected rather than expanded into a chain
/// of that many `S` nodes.
pub const MAX_LITERAL: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { offset: usize, line: usize, col: usize, message: String },
    #[error("linearity violation: {}", render_violations(.0))]
    Linearity(Vec<Violation>),
    #[error("{line}:{col}: '{construct}' is not part of {calculus}")]
    Foreign { construct: &'static str, calculus: &'static str, line: usize, col: usize },
}

fn render_violations(vs: &[Violation]) -> String {
    let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
    parts.join("; ")
}

/// Resolves `@name` and `@name[arg]` references to closed terms.
pub trait Resolve {
    fn resolve(&self, name: &str, arg: Option<&str>) -> Result<Term, String>;
}

/// A resolver that knows no names.
pub struct NoRefs;

impl Resolve for NoRefs {
    fn resolve(&self, name: &str, _arg: Option<&str>) -> Result<Term, String> {
        Err(format!("unknown reference @{name}"))
    }
}

impl<F> Resolve for F
where
    F: Fn(&str, Option<&str>) -> Result<Term, String>,
{
    fn resolve(&self, name: &str, arg: Option<&str>) -> Result<Term, String> {
        self(name, arg)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub calculus: Calculus,
    /// Reject linearity violations.
    pub linear: bool,
    /// Rename binders apart (Barendregt's convention).
    pub freshen: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { calculus: Calculus::Lrec, linear: true, freshen: true }
    }
}

impl ParseOptions {
    pub fn for_calculus(calculus: Calculus) -> ParseOptions {
        ParseOptions { calculus, ..ParseOptions::default() }
    }
}

/// Parses a linear λ-rec term without references.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    parse_term(text, &ParseOptions::default(), &NoRefs)
}

pub fn parse_term(text: &str, opts: &ParseOptions, refs: &dyn Resolve) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    p.calculus = opts.calculus;
    p.refs = Some(refs);
    let t = p.term()?;
    p.expect_eof()?;
    if opts.linear {
        check_linear(&t).map_err(ParseError::Linearity)?;
    }
    Ok(if opts.freshen { freshen(&t) } else { t })
}

/// Parses a linear type: `Nat`, `A -o B` (right-associative), `A * B`
/// (binds tighter, right-associative), parentheses.
pub fn parse_type(text: &str) -> Result<LinType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.lin_type()?;
    p.expect_eof()?;
    Ok(t)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
    Eq,
    Semi,
    LBracket,
    RBracket,
    Colon,
    Lolli,
    Arrow,
    Star,
    Ident(String),
    Num(u64),
    /// `@name` with the raw text of an immediately following `[...]`.
    Ref(String, Option<String>),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lambda => "'\\'".into(),
            Tok::Dot => "'.'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LAngle => "'<'".into(),
            Tok::RAngle => "'>'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::Semi => "';'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Colon => "':'".into(),
            Tok::Lolli => "'-o'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Star => "'*'".into(),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Num(n) => format!("'{n}'"),
            Tok::Ref(s, _) => format!("'@{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub(crate) fn syntax_error(text: &str, offset: usize, message: String) -> ParseError {
    let (line, col) = line_col(text, offset);
    ParseError::Syntax { offset, line, col, message }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let next = it.peek().map(|&(_, c)| c);
        let tok = match c {
            c if c.is_whitespace() => continue,
            '-' if next == Some('-') => {
                while it.next_if(|&(_, c)| c != '\n').is_some() {}
                continue;
            }
            '-' if next == Some('o') => {
                it.next();
                Tok::Lolli
            }
            '-' if next == Some('>') => {
                it.next();
                Tok::Arrow
            }
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '<' | '⟨' => Tok::LAngle,
            '>' | '⟩' => Tok::RAngle,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            ';' => Tok::Semi,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ':' => Tok::Colon,
            '⊸' => Tok::Lolli,
            '→' => Tok::Arrow,
            '*' | '⊗' => Tok::Star,
            '@' => {
                let start = i + 1;
                let mut end = start;
                while let Some((j, c)) = it.next_if(|&(_, c)| is_ident_char(c)) {
                    end = j + c.len_utf8();
                }
                if end == start {
                    return Err(syntax_error(text, i, "expected a name after '@'".into()));
                }
                let name = text[start..end].to_string();
                let arg = if it.peek().map(|&(_, c)| c) == Some('[') {
                    let (open, _) = it.next().unwrap();
                    let mut depth = 1usize;
                    let mut close = None;
                    for (j, c) in it.by_ref() {
                        match c {
                            '[' => depth += 1,
                            ']' => {
                                depth -= 1;
                                if depth == 0 {
                                    close = Some(j);
                                    break;
                                }
                            }
                            _ => {}
                        }
                    }
                    let Some(close) = close else {
                        return Err(syntax_error(text, open, "unclosed '['".into()));
                    };
                    Some(text[open + 1..close].trim().to_string())
                } else {
                    None
                };
                Tok::Ref(name, arg)
            }
            c if c.is_ascii_digit() => {
                let mut end = i + 1;
                while let Some((j, _)) = it.next_if(|&(_, c)| c.is_ascii_digit()) {
                    end = j + 1;
                }
                let n: u64 = text[i..end]
                    .parse()
                    .ok()
                    .filter(|&n| n <= MAX_LITERAL)
                    .ok_or_else(|| syntax_error(text, i, format!("numeral literal exceeds {MAX_LITERAL}")))?;
                Tok::Num(n)
            }
            c if is_ident_start(c) => {
                let mut end = i + c.len_utf8();
                while let Some((j, c)) = it.next_if(|&(_, c)| is_ident_char(c)) {
                    end = j + c.len_utf8();
                }
                Tok::Ident(text[i..end].to_string())
            }
            c => return Err(syntax_error(text, i, format!("unexpected character '{c}'"))),
        };
        out.push((tok, i));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

const KEYWORDS: &[&str] = &["let", "in", "rec", "iter", "min", "S"];

pub(crate) struct Parser<'a> {
    pub(crate) text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    calculus: Calculus,
    refs: Option<&'a dyn Resolve>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser { text, toks: lex(text)?, pos: 0, calculus: Calculus::Lrec, refs: None })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&self, message: String) -> Result<T, ParseError> {
        Err(syntax_error(self.text, self.offset(), message))
    }

    pub(crate) fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    pub(crate) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn ident(&mut self) -> Result<Var, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let v = Var::new(s);
                self.bump();
                Ok(v)
            }
            _ => self.unexpected("a variable name"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lambda => self.lambda(),
            Tok::Ident(s) if s == "let" => self.let_in(),
            _ => self.app(),
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda)?;
        let mut xs = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            xs.push(self.ident()?);
        }
        if xs.is_empty() {
            return self.unexpected("a binder");
        }
        self.expect(Tok::Dot)?;
        let body = self.term()?;
        Ok(Term::lams(xs, body))
    }

    fn let_in(&mut self) -> Result<Term, ParseError> {
        self.bump();
        self.expect(Tok::LAngle)?;
        let mut xs = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            xs.push(self.ident()?);
        }
        if xs.len() < 2 {
            return self.unexpected("','");
        }
        self.expect(Tok::RAngle)?;
        self.expect(Tok::Eq)?;
        let scrut = self.term()?;
        if !self.at_keyword("in") {
            return self.unexpected("'in'");
        }
        self.bump();
        let body = self.term()?;
        Ok(if xs.len() == 2 {
            let y = xs.pop().unwrap();
            let x = xs.pop().unwrap();
            Term::let_pair(scrut, x, y, body)
        } else {
            let_tuple(scrut, xs, body)
        })
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s != "in",
            Tok::Num(_) | Tok::LParen | Tok::LAngle | Tok::Ref(..) => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = self.atom()?;
        loop {
            if *self.peek() == Tok::Lambda || self.at_keyword("let") {
                let last = self.term()?;
                return Ok(Term::app(head, last));
            }
            if !self.starts_atom() {
                return Ok(head);
            }
            let arg = self.atom()?;
            head = Term::app(head, arg);
        }
    }

    fn args(&mut self, n: usize) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn foreign(&self, construct: &'static str) -> ParseError {
        let (line, col) = line_col(self.text, self.offset());
        ParseError::Foreign { construct, calculus: self.calculus.name(), line, col }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(numeral(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LAngle => {
                self.bump();
                let mut ts = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    ts.push(self.term()?);
                }
                if ts.len() < 2 {
                    return self.unexpected("','");
                }
                self.expect(Tok::RAngle)?;
                Ok(mk_tuple(ts))
            }
            Tok::Ref(name, arg) => {
                self.bump();
                let refs = self.refs.unwrap_or(&NoRefs);
                let t = refs
                    .resolve(&name, arg.as_deref())
                    .map_err(|m| syntax_error(self.text, at, m))?;
                if !t.is_closed() {
                    return Err(syntax_error(self.text, at, format!("reference @{name} is not closed")));
                }
                Ok(t)
            }
            Tok::Ident(s) => match s.as_str() {
                "S" => {
                    self.bump();
                    Ok(Term::suc(self.atom()?))
                }
                "rec" => {
                    if self.calculus != Calculus::Lrec {
                        return Err(self.foreign("rec"));
                    }
                    self.bump();
                    let [a, b, c, d]: [Term; 4] = self.args(4)?.try_into().ok().unwrap();
                    Ok(Term::rec(a, b, c, d))
                }
                "iter" => {
                    self.bump();
                    let [a, b, c]: [Term; 3] = self.args(3)?.try_into().ok().unwrap();
                    Ok(crate::stdlib::iter_in(self.calculus, a, b, c))
                }
                "min" => {
                    if self.calculus != Calculus::Llcim {
                        return Err(self.foreign("min"));
                    }
                    self.bump();
                    let [a, b, c]: [Term; 3] = self.args(3)?.try_into().ok().unwrap();
                    Ok(Term::min(a, b, c))
                }
                _ => Ok(Term::var(self.ident()?)),
            },
            _ => self.unexpected("a term"),
        }
    }

    pub(crate) fn lin_type(&mut self) -> Result<LinType, ParseError> {
        let a = self.lin_product()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            let b = self.lin_type()?;
            return Ok(LinType::lolli(a, b));
        }
        Ok(a)
    }

    fn lin_product(&mut self) -> Result<LinType, ParseError> {
        let a = self.lin_atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let b = self.lin_product()?;
            return Ok(LinType::tensor(a, b));
        }
        Ok(a)
    }

    fn lin_atom(&mut self) -> Result<LinType, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "Nat" || s == "nat" => {
                self.bump();
                Ok(LinType::Nat)
            }
            Tok::LParen => {
                self.bump();
                let t = self.lin_type()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }
}
