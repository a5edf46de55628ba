//! Recursive-descent parser for element and polynomial expressions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? INT | '(' '-'? INT ')'
//! atom     := INT | IDENT | 'root' '(' expr ',' INT ')' | '(' expr ')'
//! ```
//!
//! Identifiers are the variables `x1..xd`, session bindings, and the
//! polynomial indeterminate `t`, which may not appear inside `root(...)`.

use std::collections::HashSet;
use std::fmt;

/// Nesting limit for parentheses and unary minus.
pub const MAX_DEPTH: usize = 200;

/// Byte range in the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// Decimal digits, reduced modulo `p` at evaluation time.
    Int(String),
    /// Zero-based variable index.
    Var(usize),
    Binding(String),
    T,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// `root(e, k)`: the `p^k`-th root.
    Root(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    fn new(kind: ExprKind, start: usize, end: usize) -> Self {
        Expr {
            kind,
            span: Span { start, end },
        }
    }

    /// Whether the indeterminate `t` occurs anywhere in the tree.
    pub fn mentions_t(&self) -> bool {
        match &self.kind {
            ExprKind::T => true,
            ExprKind::Int(_) | ExprKind::Var(_) | ExprKind::Binding(_) => false,
            ExprKind::Neg(e) | ExprKind::Pow(e, _) | ExprKind::Root(e, _) => e.mentions_t(),
            ExprKind::Binary(_, a, b) => a.mentions_t() || b.mentions_t(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Int(s) => write!(f, "{s}"),
            ExprKind::Var(i) => write!(f, "x{}", i + 1),
            ExprKind::Binding(n) => write!(f, "{n}"),
            ExprKind::T => write!(f, "t"),
            ExprKind::Neg(e) => write!(f, "Neg({e})"),
            ExprKind::Binary(op, a, b) => {
                let name = match op {
                    BinOp::Add => "Add",
                    BinOp::Sub => "Sub",
                    BinOp::Mul => "Mul",
                    BinOp::Div => "Div",
                };
                write!(f, "{name}({a}, {b})")
            }
            ExprKind::Pow(e, k) => write!(f, "Pow({e}, {k})"),
            ExprKind::Root(e, k) => write!(f, "Root({e}, {k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    UnknownVariable {
        offset: usize,
        name: String,
    },
    IntegerTooLarge {
        offset: usize,
    },
    TooDeep {
        offset: usize,
    },
    IndeterminateInRoot {
        offset: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownVariable { offset, .. }
            | ParseError::IntegerTooLarge { offset }
            | ParseError::TooDeep { offset }
            | ParseError::IndeterminateInRoot { offset } => *offset,
        }
    }

    pub(crate) fn shifted(self, by: usize) -> Self {
        match self {
            ParseError::Syntax {
                offset,
                expected,
                found,
            } => ParseError::Syntax {
                offset: offset + by,
                expected,
                found,
            },
            ParseError::UnknownVariable { offset, name } => ParseError::UnknownVariable {
                offset: offset + by,
                name,
            },
            ParseError::IntegerTooLarge { offset } => ParseError::IntegerTooLarge {
                offset: offset + by,
            },
            ParseError::TooDeep { offset } => ParseError::TooDeep {
                offset: offset + by,
            },
            ParseError::IndeterminateInRoot { offset } => ParseError::IndeterminateInRoot {
                offset: offset + by,
            },
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                offset,
                expected,
                found,
            } => {
                write!(
                    f,
                    "syntax error at offset {offset}: expected {}, found {found}",
                    expected.join(" or ")
                )
            }
            ParseError::UnknownVariable { offset, name } => {
                write!(f, "unknown variable `{name}` at offset {offset}")
            }
            ParseError::IntegerTooLarge { offset } => {
                write!(f, "integer too large at offset {offset}")
            }
            ParseError::TooDeep { offset } => {
                write!(f, "expression nested too deeply at offset {offset}")
            }
            ParseError::IndeterminateInRoot { offset } => {
                write!(f, "`t` may not appear inside root(...) (offset {offset})")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Names the parser accepts besides integer literals.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub nvars: usize,
    pub bindings: HashSet<String>,
    pub allow_t: bool,
}

impl Scope {
    pub fn new(nvars: usize) -> Self {
        Scope {
            nvars,
            bindings: HashSet::new(),
            allow_t: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    /// Next token with its start offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() {
            let len = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Int(rest[..len].to_string()), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^(),".contains(c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            expected: vec!["integer", "identifier", "operator", "`(`", "`)`", "`,`"],
            found: format!("character {c:?}"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_start: usize,
    prev_end: usize,
    scope: &'a Scope,
    depth: usize,
    root_depth: usize,
}

const ATOM_START: [&str; 4] = ["integer", "identifier", "`(`", "`-`"];

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        self.prev_end = self.lexer.pos;
        let (tok, start) = self.lexer.next()?;
        self.tok = tok;
        self.tok_start = start;
        Ok(())
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.tok_start,
            expected: expected.to_vec(),
            found: self.tok.describe(),
        }
    }

    fn expect_sym(&mut self, c: char, name: &'static str) -> Result<(), ParseError> {
        if self.tok == Tok::Sym(c) {
            self.bump()
        } else {
            Err(self.error(&[name]))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.tok_start,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            let (start, end) = (lhs.span.start, rhs.span.end);
            lhs = Expr::new(
                ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                start,
                end,
            );
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            let (start, end) = (lhs.span.start, rhs.span.end);
            lhs = Expr::new(
                ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                start,
                end,
            );
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Sym('-') {
            let start = self.tok_start;
            self.enter()?;
            self.bump()?;
            let inner = self.unary()?;
            self.depth -= 1;
            let end = inner.span.end;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), start, end));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump()?;
        let paren = self.tok == Tok::Sym('(');
        if paren {
            self.bump()?;
        }
        let negative = self.tok == Tok::Sym('-');
        if negative {
            self.bump()?;
        }
        let Tok::Int(digits) = self.tok.clone() else {
            return Err(self.error(if negative || paren {
                &["integer"]
            } else {
                &["integer", "`-`", "`(`"]
            }));
        };
        let magnitude: i64 = digits.parse().map_err(|_| ParseError::IntegerTooLarge {
            offset: self.tok_start,
        })?;
        self.bump()?;
        if paren {
            self.expect_sym(')', "`)`")?;
        }
        let exp = if negative { -magnitude } else { magnitude };
        let (start, end) = (base.span.start, self.prev_end);
        Ok(Expr::new(ExprKind::Pow(Box::new(base), exp), start, end))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        match self.tok.clone() {
            Tok::Int(digits) => {
                self.bump()?;
                Ok(Expr::new(ExprKind::Int(digits), start, self.prev_end))
            }
            Tok::Sym('(') => {
                self.enter()?;
                self.bump()?;
                let inner = self.expr()?;
                self.expect_sym(')', "`)`")?;
                self.depth -= 1;
                Ok(Expr {
                    kind: inner.kind,
                    span: Span {
                        start,
                        end: self.prev_end,
                    },
                })
            }
            Tok::Ident(name) if name == "root" => self.root(start),
            Tok::Ident(name) => {
                self.bump()?;
                let end = self.prev_end;
                let kind = self.resolve(&name, start)?;
                Ok(Expr::new(kind, start, end))
            }
            _ => Err(self.error(&ATOM_START)),
        }
    }

    fn root(&mut self, start: usize) -> Result<Expr, ParseError> {
        self.enter()?;
        self.bump()?;
        self.expect_sym('(', "`(`")?;
        self.root_depth += 1;
        let inner = self.expr()?;
        self.root_depth -= 1;
        self.expect_sym(',', "`,`")?;
        let Tok::Int(digits) = self.tok.clone() else {
            return Err(self.error(&["integer"]));
        };
        let k: u32 = digits.parse().map_err(|_| ParseError::IntegerTooLarge {
            offset: self.tok_start,
        })?;
        self.bump()?;
        self.expect_sym(')', "`)`")?;
        self.depth -= 1;
        Ok(Expr::new(
            ExprKind::Root(Box::new(inner), k),
            start,
            self.prev_end,
        ))
    }

    fn resolve(&self, name: &str, offset: usize) -> Result<ExprKind, ParseError> {
        if name == "t" && self.scope.allow_t {
            if self.root_depth > 0 {
                return Err(ParseError::IndeterminateInRoot { offset });
            }
            return Ok(ExprKind::T);
        }
        if let Some(idx) = variable_index(name) {
            if idx >= 1 && idx <= self.scope.nvars {
                return Ok(ExprKind::Var(idx - 1));
            }
        }
        if self.scope.bindings.contains(name) {
            return Ok(ExprKind::Binding(name.to_string()));
        }
        Err(ParseError::UnknownVariable {
            offset,
            name: name.to_string(),
        })
    }
}

/// `Some(i)` for names of the form `x<i>` (no leading zeros).
pub fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses a complete expression.
pub fn parse(input: &str, scope: &Scope) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src: input, pos: 0 },
        tok: Tok::End,
        tok_start: 0,
        prev_end: 0,
        scope,
        depth: 0,
        root_depth: 0,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}
