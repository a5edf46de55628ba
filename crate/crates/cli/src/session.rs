//! Session state, expression evaluation and the command interpreter.

use std::collections::HashMap;
use std::fmt;

use fpi_core::{FqElem, FqEmbedding, FqField, Mode, PerfElem, PerfectClosure, UniPoly};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::parser::{self, BinOp, Expr, ExprKind, ParseError, Scope, Span};

/// Largest degree a polynomial power may reach.
pub const MAX_POLY_DEGREE: u64 = 4096;

/// Output schema version stamped on every JSON object.
pub const JSON_SCHEMA: u32 = 1;

const COMMANDS: &[&str] = &[
    "let",
    "eval",
    "pthroot",
    "frob",
    "level",
    "issep",
    "sqfree",
    "sepdec",
    "prootpoly",
    "fq",
    "mode",
    "json",
    "help",
];

const HELP: &str = "commands: let NAME = EXPR | eval EXPR | pthroot EXPR K | frob EXPR K | level EXPR | \
issep POLY | sqfree POLY | sepdec POLY | prootpoly POLY | fq make P N | fq frob P N ELEM | \
fq invfrob P N ELEM | fq embed P M N ELEM | fq perfect-check P N | mode perfect|level0 | json on|off";

/// What an expression evaluates to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Elem(PerfElem),
    Poly(UniPoly),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Elem(e) => write!(f, "{e}"),
            Value::Poly(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Algebra(#[from] fpi_core::Error),
    #[error("division by a polynomial in t is not supported")]
    DivisionByPolynomial,
    #[error("negative powers of polynomials in t are not supported")]
    NegativePolynomialPower,
    #[error("polynomial power would exceed degree {MAX_POLY_DEGREE}")]
    PolynomialPowerTooLarge,
    #[error("expected an element, found a polynomial in t")]
    ExpectedElement,
    #[error("`{0}` cannot be used in a finite field expression")]
    NotInFiniteField(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("{0}")]
    Usage(String),
    #[error("{error} (at offset {})", span.start)]
    Eval { error: EvalError, span: Span },
}

impl CliError {
    /// Process exit code: 1 for evaluation errors, 2 for usage and parse
    /// errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Eval { .. } => 1,
            _ => 2,
        }
    }

    pub fn offset(&self) -> Option<usize> {
        match self {
            CliError::Parse(e) => Some(e.offset()),
            CliError::Eval { span, .. } => Some(span.start),
            CliError::UnknownCommand(_) => Some(0),
            CliError::Usage(_) => None,
        }
    }

    /// Byte range of the offending input, when known.
    pub fn span(&self) -> Option<Span> {
        match self {
            CliError::Eval { span, .. } => Some(*span),
            _ => self.offset().map(|o| Span {
                start: o,
                end: o + 1,
            }),
        }
    }

    /// The algebra error underneath, if any.
    pub fn algebra(&self) -> Option<&fpi_core::Error> {
        match self {
            CliError::Eval {
                error: EvalError::Algebra(e),
                ..
            } => Some(e),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Json {
        json!({
            "schema": JSON_SCHEMA,
            "kind": "error",
            "code": self.exit_code(),
            "message": self.to_string(),
            "offset": self.offset(),
        })
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            CliError::Parse(e) => CliError::Parse(e.shifted(by)),
            CliError::Eval { error, span } => CliError::Eval {
                error,
                span: Span {
                    start: span.start + by,
                    end: span.end + by,
                },
            },
            other => other,
        }
    }
}

fn at(span: Span) -> impl Fn(fpi_core::Error) -> CliError {
    move |e| CliError::Eval {
        error: EvalError::Algebra(e),
        span,
    }
}

fn fail(error: EvalError, span: Span) -> CliError {
    CliError::Eval { error, span }
}

/// A command's result as text and as JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    pub json: Json,
}

impl Reply {
    fn text(kind: &str, text: String) -> Self {
        let json = json!({ "schema": JSON_SCHEMA, "kind": kind, "text": text });
        Reply { text, json }
    }

    fn with(mut self, key: &str, value: Json) -> Self {
        self.json[key] = value;
        self
    }
}

/// Interpreter state: prime, variable count, mode and bindings.
#[derive(Debug, Clone)]
pub struct Session {
    ctx: PerfectClosure,
    mode: Mode,
    bindings: HashMap<String, Value>,
    json: bool,
}

impl Session {
    pub fn new(p: u64, nvars: usize, mode: Mode, max_level: u32) -> Result<Self, fpi_core::Error> {
        let ctx = PerfectClosure::new(p, nvars)?.with_max_level(max_level);
        Ok(Session {
            ctx,
            mode,
            bindings: HashMap::new(),
            json: false,
        })
    }

    pub fn context(&self) -> &PerfectClosure {
        &self.ctx
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn json(&self) -> bool {
        self.json
    }

    pub fn set_json(&mut self, on: bool) {
        self.json = on;
    }

    pub fn binding(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn scope(&self) -> Scope {
        Scope {
            nvars: self.ctx.nvars(),
            bindings: self.bindings.keys().cloned().collect(),
            allow_t: true,
        }
    }

    pub fn parse(&self, input: &str) -> Result<Expr, CliError> {
        parser::parse(input, &self.scope()).map_err(CliError::Parse)
    }

    /// Parses and evaluates an expression.
    pub fn eval_str(&self, input: &str) -> Result<Value, CliError> {
        let e = self.parse(input)?;
        self.eval(&e)
    }

    /// Runs one line and renders the reply according to the JSON setting.
    /// Blank lines and `#` comments produce `None`.
    pub fn run_command(&mut self, line: &str) -> Result<Option<String>, CliError> {
        Ok(self.execute(line)?.map(|r| {
            if self.json {
                r.json.to_string()
            } else {
                r.text
            }
        }))
    }

    pub fn execute(&mut self, line: &str) -> Result<Option<Reply>, CliError> {
        let trimmed = line.trim_start();
        let base = line.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return Ok(None);
        }
        let word_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let word = &trimmed[..word_len];
        let rest_start = base + word_len;
        let rest = &line[rest_start..base + trimmed.len()];
        let reply = match word {
            "let" => self.cmd_let(rest, rest_start),
            "eval" => self.eval_at(rest, rest_start).map(value_reply),
            "level" => self.cmd_level(rest, rest_start),
            "pthroot" => self.cmd_iterate(rest, rest_start, true),
            "frob" => self.cmd_iterate(rest, rest_start, false),
            "issep" | "sqfree" | "sepdec" | "prootpoly" => self.cmd_poly(word, rest, rest_start),
            "fq" => self.cmd_fq(rest),
            "mode" => self.cmd_mode(rest),
            "json" => self.cmd_json(rest),
            "help" => Ok(Reply::text("help", HELP.to_string())),
            _ if self.starts_expression(word) => self.eval_at(trimmed, base).map(value_reply),
            _ => Err(CliError::UnknownCommand(word.to_string())),
        }?;
        Ok(Some(reply))
    }

    fn starts_expression(&self, word: &str) -> bool {
        let head: String = word
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        if head.is_empty() {
            return true;
        }
        head.starts_with(|c: char| c.is_ascii_digit())
            || head == "t"
            || head == "root"
            || parser::variable_index(&head).is_some()
            || self.bindings.contains_key(&head)
    }

    fn eval_at(&self, src: &str, offset: usize) -> Result<Value, CliError> {
        self.eval_str(src).map_err(|e| e.shifted(offset))
    }

    fn cmd_let(&mut self, rest: &str, offset: usize) -> Result<Reply, CliError> {
        let usage = || CliError::Usage("usage: let NAME = EXPR".to_string());
        let (name, expr) = rest.split_once('=').ok_or_else(usage)?;
        let name = name.trim();
        let valid = name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(usage());
        }
        if name == "t"
            || name == "root"
            || parser::variable_index(name).is_some()
            || COMMANDS.contains(&name)
        {
            return Err(CliError::Usage(format!(
                "`{name}` is reserved and cannot be bound"
            )));
        }
        let expr_offset = offset + rest.find('=').expect("split above") + 1;
        let value = self.eval_at(expr, expr_offset)?;
        let reply = value_reply(value.clone());
        self.bindings.insert(name.to_string(), value);
        Ok(Reply {
            text: format!("{name} = {}", reply.text),
            json: reply.json,
        }
        .with("name", json!(name)))
    }

    fn cmd_level(&self, rest: &str, offset: usize) -> Result<Reply, CliError> {
        let level = match self.eval_at(rest, offset)? {
            Value::Elem(e) => e.level(),
            Value::Poly(p) => p.coeffs().iter().map(|c| c.level()).max().unwrap_or(0),
        };
        Ok(Reply::text("level", level.to_string()).with("level", json!(level)))
    }

    /// `pthroot EXPR K` and `frob EXPR K`.
    fn cmd_iterate(&self, rest: &str, offset: usize, root: bool) -> Result<Reply, CliError> {
        let name = if root { "pthroot" } else { "frob" };
        let usage = || CliError::Usage(format!("usage: {name} EXPR K"));
        let trimmed = rest.trim_end();
        let split = trimmed.rfind(char::is_whitespace).ok_or_else(usage)?;
        let k: u32 = trimmed[split..].trim().parse().map_err(|_| usage())?;
        let expr_src = &rest[..split];
        let value = self.eval_at(expr_src, offset)?;
        let span = Span {
            start: offset,
            end: offset + split,
        };
        let Value::Elem(a) = value else {
            return Err(fail(EvalError::ExpectedElement, span));
        };
        let out = if root {
            let r = self.ctx.pn_root(&a, k).map_err(at(span))?;
            self.check_mode(&r, span)?;
            r
        } else {
            self.ctx.frobenius_pow(&a, k).map_err(at(span))?
        };
        Ok(value_reply(Value::Elem(out)))
    }

    fn cmd_poly(&self, cmd: &str, rest: &str, offset: usize) -> Result<Reply, CliError> {
        let span = Span {
            start: offset,
            end: offset + rest.len(),
        };
        let f = self.to_poly(self.eval_at(rest, offset)?, span)?;
        let err = at(span);
        Ok(match cmd {
            "issep" => {
                let sep = f.is_separable().map_err(err)?;
                Reply::text("issep", sep.to_string()).with("separable", json!(sep))
            }
            "sqfree" => {
                let d = f.squarefree_decomposition().map_err(err)?;
                let parts: Vec<Json> = d
                    .parts
                    .iter()
                    .map(|(g, m)| json!({ "factor": poly_json(g), "multiplicity": m }))
                    .collect();
                Reply::text("sqfree", d.to_string())
                    .with("unit", elem_json(&d.unit))
                    .with("parts", Json::Array(parts))
            }
            "sepdec" => {
                let d = f.separable_decomposition().map_err(err)?;
                Reply::text("sepdec", d.to_string())
                    .with("s", poly_json(&d.s))
                    .with("e", json!(d.e))
            }
            _ => value_reply(Value::Poly(f.pth_root().map_err(err)?)),
        })
    }

    fn cmd_mode(&mut self, rest: &str) -> Result<Reply, CliError> {
        self.mode = match rest.trim() {
            "perfect" => Mode::Perfect,
            "level0" => Mode::Level0,
            _ => return Err(CliError::Usage("usage: mode perfect|level0".to_string())),
        };
        Ok(Reply::text("mode", format!("mode {}", self.mode)))
    }

    fn cmd_json(&mut self, rest: &str) -> Result<Reply, CliError> {
        self.json = match rest.trim() {
            "on" => true,
            "off" => false,
            _ => return Err(CliError::Usage("usage: json on|off".to_string())),
        };
        Ok(Reply::text(
            "json",
            format!("json {}", if self.json { "on" } else { "off" }),
        ))
    }

    fn cmd_fq(&self, rest: &str) -> Result<Reply, CliError> {
        let mut words = rest.split_whitespace();
        let sub = words.next().unwrap_or("");
        let args: Vec<&str> = words.collect();
        let usage = |u: &str| CliError::Usage(format!("usage: fq {u}"));
        let num = |s: &str, u: &str| s.parse::<u64>().map_err(|_| usage(u));
        let field = |p: u64, n: u64| -> Result<FqField, CliError> {
            let n = u32::try_from(n).map_err(|_| usage("P N"))?;
            FqField::new(p, n).map_err(|e| fail(EvalError::Algebra(e), Span { start: 0, end: 0 }))
        };
        match sub {
            "make" => {
                let [p, n] = args[..] else {
                    return Err(usage("make P N"));
                };
                let f = field(num(p, "make P N")?, num(n, "make P N")?)?;
                let text = format!(
                    "F_{}^{} = Z_{}[t]/({})",
                    f.p(),
                    f.degree(),
                    f.p(),
                    f.modulus_string()
                );
                Ok(Reply::text("fq-make", text)
                    .with("p", json!(f.p()))
                    .with("n", json!(f.degree()))
                    .with("modulus", json!(f.modulus())))
            }
            "perfect-check" => {
                let [p, n] = args[..] else {
                    return Err(usage("perfect-check P N"));
                };
                let f = field(num(p, "perfect-check P N")?, num(n, "perfect-check P N")?)?;
                let r = f.check_perfect().map_err(at(Span { start: 0, end: 0 }))?;
                Ok(Reply::text("fq-perfect-check", r.to_string())
                    .with("pass", json!(r.passed()))
                    .with("size", json!(r.size))
                    .with("order", json!(r.order))
                    .with(
                        "counterexample",
                        json!(r.counterexample.as_ref().map(|c| c.to_string())),
                    ))
            }
            "frob" | "invfrob" => {
                let u = if sub == "frob" {
                    "frob P N ELEM"
                } else {
                    "invfrob P N ELEM"
                };
                if args.len() < 3 {
                    return Err(usage(u));
                }
                let f = field(num(args[0], u)?, num(args[1], u)?)?;
                let a = eval_fq(&f, &args[2..].join(" "))?;
                let b = if sub == "frob" {
                    a.frobenius()
                } else {
                    a.inv_frobenius()
                };
                Ok(fq_reply(&format!("fq-{sub}"), &b))
            }
            "embed" => {
                let u = "embed P M N ELEM";
                if args.len() < 4 {
                    return Err(usage(u));
                }
                let p = num(args[0], u)?;
                let source = field(p, num(args[1], u)?)?;
                let target = field(p, num(args[2], u)?)?;
                let a = eval_fq(&source, &args[3..].join(" "))?;
                let emb =
                    FqEmbedding::new(&source, &target).map_err(at(Span { start: 0, end: 0 }))?;
                Ok(fq_reply("fq-embed", &emb.apply(&a)))
            }
            _ => Err(usage("make|frob|invfrob|embed|perfect-check ...")),
        }
    }

    fn check_mode(&self, e: &PerfElem, span: Span) -> Result<(), CliError> {
        if self.mode == Mode::Level0 && e.level() > 0 {
            return Err(fail(
                EvalError::Algebra(fpi_core::Error::NotPerfectMode),
                span,
            ));
        }
        Ok(())
    }

    fn to_poly(&self, v: Value, span: Span) -> Result<UniPoly, CliError> {
        match v {
            Value::Poly(p) => Ok(p),
            Value::Elem(e) => UniPoly::constant(self.ctx, self.mode, e).map_err(at(span)),
        }
    }

    /// Evaluates a parsed expression in this session.
    pub fn eval(&self, e: &Expr) -> Result<Value, CliError> {
        let span = e.span;
        let ctx = &self.ctx;
        match &e.kind {
            ExprKind::Int(digits) => Ok(Value::Elem(
                ctx.constant(reduce_digits(digits, ctx.p()) as i64),
            )),
            ExprKind::Var(i) => Ok(Value::Elem(ctx.var(*i).map_err(at(span))?)),
            ExprKind::T => Ok(Value::Poly(UniPoly::t(*ctx, self.mode))),
            ExprKind::Binding(name) => {
                let v = self.bindings.get(name).cloned().ok_or_else(|| {
                    CliError::Parse(ParseError::UnknownVariable {
                        offset: span.start,
                        name: name.clone(),
                    })
                })?;
                match v {
                    Value::Elem(a) => {
                        self.check_mode(&a, span)?;
                        Ok(Value::Elem(a))
                    }
                    Value::Poly(p) => Ok(Value::Poly(p.with_mode(self.mode).map_err(at(span))?)),
                }
            }
            ExprKind::Neg(inner) => Ok(match self.eval(inner)? {
                Value::Elem(a) => Value::Elem(ctx.neg(&a)),
                Value::Poly(p) => Value::Poly(p.neg()),
            }),
            ExprKind::Binary(op, lhs, rhs) => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                self.binary(*op, a, b, span)
            }
            ExprKind::Pow(base, k) => match self.eval(base)? {
                Value::Elem(a) => Ok(Value::Elem(ctx.pow(&a, *k).map_err(at(span))?)),
                Value::Poly(p) => {
                    if *k < 0 {
                        return Err(fail(EvalError::NegativePolynomialPower, span));
                    }
                    let deg = p.degree().unwrap_or(0) as u64;
                    if deg.saturating_mul(*k as u64) > MAX_POLY_DEGREE {
                        return Err(fail(EvalError::PolynomialPowerTooLarge, span));
                    }
                    Ok(Value::Poly(p.pow(*k as u64).map_err(at(span))?))
                }
            },
            ExprKind::Root(inner, k) => {
                let Value::Elem(a) = self.eval(inner)? else {
                    return Err(fail(EvalError::ExpectedElement, span));
                };
                if *k > ctx.max_level() {
                    return Err(at(span)(fpi_core::Error::LevelOverflow {
                        level: *k,
                        max: ctx.max_level(),
                    }));
                }
                let r = ctx.pn_root(&a, *k).map_err(at(span))?;
                self.check_mode(&r, span)?;
                Ok(Value::Elem(r))
            }
        }
    }

    fn binary(&self, op: BinOp, a: Value, b: Value, span: Span) -> Result<Value, CliError> {
        let ctx = &self.ctx;
        let err = at(span);
        if let (Value::Elem(x), Value::Elem(y)) = (&a, &b) {
            let r = match op {
                BinOp::Add => ctx.add(x, y),
                BinOp::Sub => ctx.sub(x, y),
                BinOp::Mul => ctx.mul(x, y),
                BinOp::Div => ctx.div(x, y),
            };
            return Ok(Value::Elem(r.map_err(err)?));
        }
        if op == BinOp::Div {
            let divisor = match b {
                Value::Elem(y) => y,
                Value::Poly(q) if q.is_constant() => q.coeff(0),
                Value::Poly(_) => return Err(fail(EvalError::DivisionByPolynomial, span)),
            };
            let inv = ctx.inv(&divisor).map_err(&err)?;
            let p = self.to_poly(a, span)?;
            return Ok(Value::Poly(p.scale(&inv).map_err(err)?));
        }
        let (p, q) = (self.to_poly(a, span)?, self.to_poly(b, span)?);
        let r = match op {
            BinOp::Add => p.add(&q),
            BinOp::Sub => p.sub(&q),
            BinOp::Mul => p.mul(&q),
            BinOp::Div => unreachable!("handled above"),
        };
        Ok(Value::Poly(r.map_err(err)?))
    }
}

fn reduce_digits(digits: &str, p: u32) -> u32 {
    digits
        .bytes()
        .fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p as u64) as u32
}

/// Evaluates an expression in `t` with integer coefficients inside `field`;
/// `root(e, k)` takes the unique `p^k`-th root.
pub fn eval_fq(field: &FqField, src: &str) -> Result<FqElem, CliError> {
    let scope = Scope {
        nvars: 0,
        bindings: Default::default(),
        allow_t: true,
    };
    let e = parser::parse(src, &scope).map_err(CliError::Parse)?;
    fq_eval(field, &e)
}

fn fq_eval(field: &FqField, e: &Expr) -> Result<FqElem, CliError> {
    let span = e.span;
    Ok(match &e.kind {
        ExprKind::Int(d) => field.constant(reduce_digits(d, field.p())),
        ExprKind::T => field.generator(),
        ExprKind::Var(_) | ExprKind::Binding(_) => {
            return Err(fail(EvalError::NotInFiniteField(e.to_string()), span))
        }
        ExprKind::Neg(a) => -fq_eval(field, a)?,
        ExprKind::Binary(op, a, b) => {
            let (x, y) = (fq_eval(field, a)?, fq_eval(field, b)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x.div(&y).map_err(at(span))?,
            }
        }
        ExprKind::Pow(a, k) => {
            let x = fq_eval(field, a)?;
            let x = if *k < 0 {
                x.inv().map_err(at(span))?
            } else {
                x
            };
            x.pow(k.unsigned_abs())
        }
        ExprKind::Root(a, k) => {
            let mut x = fq_eval(field, a)?;
            for _ in 0..(*k % field.degree()) {
                x = x.inv_frobenius();
            }
            x
        }
    })
}

fn fq_reply(kind: &str, a: &FqElem) -> Reply {
    Reply::text(kind, a.to_string()).with("coeffs", json!(a.coeffs()))
}

/// `[[exponents...], coeff]` rows for one polynomial, exponents padded to
/// the variable count.
fn terms_json(p: &fpi_core::MultiPoly, nvars: usize) -> Json {
    let rows: Vec<Json> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let exps: Vec<u64> = (0..nvars.max(m.width())).map(|i| m.exponent(i)).collect();
            json!([exps, c])
        })
        .collect();
    Json::Array(rows)
}

pub fn elem_json(e: &PerfElem) -> Json {
    let n = e.body().nvars();
    json!({
        "level": e.level(),
        "num": terms_json(e.body().num(), n),
        "den": terms_json(e.body().den(), n),
        "text": e.to_string(),
    })
}

pub fn poly_json(p: &UniPoly) -> Json {
    let coeffs: Vec<Json> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let mut j = elem_json(c);
            j["degree"] = json!(i);
            j
        })
        .collect();
    json!({ "mode": p.mode().to_string(), "coeffs": coeffs, "text": p.to_string() })
}

fn value_reply(v: Value) -> Reply {
    let text = v.to_string();
    let mut json = match &v {
        Value::Elem(e) => {
            let mut j = elem_json(e);
            j["kind"] = json!("element");
            j
        }
        Value::Poly(p) => {
            let mut j = poly_json(p);
            j["kind"] = json!("polynomial");
            j
        }
    };
    json["schema"] = json!(JSON_SCHEMA);
    Reply { text, json }
}
