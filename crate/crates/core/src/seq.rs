//! Closed-form real sequences indexed by `n >= 0`.
//!
//! Sequences are given either as an arithmetic expression in the variable
//! `n`, as a finite list of values with an optional tail expression, or as
//! one of a handful of named weight families that carry exact asymptotic
//! metadata.
//!
//! The expression grammar is deliberately small:
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" power ] ;
//! primary = number | "n" | func "(" expr { "," expr } ")" | "(" expr ")" ;
//! func    = "sqrt" | "exp" | "ln" | "pow" ;
//! ```
//!
//! There is no implicit multiplication, and a negative exponent must be
//! parenthesized (`2^(-n)`, not `2^-n`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{func}` takes {expected} argument(s), found {found} (byte {offset})")]
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
        offset: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("division by zero at n = {n}")]
    DivisionByZero { n: u64 },
    #[error("`{func}` outside its domain at n = {n}")]
    Domain { func: &'static str, n: u64 },
    #[error("non-finite value at n = {n}")]
    NonFinite { n: u64 },
    #[error("index {n} beyond finite list of length {len} with no tail")]
    BeyondList { n: u64, len: usize },
    #[error("invalid named family `{0}`")]
    UnknownFamily(String),
    #[error("invalid sequence: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "pow" => Some(Func::Pow),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Expression tree over the variable `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Var | Expr::Call(..) => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }

    pub fn eval(&self, n: u64) -> Result<f64, SequenceError> {
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Var => n as f64,
            Expr::Neg(e) => -e.eval(n)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(n)?, r.eval(n)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(SequenceError::DivisionByZero { n });
                        }
                        l / r
                    }
                    BinOp::Pow => checked_pow(l, r, "^", n)?,
                }
            }
            Expr::Call(f, args) => {
                let x = args[0].eval(n)?;
                match f {
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(SequenceError::Domain { func: "sqrt", n });
                        }
                        x.sqrt()
                    }
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(SequenceError::Domain { func: "ln", n });
                        }
                        x.ln()
                    }
                    Func::Pow => checked_pow(x, args[1].eval(n)?, "pow", n)?,
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(SequenceError::NonFinite { n })
        }
    }
}

fn checked_pow(base: f64, exp: f64, func: &'static str, n: u64) -> Result<f64, SequenceError> {
    if base == 0.0 && exp < 0.0 {
        return Err(SequenceError::DivisionByZero { n });
    }
    let v = base.powf(exp);
    if v.is_nan() {
        return Err(SequenceError::Domain { func, n });
    }
    Ok(v)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("n"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                child(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Bin(BinOp::Pow, l, r) => {
                child(f, l, l.precedence() <= BinOp::Pow.precedence())?;
                f.write_str("^")?;
                child(f, r, r.precedence() < BinOp::Pow.precedence())
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, r.precedence() <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A parsed expression together with the text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceExpr {
    pub ast: Expr,
    pub source_text: String,
}

impl SequenceExpr {
    pub fn eval(&self, n: u64) -> Result<f64, SequenceError> {
        self.ast.eval(n)
    }
}

impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source_text)
    }
}

impl FromStr for SequenceExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequence_expr(s)
    }
}

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
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let lit = &text[start..i];
                let v = lit
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError::Syntax {
                        offset: start,
                        message: format!("malformed number `{lit}`"),
                    })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                message: format!("expected {}, found {}", describe(&want), describe(self.peek())),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.power()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "n" => Ok(Expr::Var),
            Tok::Ident(name) => {
                let func = Func::from_name(&name)
                    .ok_or(ParseError::UnknownIdentifier { name, offset })?;
                self.expect(Tok::LParen)?;
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                if args.len() != func.arity() {
                    return Err(ParseError::Arity {
                        func: func.name(),
                        expected: func.arity(),
                        found: args.len(),
                        offset,
                    });
                }
                Ok(Expr::Call(func, args))
            }
            other => Err(ParseError::Syntax {
                offset,
                message: format!("expected an operand, found {}", describe(&other)),
            }),
        }
    }
}

pub fn parse_sequence_expr(text: &str) -> Result<SequenceExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            offset: p.offset(),
            message: format!("unexpected {}", describe(p.peek())),
        });
    }
    Ok(SequenceExpr {
        ast,
        source_text: text.to_string(),
    })
}

/// Symbolic value of a limit of a positive sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Zero,
    FinitePositive,
    Infinite,
}

/// Exact asymptotic facts about a positive sequence `x_n`.
///
/// The classes are invariant under `x -> x^2`, so the same record describes
/// `beta_n` and `beta_n^2`. `square_summable` refers to `sum beta_n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub liminf: LimitClass,
    pub limsup: LimitClass,
    pub square_summable: bool,
}

/// `sup beta_n / beta_{n+1}` and `limsup beta_{n+1} / beta_n`, exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRatios {
    pub sup_down: f64,
    pub limsup_up: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedFamily {
    /// `beta_n = 1`
    Hardy,
    /// `beta_n^2 = n + 1`
    Bergman,
    /// `beta_n^2 = 1 / (n + 1)`
    Dirichlet,
    /// `beta_n = (n + 1)^s`
    Power { s: f64 },
    /// `beta_n = r^n`, `r > 0`
    Geometric { r: f64 },
}

impl NamedFamily {
    pub fn beta(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            NamedFamily::Hardy => 1.0,
            NamedFamily::Bergman => (x + 1.0).sqrt(),
            NamedFamily::Dirichlet => 1.0 / (x + 1.0).sqrt(),
            NamedFamily::Power { s } => (x + 1.0).powf(s),
            NamedFamily::Geometric { r } => r.powf(x),
        }
    }

    pub fn beta_squared(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            NamedFamily::Hardy => 1.0,
            NamedFamily::Bergman => x + 1.0,
            NamedFamily::Dirichlet => 1.0 / (x + 1.0),
            NamedFamily::Power { s } => (x + 1.0).powf(2.0 * s),
            NamedFamily::Geometric { r } => r.powf(2.0 * x),
        }
    }

    pub fn asymptotics(&self) -> Asymptotics {
        use LimitClass::*;
        let (class, square_summable) = match *self {
            NamedFamily::Hardy => (FinitePositive, false),
            NamedFamily::Bergman => (Infinite, false),
            NamedFamily::Dirichlet => (Zero, false),
            NamedFamily::Power { s } => {
                let class = if s < 0.0 {
                    Zero
                } else if s == 0.0 {
                    FinitePositive
                } else {
                    Infinite
                };
                (class, 2.0 * s < -1.0)
            }
            NamedFamily::Geometric { r } => {
                let class = if r < 1.0 {
                    Zero
                } else if r == 1.0 {
                    FinitePositive
                } else {
                    Infinite
                };
                (class, r < 1.0)
            }
        };
        Asymptotics {
            liminf: class,
            limsup: class,
            square_summable,
        }
    }

    pub fn shift_ratios(&self) -> ShiftRatios {
        match *self {
            NamedFamily::Hardy | NamedFamily::Bergman => ShiftRatios {
                sup_down: 1.0,
                limsup_up: 1.0,
            },
            NamedFamily::Dirichlet => ShiftRatios {
                sup_down: std::f64::consts::SQRT_2,
                limsup_up: 1.0,
            },
            // (n+1)^s / (n+2)^s is monotone in n; its sup is at n = 0 for s < 0
            // and the limit 1 otherwise.
            NamedFamily::Power { s } => ShiftRatios {
                sup_down: if s < 0.0 { 2f64.powf(-s) } else { 1.0 },
                limsup_up: 1.0,
            },
            NamedFamily::Geometric { r } => ShiftRatios {
                sup_down: 1.0 / r,
                limsup_up: r,
            },
        }
    }
}

impl fmt::Display for NamedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedFamily::Hardy => f.write_str("hardy"),
            NamedFamily::Bergman => f.write_str("bergman"),
            NamedFamily::Dirichlet => f.write_str("dirichlet"),
            NamedFamily::Power { s } => write!(f, "power({s})"),
            NamedFamily::Geometric { r } => write!(f, "geometric({r})"),
        }
    }
}

impl FromStr for NamedFamily {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SequenceError::UnknownFamily(s.to_string());
        let (name, param) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                let v: f64 = inner.trim().parse().map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                (s[..i].trim(), Some(v))
            }
            None => (s, None),
        };
        match (name, param) {
            ("hardy", None) => Ok(NamedFamily::Hardy),
            ("bergman", None) => Ok(NamedFamily::Bergman),
            ("dirichlet", None) => Ok(NamedFamily::Dirichlet),
            ("power", Some(s)) => Ok(NamedFamily::Power { s }),
            ("geometric", Some(r)) if r > 0.0 => Ok(NamedFamily::Geometric { r }),
            _ => Err(bad()),
        }
    }
}

/// A real sequence `x_0, x_1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceSpecRepr", into = "SequenceSpecRepr")]
pub enum SequenceSpec {
    Expr(SequenceExpr),
    List {
        values: Vec<f64>,
        tail: Option<SequenceExpr>,
    },
    Named(NamedFamily),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceSpecRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    named: Option<String>,
}

impl TryFrom<SequenceSpecRepr> for SequenceSpec {
    type Error = SequenceError;

    fn try_from(r: SequenceSpecRepr) -> Result<Self, Self::Error> {
        match (r.expr, r.list, r.tail, r.named) {
            (Some(e), None, None, None) => Ok(SequenceSpec::Expr(parse_sequence_expr(&e)?)),
            (None, Some(values), tail, None) => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(SequenceError::Invalid("list values must be finite".into()));
                }
                let tail = tail.map(|t| parse_sequence_expr(&t)).transpose()?;
                Ok(SequenceSpec::List { values, tail })
            }
            (None, None, None, Some(name)) => Ok(SequenceSpec::Named(name.parse()?)),
            _ => Err(SequenceError::Invalid(
                "exactly one of `expr`, `list` (with optional `tail`), `named` is required".into(),
            )),
        }
    }
}

impl From<SequenceSpec> for SequenceSpecRepr {
    fn from(s: SequenceSpec) -> Self {
        let mut r = SequenceSpecRepr {
            expr: None,
            list: None,
            tail: None,
            named: None,
        };
        match s {
            SequenceSpec::Expr(e) => r.expr = Some(e.source_text),
            SequenceSpec::List { values, tail } => {
                r.list = Some(values);
                r.tail = tail.map(|t| t.source_text);
            }
            SequenceSpec::Named(f) => r.named = Some(f.to_string()),
        }
        r
    }
}

impl FromStr for SequenceSpec {
    type Err = SequenceError;

    /// A family name such as `dirichlet` or `power(-1)`, otherwise an expression.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<NamedFamily>() {
            Ok(f) => Ok(SequenceSpec::Named(f)),
            Err(_) => Ok(SequenceSpec::Expr(parse_sequence_expr(s)?)),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Expr(e) => write!(f, "{e}"),
            SequenceSpec::Named(n) => write!(f, "{n}"),
            SequenceSpec::List { values, tail } => {
                write!(f, "list[{}]", values.len())?;
                if let Some(t) = tail {
                    write!(f, " then {t}")?;
                }
                Ok(())
            }
        }
    }
}

impl SequenceSpec {
    pub fn named(family: NamedFamily) -> Self {
        SequenceSpec::Named(family)
    }

    pub fn expr(text: &str) -> Result<Self, ParseError> {
        Ok(SequenceSpec::Expr(parse_sequence_expr(text)?))
    }

    pub fn asymptotics(&self) -> Option<Asymptotics> {
        match self {
            SequenceSpec::Named(f) => Some(f.asymptotics()),
            _ => None,
        }
    }

    pub fn shift_ratios(&self) -> Option<ShiftRatios> {
        match self {
            SequenceSpec::Named(f) => Some(f.shift_ratios()),
            _ => None,
        }
    }

    /// Number of terms available, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match self {
            SequenceSpec::List { values, tail: None } => Some(values.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `x_n^2`; exact formula for named families.
    pub fn eval_squared(&self, n: u64) -> Result<f64, SequenceError> {
        match self {
            SequenceSpec::Named(f) => Ok(f.beta_squared(n)),
            _ => {
                let v = eval_sequence(self, n)?;
                Ok(v * v)
            }
        }
    }

    /// First `count` terms.
    pub fn values(&self, count: usize) -> Result<Vec<f64>, SequenceError> {
        (0..count as u64).map(|n| eval_sequence(self, n)).collect()
    }

    pub fn squared_values(&self, count: usize) -> Result<Vec<f64>, SequenceError> {
        (0..count as u64).map(|n| self.eval_squared(n)).collect()
    }
}

pub fn eval_sequence(s: &SequenceSpec, n: u64) -> Result<f64, SequenceError> {
    match s {
        SequenceSpec::Expr(e) => e.eval(n),
        SequenceSpec::Named(f) => Ok(f.beta(n)),
        SequenceSpec::List { values, tail } => match values.get(n as usize) {
            Some(v) => Ok(*v),
            None => match tail {
                Some(t) => t.eval(n),
                None => Err(SequenceError::BeyondList {
                    n,
                    len: values.len(),
                }),
            },
        },
    }
}
