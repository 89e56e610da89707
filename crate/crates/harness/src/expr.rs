//! A small arithmetic expression language for scenario files.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' power)?          exponent must be a nonnegative integer literal
//! atom    := number | variable | func '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! Variables are `x`, `y`, `s`, `t`, `u` and `v`; functions are `exp`, `abs`
//! (one argument) and `min`, `max` (two arguments).

use std::fmt;

use thiserror::Error;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    S,
    T,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X, Var::Y, Var::S, Var::T, Var::U, Var::V];

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "x" => Var::X,
            "y" => Var::Y,
            "s" => Var::S,
            "t" => Var::T,
            "u" => Var::U,
            "v" => Var::V,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::S => "s",
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Exp | Func::Abs => 1,
            Func::Min | Func::Max => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Whether `var` occurs anywhere in the tree.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Pow(e, _) => e.uses(var),
            Expr::Binary(_, a, b) => a.uses(var) || b.uses(var),
            Expr::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }

    pub fn free_vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.uses(v)).collect()
    }

    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(n) => *n,
            Expr::Var(v) => env.get(*v).ok_or(EvalError::Unbound(*v))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(e, k) => e.eval(env)?.powi(*k as i32),
            Expr::Call(f, args) => {
                let a = args[0].eval(env)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(env)?),
                    Func::Max => a.max(args[1].eval(env)?),
                }
            }
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        // ctx: 0 top, 1 sum, 2 product, 3 unary, 4 power base
        match self {
            Expr::Num(n) => {
                if *n < 0.0 || (*n == 0.0 && n.is_sign_negative()) {
                    write!(f, "({n})")
                } else {
                    write!(f, "{n}")
                }
            }
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => {
                let wrap = ctx >= 4;
                if wrap {
                    f.write_str("(")?;
                }
                f.write_str("-")?;
                e.fmt_prec(f, 3)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let wrap = ctx > p;
                if wrap {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // left associative: a right operand of equal precedence needs parentheses
                b.fmt_prec(f, p + 1)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Pow(e, k) => {
                let wrap = ctx >= 4;
                if wrap {
                    f.write_str("(")?;
                }
                e.fmt_prec(f, 4)?;
                write!(f, "^{k}")?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Variable bindings for [`Expr::eval`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    slots: [Option<f64>; 6],
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.slots[var.slot()] = Some(value);
        self
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Self::new().with(Var::X, x).with(Var::Y, y)
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.slots[var.slot()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{}` is not bound", .0.name())]
    Unbound(Var),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("exponent must be a nonnegative integer literal")]
    BadExponent,
    #[error("`{func}` takes {expected} argument(s), got {got}")]
    Arity {
        func: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("expression nested too deeply")]
    TooDeep,
}

/// A parse failure at a byte offset of the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("{c:?}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                pos += 1;
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut look = pos + 1;
                if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                    look += 1;
                }
                if look < bytes.len() && bytes[look].is_ascii_digit() {
                    pos = look;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
            }
            let text = &src[start..pos];
            match text.parse::<f64>() {
                Ok(n) if n.is_finite() => out.push((start, Tok::Num(n))),
                _ => {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::BadNumber(text.to_owned()),
                    })
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((start, Tok::Ident(src[start..pos].to_owned())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((pos, Tok::Op(c as char)));
            pos += 1;
        } else {
            let ch = src[pos..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: pos,
                kind: ParseErrorKind::UnexpectedChar(ch),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd(expected)),
            Some(t) => self.err(ParseErrorKind::Unexpected {
                found: t.describe(),
                expected,
            }),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char, expected: &'static str) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            self.descend()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        if self.peek() == Some(&Tok::Op('-')) {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::BadExponent,
            });
        }
        self.descend()?;
        let exponent = self.power()?;
        self.depth -= 1;
        match exponent {
            Expr::Num(n) if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => {
                Ok(Expr::Pow(Box::new(base), n as u32))
            }
            _ => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::BadExponent,
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')', "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Expr::Var(v));
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    });
                };
                self.expect('(', "'(' after function name")?;
                let mut args = vec![self.sum()?];
                while self.eat(',') {
                    args.push(self.sum()?);
                }
                self.expect(')', "',' or ')'")?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::Arity {
                            func: func.name(),
                            expected: func.arity(),
                            got: args.len(),
                        },
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.unexpected("a number, variable, function or '('")),
        }
    }
}

/// Parses `source` into an expression tree.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: source.len(),
        depth: 0,
    };
    let e = parser.sum()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.unexpected("end of input or an operator"));
    }
    Ok(e)
}
