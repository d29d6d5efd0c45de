//! Recursive-descent parser for the operator DSL.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' uint)?
//! base   := int | ident | ident '(' expr (',' expr)* ')' | '(' expr ')' | matrix
//! matrix := '[' '[' expr (',' expr)* ']' (',' '[' ... ']')* ']'
//! ```
//!
//! `dx` is the right-acting derivative, `x` the variable, `i` the imaginary
//! unit and `I` the identity. Scalars broadcast to `scalar·I`. Division is
//! allowed only by an invertible order-zero scalar.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{CRat, Field, MatRF, RatFun};
use crate::error::{Error, Result};
use crate::opalg::DiffOp;

/// Names and sizes visible to the parser.
#[derive(Clone, Debug)]
pub struct ParseContext {
    pub params: BTreeMap<String, CRat>,
    /// Size used when a scalar result is lifted to a matrix operator.
    pub size: usize,
    /// Name of the independent variable (`x` for operators, `n` for eigenvalues).
    pub var: String,
}

impl ParseContext {
    pub fn new(size: usize) -> Self {
        ParseContext {
            params: BTreeMap::new(),
            size,
            var: "x".into(),
        }
    }

    pub fn with_param(mut self, name: &str, v: CRat) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn with_params(mut self, ps: &BTreeMap<String, CRat>) -> Self {
        self.params.extend(ps.iter().map(|(k, v)| (k.clone(), v.clone())));
        self
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

/// A parsed value: a broadcastable scalar operator or a shaped one.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(DiffOp),
    Matrix(DiffOp),
}

impl Value {
    fn lift(s: &DiffOp, n: usize) -> DiffOp {
        let terms = s
            .terms()
            .iter()
            .map(|t| MatRF::identity(n).scale(t.get(0, 0)))
            .collect();
        DiffOp::from_terms(n, n, terms)
    }

    /// The value as an operator of the given size.
    pub fn into_op(self, size: usize) -> DiffOp {
        match self {
            Value::Scalar(s) => Value::lift(&s, size),
            Value::Matrix(m) => m,
        }
    }

    fn op(&self) -> &DiffOp {
        match self {
            Value::Scalar(s) | Value::Matrix(s) => s,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a ParseContext,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    (line, col)
}

fn err_at(src: &str, offset: usize, msg: impl Into<String>) -> Error {
    let (line, col) = position(src, offset);
    Error::Parse {
        line,
        col,
        offset,
        msg: msg.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                return Err(err_at(src, i, "decimal literals are not allowed; write p/q"));
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push(Token {
                tok: Tok::Int(n),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        if "+-*/^()[],".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                offset: i,
            });
            i += 1;
            continue;
        }
        let ch = src[i..].chars().next().expect("in range");
        return Err(err_at(src, i, format!("unexpected character {ch:?}")));
    }
    out.push(Token {
        tok: Tok::End,
        offset: src.len(),
    });
    Ok(out)
}

fn scalar_const(c: CRat) -> Value {
    Value::Scalar(DiffOp::from_scalar_coeffs(vec![RatFun::constant(c)]))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn err(&self, offset: usize, msg: impl Into<String>) -> Error {
        err_at(self.src, offset, msg)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            let t = self.peek();
            Err(self.err(t.offset, format!("expected '{c}', found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            let off = self.peek().offset;
            if self.is_sym('+') {
                self.bump();
                let r = self.term()?;
                acc = self.add(acc, r, false, off)?;
            } else if self.is_sym('-') {
                self.bump();
                let r = self.term()?;
                acc = self.add(acc, r, true, off)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            let off = self.peek().offset;
            if self.is_sym('*') {
                self.bump();
                let r = self.unary()?;
                acc = self.mul(acc, r, off)?;
            } else if self.is_sym('/') {
                self.bump();
                let r = self.unary()?;
                acc = self.div(acc, r, off)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if self.is_sym('-') {
            self.bump();
            let v = self.unary()?;
            return Ok(match v {
                Value::Scalar(s) => Value::Scalar(s.neg()),
                Value::Matrix(m) => Value::Matrix(m.neg()),
            });
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Value> {
        let start = self.peek().offset;
        let base = self.base()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        let k = match t.tok {
            Tok::Int(k) => k,
            Tok::Sym('-') => return Err(self.err(t.offset, "negative exponents are not allowed")),
            other => return Err(self.err(t.offset, format!("expected exponent, found {}", describe(&other)))),
        };
        let k: u32 = k
            .try_into()
            .map_err(|_| self.err(t.offset, "exponent too large"))?;
        match base {
            Value::Scalar(s) => Ok(Value::Scalar(s.pow(k))),
            Value::Matrix(m) => {
                if m.rows() != m.cols() {
                    return Err(self.err(start, "power of a non-square matrix"));
                }
                Ok(Value::Matrix(m.pow(k)))
            }
        }
    }

    fn base(&mut self) -> Result<Value> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => Ok(scalar_const(CRat::real(BigRational::from_integer(n)))),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Sym('[') => self.matrix(t.offset),
            Tok::Ident(name) => {
                if self.is_sym('(') {
                    return self.call(&name, t.offset);
                }
                self.ident(&name)
            }
            other => Err(self.err(t.offset, format!("expected expression, found {}", describe(&other)))),
        }
    }

    fn ident(&self, name: &str) -> Result<Value> {
        if name == self.ctx.var {
            return Ok(Value::Scalar(DiffOp::from_scalar_coeffs(vec![RatFun::x()])));
        }
        match name {
            "dx" => Ok(Value::Scalar(DiffOp::dx(1))),
            "i" => Ok(scalar_const(CRat::i())),
            "I" => Ok(scalar_const(CRat::one())),
            _ => match self.ctx.params.get(name) {
                Some(v) => Ok(scalar_const(v.clone())),
                None => Err(Error::UnknownParameter(name.to_string())),
            },
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<Value> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.is_sym(',') {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(')')?;
        match name {
            "diag" => {
                let mut es = Vec::new();
                for a in args {
                    match a {
                        Value::Scalar(s) => es.push(s),
                        Value::Matrix(_) => return Err(self.err(offset, "diag takes scalar arguments")),
                    }
                }
                Ok(Value::Matrix(DiffOp::diag(&es)?))
            }
            _ => Err(self.err(offset, format!("unknown function `{name}`"))),
        }
    }

    fn matrix(&mut self, offset: usize) -> Result<Value> {
        let mut grid: Vec<Vec<DiffOp>> = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = Vec::new();
            loop {
                let off = self.peek().offset;
                match self.expr()? {
                    Value::Scalar(s) => row.push(s),
                    Value::Matrix(_) => return Err(self.err(off, "matrix entries must be scalars")),
                }
                if self.is_sym(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(']')?;
            if let Some(first) = grid.first() {
                if first.len() != row.len() {
                    return Err(self.err(offset, "matrix literal is not rectangular"));
                }
            }
            grid.push(row);
            if self.is_sym(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(']')?;
        Ok(Value::Matrix(DiffOp::from_entries(&grid)?))
    }

    fn add(&self, a: Value, b: Value, sub: bool, off: usize) -> Result<Value> {
        let b = if sub {
            match b {
                Value::Scalar(s) => Value::Scalar(s.neg()),
                Value::Matrix(m) => Value::Matrix(m.neg()),
            }
        } else {
            b
        };
        let shape_err = |l: &DiffOp, r: &DiffOp| {
            self.err(off, format!("cannot add shapes {:?} and {:?}", l.shape(), r.shape()))
        };
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x.add(&y)),
            (Value::Scalar(s), Value::Matrix(m)) | (Value::Matrix(m), Value::Scalar(s)) => {
                if m.rows() != m.cols() {
                    return Err(shape_err(&s, &m));
                }
                Value::Matrix(Value::lift(&s, m.rows()).add(&m))
            }
            (Value::Matrix(x), Value::Matrix(y)) => {
                Value::Matrix(x.try_add(&y).map_err(|_| shape_err(&x, &y))?)
            }
        })
    }

    fn mul(&self, a: Value, b: Value, off: usize) -> Result<Value> {
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x.mul(&y)),
            (Value::Scalar(s), Value::Matrix(m)) => Value::Matrix(Value::lift(&s, m.rows()).mul(&m)),
            (Value::Matrix(m), Value::Scalar(s)) => Value::Matrix(m.mul(&Value::lift(&s, m.cols()))),
            (Value::Matrix(x), Value::Matrix(y)) => Value::Matrix(x.try_mul(&y).map_err(|_| {
                self.err(off, format!("cannot multiply shapes {:?} and {:?}", x.shape(), y.shape()))
            })?),
        })
    }

    fn div(&self, a: Value, b: Value, off: usize) -> Result<Value> {
        let d = b.op();
        if d.shape() != (1, 1) || d.order().is_some_and(|o| o > 0) {
            return Err(self.err(off, "can only divide by an order-zero scalar"));
        }
        let inv = d
            .coeff(0)
            .get(0, 0)
            .recip()
            .map_err(|_| self.err(off, "division by zero"))?;
        let inv = DiffOp::from_scalar_coeffs(vec![inv]);
        self.mul(a, Value::Scalar(inv), off)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parses one expression into a value (scalar or shaped).
pub fn parse_value(src: &str, ctx: &ParseContext) -> Result<Value> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        ctx,
    };
    let v = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(p.err(t.offset, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(v)
}

/// Parses an operator; scalars are lifted to `ctx.size`.
pub fn parse_op(src: &str, ctx: &ParseContext) -> Result<DiffOp> {
    Ok(parse_value(src, ctx)?.into_op(ctx.size))
}

/// Parses an order-zero expression as a matrix of rational functions.
pub fn parse_matrix(src: &str, ctx: &ParseContext) -> Result<MatRF> {
    let d = parse_op(src, ctx)?;
    if d.order().is_some_and(|o| o > 0) {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            offset: 0,
            msg: "expected a matrix without derivatives".into(),
        });
    }
    Ok(d.coeff(0))
}

/// A `.mop` document: `name = expr` lines, `#` comments. A document with a
/// single bare expression stores it under the name `op`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub entries: Vec<(String, String)>,
}

impl Document {
    pub fn parse(src: &str) -> Result<Document> {
        let mut entries = Vec::new();
        let mut bare: Vec<(usize, &str)> = Vec::new();
        for (idx, line) in src.split('\n').enumerate() {
            let text = line.split('#').next().unwrap_or("");
            if text.trim().is_empty() {
                continue;
            }
            match text.split_once('=') {
                Some((name, rhs)) if is_name(name.trim()) => {
                    entries.push((name.trim().to_string(), rhs.trim().to_string()));
                }
                _ => bare.push((idx, text)),
            }
        }
        if !bare.is_empty() {
            if !entries.is_empty() {
                let (idx, _) = bare[0];
                return Err(Error::Parse {
                    line: idx + 1,
                    col: 1,
                    offset: 0,
                    msg: "expected `name = expression`".into(),
                });
            }
            let joined: Vec<&str> = bare.iter().map(|(_, t)| *t).collect();
            entries.push(("op".into(), joined.join("\n")));
        }
        Ok(Document { entries })
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// Entries whose names are not in `skip`, in document order.
    pub fn operators<'s>(&'s self, skip: &'s [&str]) -> impl Iterator<Item = (&'s str, &'s str)> + 's {
        self.entries
            .iter()
            .filter(move |(n, _)| !skip.contains(&n.as_str()))
            .map(|(n, v)| (n.as_str(), v.as_str()))
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_input_offset() {
        match parse_op("dx*(", &ParseContext::new(1)) {
            Err(Error::Parse { offset, line, col, .. }) => {
                assert_eq!((offset, line, col), (4, 1, 5));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn identity_literal() {
        let m = parse_matrix("[[1,0],[0,1]]", &ParseContext::new(2)).unwrap();
        assert_eq!(m, MatRF::identity(2));
    }

    #[test]
    fn rejects_bad_input() {
        let ctx = ParseContext::new(2);
        assert!(matches!(parse_op("[[1,2],[3]]", &ctx), Err(Error::Parse { .. })));
        assert!(matches!(parse_op("x^-1", &ctx), Err(Error::Parse { .. })));
        assert!(matches!(parse_op("b*x", &ctx), Err(Error::UnknownParameter(_))));
        assert!(matches!(parse_op("0.5", &ctx), Err(Error::Parse { .. })));
    }

    #[test]
    fn weyl_relation_in_text() {
        let ctx = ParseContext::new(1);
        let lhs = parse_op("x*dx - dx*x", &ctx).unwrap();
        assert_eq!(lhs, DiffOp::identity(1));
    }

    #[test]
    fn documents() {
        let d = Document::parse("kernel = hermite\n# comment\nD1 = dx^2 + 1\n").unwrap();
        assert_eq!(d.get("kernel"), Some("hermite"));
        assert_eq!(d.operators(&["kernel"]).count(), 1);
        let single = Document::parse("dx^2 - dx*2*x\n").unwrap();
        assert!(single.get("op").is_some());
    }
}
