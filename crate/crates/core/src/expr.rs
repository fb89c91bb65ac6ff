//! A small complex-valued expression language for boundary data and test fields.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? INT ('^' exponent)?          right associative, folded to one integer
//! primary := NUMBER | 'i' | VAR | FUNC '(' expr ')' | VFUNC '(' VECTOR ')' | '(' expr ')'
//! ```
//!
//! `VAR` is the variable letter followed by a 1-based index (`x1`, `z3`); the
//! bare letter names the whole vector and is only accepted by `abs2` (bilinear
//! `Σ x_j²`) and `normH` (Hermitian norm).

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::{csqrt_principal, ComplexVec};
use crate::poly::{FieldFunction, MultiPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    fn cover(self, other: Span) -> Span {
        Span { len: (other.offset + other.len).saturating_sub(self.offset), ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {column}: found {found}, expected one of: {}", expected.join(", "))]
    Syntax { line: usize, column: usize, found: String, expected: Vec<String> },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier { name: String, line: usize, column: usize },
    #[error("variable `{name}` at line {line}, column {column} is out of range for dimension {dim}")]
    VariableOutOfRange { name: String, dim: usize, line: usize, column: usize },
    #[error("invalid exponent at line {line}, column {column}: {reason}")]
    InvalidExponent { line: usize, column: usize, reason: String },
    #[error("division by zero in `{expr}` at line {line}, column {column}")]
    DivisionByZero { expr: String, line: usize, column: usize },
    #[error("expression has dimension {expected}, point has dimension {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("`{expr}` at line {line}, column {column} is not a polynomial")]
    NotPolynomial { expr: String, line: usize, column: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorFunc {
    /// `Σ x_j²` (bilinear, no conjugation).
    Abs2,
    /// `(Σ |x_j|²)^{1/2}`.
    NormH,
}

impl Func {
    const ALL: [(&'static str, Func); 6] =
        [("exp", Func::Exp), ("sin", Func::Sin), ("cos", Func::Cos), ("sqrt", Func::Sqrt), ("re", Func::Re), ("im", Func::Im)];

    fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).expect("listed")
    }
}

impl VectorFunc {
    fn name(self) -> &'static str {
        match self {
            VectorFunc::Abs2 => "abs2",
            VectorFunc::NormH => "normH",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Lit(Complex64),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    VectorCall(VectorFunc),
}

/// A node with its source location. Equality ignores locations.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

/// A parsed expression over variables `<letter>1 .. <letter>n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    root: Expr,
    dim: usize,
    variable: char,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(source: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<(usize, char)> = source.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let (offset, ch) = chars[i];
        let start = Span { line, column: col, offset, len: 0 };
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let begin = i;
        let tok = if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|(_, c)| c.is_ascii_digit())) {
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = chars.get(i).map_or(source.len(), |(o, _)| *o);
            let text = &source[offset..end];
            let value = text.parse::<f64>().map_err(|_| ExprError::Syntax {
                line,
                column: col,
                found: format!("`{text}`"),
                expected: vec!["number".into()],
            })?;
            Tok::Num(value)
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(source.len(), |(o, _)| *o);
            Tok::Ident(source[offset..end].to_string())
        } else if "+-*/^(),".contains(ch) {
            i += 1;
            Tok::Op(ch)
        } else {
            return Err(ExprError::Syntax {
                line,
                column: col,
                found: format!("`{ch}`"),
                expected: vec!["number".into(), "identifier".into(), "operator".into()],
            });
        };
        let end = chars.get(i).map_or(source.len(), |(o, _)| *o);
        col += i - begin;
        out.push(Token { tok, span: Span { len: end - offset, ..start } });
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, column: col, offset: source.len(), len: 0 } });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    variable: char,
    source: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, expected: &[&str]) -> Result<T, ExprError> {
        let t = self.peek();
        Err(ExprError::Syntax {
            line: t.span.line,
            column: t.span.column,
            found: describe(&t.tok),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect_op(&mut self, op: char) -> Result<Token, ExprError> {
        if self.peek().tok == Tok::Op(op) {
            Ok(self.bump())
        } else {
            self.syntax(&[&format!("`{op}`")])
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.peek().tok {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            let span = lhs.span.cover(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.peek().tok {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            let span = lhs.span.cover(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Op('-') {
            let minus = self.bump();
            let inner = self.unary()?;
            let span = minus.span.cover(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let (k, end) = self.exponent()?;
        let span = base.span.cover(end);
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), span })
    }

    fn exponent(&mut self) -> Result<(i32, Span), ExprError> {
        let start = self.peek().span;
        let negative = if self.peek().tok == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.peek().clone();
        let Tok::Num(v) = tok.tok else {
            return self.syntax(&["integer exponent"]);
        };
        if v.fract() != 0.0 || v > i32::MAX as f64 || self.source[tok.span.offset..tok.span.offset + tok.span.len].contains(['.', 'e', 'E']) {
            return Err(ExprError::InvalidExponent {
                line: tok.span.line,
                column: tok.span.column,
                reason: "exponent must be an integer literal".into(),
            });
        }
        self.bump();
        let mut value = if negative { -(v as i64) } else { v as i64 };
        let mut end = tok.span;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let (inner, inner_end) = self.exponent()?;
            end = inner_end;
            if inner < 0 {
                return Err(ExprError::InvalidExponent {
                    line: start.line,
                    column: start.column,
                    reason: "stacked exponent must be a nonnegative integer".into(),
                });
            }
            value = value.checked_pow(inner as u32).filter(|v| i32::try_from(*v).is_ok()).ok_or_else(|| ExprError::InvalidExponent {
                line: start.line,
                column: start.column,
                reason: "exponent overflows".into(),
            })?;
        }
        let value = i32::try_from(value).map_err(|_| ExprError::InvalidExponent {
            line: start.line,
            column: start.column,
            reason: "exponent overflows".into(),
        })?;
        Ok((value, start.cover(end)))
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Lit(Complex64::new(v, 0.0)), span: tok.span })
            }
            Tok::Op('(') => {
                self.bump();
                let inner = self.expr()?;
                let close = self.expect_op(')')?;
                Ok(Expr { span: tok.span.cover(close.span), ..inner })
            }
            Tok::Ident(ref name) => {
                self.bump();
                self.identifier(name, tok.span)
            }
            _ => self.syntax(&["number", "`i`", "variable", "function", "`(`", "`-`"]),
        }
    }

    fn identifier(&mut self, name: &str, span: Span) -> Result<Expr, ExprError> {
        if name == "i" {
            return Ok(Expr { kind: ExprKind::Lit(Complex64::new(0.0, 1.0)), span });
        }
        if let Some((_, f)) = Func::ALL.iter().find(|(n, _)| *n == name) {
            self.expect_op('(')?;
            let arg = self.expr()?;
            let close = self.expect_op(')')?;
            return Ok(Expr { kind: ExprKind::Call(*f, Box::new(arg)), span: span.cover(close.span) });
        }
        let vector_func = match name {
            "abs2" => Some(VectorFunc::Abs2),
            "normH" => Some(VectorFunc::NormH),
            _ => None,
        };
        if let Some(vf) = vector_func {
            self.expect_op('(')?;
            let arg = self.peek().clone();
            if arg.tok != Tok::Ident(self.variable.to_string()) {
                return self.syntax(&[&format!("`{}`", self.variable)]);
            }
            self.bump();
            let close = self.expect_op(')')?;
            return Ok(Expr { kind: ExprKind::VectorCall(vf), span: span.cover(close.span) });
        }
        let mut chars = name.chars();
        if chars.next() == Some(self.variable) {
            let digits = chars.as_str();
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return match digits.parse::<usize>() {
                    Ok(j) if (1..=self.dim).contains(&j) => Ok(Expr { kind: ExprKind::Var(j - 1), span }),
                    _ => Err(ExprError::VariableOutOfRange {
                        name: name.to_string(),
                        dim: self.dim,
                        line: span.line,
                        column: span.column,
                    }),
                };
            }
        }
        Err(ExprError::UnknownIdentifier { name: name.to_string(), line: span.line, column: span.column })
    }
}

/// Parses an expression over `x1..xn`.
pub fn parse(source: &str, dim: usize) -> Result<ExprAst, ExprError> {
    parse_with_variable(source, dim, 'x')
}

/// Parses an expression whose variables are `<variable>1..<variable>n`.
pub fn parse_with_variable(source: &str, dim: usize, variable: char) -> Result<ExprAst, ExprError> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0, dim, variable, source };
    let root = parser.expr()?;
    if parser.peek().tok != Tok::Eof {
        return parser.syntax(&["operator", "end of input"]);
    }
    Ok(ExprAst { root, dim, variable })
}

struct Printer<'a> {
    expr: &'a Expr,
    variable: char,
}

impl<'a> fmt::Display for Printer<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expr: &'a Expr = self.expr;
        let variable = self.variable;
        let sub = |e: &'a Expr| Printer { expr: e, variable };
        match &expr.kind {
            ExprKind::Lit(c) if c.im == 0.0 && c.re >= 0.0 => write!(f, "{}", c.re),
            ExprKind::Lit(c) if *c == Complex64::new(0.0, 1.0) => write!(f, "i"),
            ExprKind::Lit(c) => write!(f, "({} + {}*i)", c.re, c.im),
            ExprKind::Var(j) => write!(f, "{}{}", self.variable, j + 1),
            ExprKind::Neg(a) => write!(f, "(-{})", sub(a)),
            ExprKind::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
            ExprKind::Pow(a, k) => write!(f, "({})^{}", sub(a), k),
            ExprKind::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
            ExprKind::VectorCall(vf) => write!(f, "{}({})", vf.name(), self.variable),
        }
    }
}

impl fmt::Display for ExprAst {
    /// Canonical, fully parenthesized form; parsing it yields an equal AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Printer { expr: &self.root, variable: self.variable })
    }
}

impl ExprAst {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variable(&self) -> char {
        self.variable
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    fn render(&self, e: &Expr) -> String {
        Printer { expr: e, variable: self.variable }.to_string()
    }

    pub fn eval(&self, point: &ComplexVec) -> Result<Complex64, ExprError> {
        if point.dim() != self.dim {
            return Err(ExprError::DimensionMismatch { expected: self.dim, found: point.dim() });
        }
        self.eval_node(&self.root, point.entries())
    }

    fn eval_node(&self, e: &Expr, z: &[Complex64]) -> Result<Complex64, ExprError> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match &e.kind {
            ExprKind::Lit(c) => *c,
            ExprKind::Var(j) => z[*j],
            ExprKind::Neg(a) => -self.eval_node(a, z)?,
            ExprKind::Binary(op, a, b) => {
                let (u, v) = (self.eval_node(a, z)?, self.eval_node(b, z)?);
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v == zero {
                            return Err(self.division_by_zero(e));
                        }
                        u / v
                    }
                }
            }
            ExprKind::Pow(a, k) => {
                let u = self.eval_node(a, z)?;
                if *k < 0 && u == zero {
                    return Err(self.division_by_zero(e));
                }
                u.powi(*k)
            }
            ExprKind::Call(func, a) => {
                let u = self.eval_node(a, z)?;
                match func {
                    Func::Exp => u.exp(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Sqrt => csqrt_principal(u),
                    Func::Re => Complex64::new(u.re, 0.0),
                    Func::Im => Complex64::new(u.im, 0.0),
                }
            }
            ExprKind::VectorCall(VectorFunc::Abs2) => z.iter().map(|v| v * v).sum(),
            ExprKind::VectorCall(VectorFunc::NormH) => Complex64::new(z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(), 0.0),
        })
    }

    fn division_by_zero(&self, e: &Expr) -> ExprError {
        ExprError::DivisionByZero { expr: self.render(e), line: e.span.line, column: e.span.column }
    }

    /// Converts to an exact polynomial; fails on transcendental functions,
    /// negative powers and division by a nonconstant.
    pub fn to_poly(&self) -> Result<MultiPoly, ExprError> {
        self.poly_node(&self.root)
    }

    fn poly_node(&self, e: &Expr) -> Result<MultiPoly, ExprError> {
        let n = self.dim;
        let not_poly = || ExprError::NotPolynomial { expr: self.render(e), line: e.span.line, column: e.span.column };
        Ok(match &e.kind {
            ExprKind::Lit(c) => MultiPoly::constant(n, *c),
            ExprKind::Var(j) => MultiPoly::variable(n, *j),
            ExprKind::Neg(a) => -&self.poly_node(a)?,
            ExprKind::Binary(op, a, b) => {
                let (u, v) = (self.poly_node(a)?, self.poly_node(b)?);
                match op {
                    BinOp::Add => &u + &v,
                    BinOp::Sub => &u - &v,
                    BinOp::Mul => &u * &v,
                    BinOp::Div => match v.degree() {
                        None => return Err(self.division_by_zero(e)),
                        Some(0) => u.scale(v.coefficient(&vec![0; n]).inv()),
                        Some(_) => return Err(not_poly()),
                    },
                }
            }
            ExprKind::Pow(a, k) if *k >= 0 => self.poly_node(a)?.pow(*k as u32),
            ExprKind::VectorCall(VectorFunc::Abs2) => MultiPoly::abs2(n),
            _ => return Err(not_poly()),
        })
    }

    pub fn to_field(&self) -> FieldFunction {
        let ast = self.clone();
        FieldFunction::new(self.dim, move |z| ast.eval(z).map_err(Into::into))
    }
}
