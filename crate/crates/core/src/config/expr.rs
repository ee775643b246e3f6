//! Analytic expressions for boundary, load and initial data.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | variable | constant | function '(' sum ')' | '(' sum ')'
//! ```
//!
//! Variables are `x`, `y`, `z`, `t` and `f`; the only constant is `pi`;
//! functions are `sin cos tan exp sqrt abs`.

use std::fmt;

use thiserror::Error;

/// Parse failure, located by character offset into the source.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at offset {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

/// Evaluation failure (domain error or non-finite result).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at {bindings}")]
pub struct EvalError {
    pub message: String,
    pub bindings: Variables,
}

/// Values of the free variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Variables {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
    pub f: f64,
}

impl Variables {
    pub fn new(point: [f64; 3], t: f64, f: f64) -> Self {
        Variables {
            x: point[0],
            y: point[1],
            z: point[2],
            t,
            f,
        }
    }
}

impl fmt::Display for Variables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={}, y={}, z={}, t={}, f={}",
            self.x, self.y, self.z, self.t, self.f
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    X,
    Y,
    Z,
    T,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Sqrt,
    Abs,
}

impl Function {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "tan" => Function::Tan,
            "exp" => Function::Exp,
            "sqrt" => Function::Sqrt,
            "abs" => Function::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Syntax tree of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Number(f64),
    Variable(Variable),
    Negate(Box<Ast>),
    Binary(BinaryOp, Box<Ast>, Box<Ast>),
    Call(Function, Box<Ast>),
}

/// A compiled expression. Equality compares source text.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    ast: Ast,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        parse_expression(text)
    }

    pub fn constant(value: f64) -> Self {
        Expression {
            source: format!("{value:?}"),
            ast: Ast::Number(value),
        }
    }

    pub fn zero() -> Self {
        Expression {
            source: "0".into(),
            ast: Ast::Number(0.0),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn evaluate(&self, vars: &Variables) -> Result<f64, EvalError> {
        evaluate_expression(self, vars)
    }

    /// Convenience wrapper for spatial data at fixed `t` and `f`.
    pub fn at(&self, point: [f64; 3], t: f64, f: f64) -> Result<f64, EvalError> {
        self.evaluate(&Variables::new(point, t, f))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn describe(token: &Token) -> String {
    match token {
        Token::Number(v) => format!("number {v}"),
        Token::Ident(s) => format!("`{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((start, tok));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal.parse::<f64>().map_err(|_| ExprError {
                offset: start,
                message: format!("invalid number `{literal}`"),
            })?;
            tokens.push((start, Token::Number(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else {
            return Err(ExprError {
                offset: start,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn sum(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinaryOp::Mul,
                Some(Token::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Ast::Negate(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Ast::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.peek() {
            Some(Token::RParen) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let t = describe(t);
                self.error(format!("expected `)`, found {t}"))
            }
            None => self.error("unbalanced parentheses: expected `)`"),
        }
    }

    fn primary(&mut self) -> Result<Ast, ExprError> {
        let Some(token) = self.peek().cloned() else {
            return self.error("expected an operand, found end of input");
        };
        let start = self.offset();
        match token {
            Token::Number(v) => {
                self.pos += 1;
                Ok(Ast::Number(v))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.pos += 1;
                if let Some(func) = Function::from_name(&name) {
                    if self.peek() != Some(&Token::LParen) {
                        return self.error(format!("function `{name}` needs a parenthesized argument"));
                    }
                    self.pos += 1;
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Ast::Call(func, Box::new(arg)));
                }
                let var = match name.as_str() {
                    "x" => Ast::Variable(Variable::X),
                    "y" => Ast::Variable(Variable::Y),
                    "z" => Ast::Variable(Variable::Z),
                    "t" => Ast::Variable(Variable::T),
                    "f" => Ast::Variable(Variable::F),
                    "pi" => Ast::Number(std::f64::consts::PI),
                    _ => {
                        return Err(ExprError {
                            offset: start,
                            message: format!(
                                "unknown identifier `{name}` (variables: x, y, z, t, f; constant: pi; functions: sin, cos, tan, exp, sqrt, abs)"
                            ),
                        })
                    }
                };
                Ok(var)
            }
            other => self.error(format!("expected an operand, found {}", describe(&other))),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Expression, ExprError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ExprError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let ast = parser.sum()?;
    if let Some(t) = parser.peek() {
        let what = if *t == Token::RParen {
            "unbalanced parentheses: unexpected `)`".to_string()
        } else {
            format!("unexpected {} after complete expression", describe(t))
        };
        return parser.error(what);
    }
    Ok(Expression {
        source: text.to_string(),
        ast,
    })
}

fn eval(node: &Ast, vars: &Variables) -> Result<f64, EvalError> {
    let fail = |message: String| EvalError {
        message,
        bindings: *vars,
    };
    let value = match node {
        Ast::Number(v) => *v,
        Ast::Variable(v) => match v {
            Variable::X => vars.x,
            Variable::Y => vars.y,
            Variable::Z => vars.z,
            Variable::T => vars.t,
            Variable::F => vars.f,
        },
        Ast::Negate(inner) => -eval(inner, vars)?,
        Ast::Binary(op, a, b) => {
            let a = eval(a, vars)?;
            let b = eval(b, vars)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == 0.0 {
                        return Err(fail(format!("division by zero ({a} / 0)")));
                    }
                    a / b
                }
                BinaryOp::Pow => a.powf(b),
            }
        }
        Ast::Call(func, arg) => {
            let a = eval(arg, vars)?;
            match func {
                Function::Sin => a.sin(),
                Function::Cos => a.cos(),
                Function::Tan => a.tan(),
                Function::Exp => a.exp(),
                Function::Sqrt => {
                    if a < 0.0 {
                        return Err(fail(format!("sqrt of negative argument {a}")));
                    }
                    a.sqrt()
                }
                Function::Abs => a.abs(),
            }
        }
    };
    if !value.is_finite() {
        return Err(fail(format!("non-finite intermediate result {value}")));
    }
    Ok(value)
}

pub fn evaluate_expression(expression: &Expression, vars: &Variables) -> Result<f64, EvalError> {
    eval(&expression.ast, vars)
}
