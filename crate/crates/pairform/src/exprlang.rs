//! A small closed-form scalar expression language for user-supplied
//! functions (`f`, `F`, `g`, `h`, potentials) on the command line.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?          // '^' is right-associative
//! base   := number | var | func '(' expr ')' | 'pi' '(' ')'
//!         | '(' expr ')' | '-' base
//! ```
//!
//! Variables are `x`, `y`, `z` and `x1`..`x9`; functions are `sin`, `cos`,
//! `exp`, `log`, `sqrt`, `abs`, `tanh`, and the constant `pi()`. Both the
//! ASCII hyphen and the Unicode minus sign are accepted. Evaluation is plain
//! IEEE-754 arithmetic: domain violations (log of a nonpositive value, etc.)
//! produce NaN or infinities and set a diagnostic flag rather than aborting.
//! Printing is fully parenthesized, so `parse ∘ print` is the identity on
//! syntax trees.

use std::fmt;

use thiserror::Error;

/// Parse failure with the byte offset and the token classes that would have
/// been accepted there.
#[derive(Debug, Error, PartialEq)]
#[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

/// Evaluation failure: a variable the bindings do not cover.
#[derive(Debug, Error, PartialEq)]
#[error("unbound variable {0}")]
pub struct UnboundVariable(pub String);

/// IEEE incidents observed during evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalFlags {
    /// A function left its domain (log of nonpositive, sqrt of negative, 0/0).
    pub domain: bool,
    /// Division of a nonzero value by zero (IEEE infinity).
    pub division_by_zero: bool,
}

impl EvalFlags {
    pub fn clean(&self) -> bool {
        !self.domain && !self.division_by_zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    /// `x1` .. `x9`
    Indexed(u8),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y => write!(f, "y"),
            Var::Z => write!(f, "z"),
            Var::Indexed(i) => write!(f, "x{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(&self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }

    fn apply(&self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
            Func::Tanh => v.tanh(),
        }
    }
}

/// Abstract syntax tree of an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Pi => write!(f, "pi()"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Values for the variables an expression may reference.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    indexed: [Option<f64>; 9],
}

impl Bindings {
    /// Binds `x` (and its alias `x1`) for one-variable functions.
    pub fn scalar(x: f64) -> Self {
        let mut b = Bindings::default();
        b.x = Some(x);
        b.indexed[0] = Some(x);
        b
    }

    /// Binds `x1..xd` to the coordinates, with `x`, `y`, `z` aliasing the
    /// first three.
    pub fn point(coords: &[f64]) -> Self {
        let mut b = Bindings::default();
        for (i, &c) in coords.iter().take(9).enumerate() {
            b.indexed[i] = Some(c);
        }
        b.x = coords.first().copied();
        b.y = coords.get(1).copied();
        b.z = coords.get(2).copied();
        b
    }

    fn get(&self, var: Var) -> Option<f64> {
        match var {
            Var::X => self.x,
            Var::Y => self.y,
            Var::Z => self.z,
            Var::Indexed(i) => self.indexed[(i - 1) as usize],
        }
    }
}

impl Expr {
    /// Parses the grammar above.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut parser = Parser {
            tokens: lex(text)?,
            pos: 0,
        };
        let expr = parser.expr()?;
        match parser.peek() {
            Token::End => Ok(expr),
            tok => Err(ParseError {
                offset: parser.offset(),
                found: tok.describe(),
                expected: vec!["operator", "end of input"],
            }),
        }
    }

    /// Evaluates with IEEE semantics, recording domain incidents.
    pub fn evaluate_flagged(&self, b: &Bindings) -> Result<(f64, EvalFlags), UnboundVariable> {
        let mut flags = EvalFlags::default();
        let v = self.eval_inner(b, &mut flags)?;
        if v.is_nan() {
            flags.domain = true;
        }
        Ok((v, flags))
    }

    /// Evaluates, discarding the diagnostic flags.
    pub fn evaluate(&self, b: &Bindings) -> Result<f64, UnboundVariable> {
        Ok(self.evaluate_flagged(b)?.0)
    }

    fn eval_inner(&self, b: &Bindings, flags: &mut EvalFlags) -> Result<f64, UnboundVariable> {
        match self {
            Expr::Number(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Var(var) => b.get(*var).ok_or_else(|| UnboundVariable(var.to_string())),
            Expr::Neg(inner) => Ok(-inner.eval_inner(b, flags)?),
            Expr::Call { func, arg } => {
                let v = arg.eval_inner(b, flags)?;
                let out = func.apply(v);
                if out.is_nan() && !v.is_nan() {
                    flags.domain = true;
                }
                if matches!(func, Func::Log) && out == f64::NEG_INFINITY {
                    flags.domain = true;
                }
                Ok(out)
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = lhs.eval_inner(b, flags)?;
                let r = rhs.eval_inner(b, flags)?;
                let out = match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        let q = l / r;
                        if r == 0.0 && l != 0.0 {
                            flags.division_by_zero = true;
                        }
                        if r == 0.0 && l == 0.0 {
                            flags.domain = true;
                        }
                        q
                    }
                    BinOp::Pow => {
                        let p = l.powf(r);
                        if p.is_nan() && !l.is_nan() && !r.is_nan() {
                            flags.domain = true;
                        }
                        p
                    }
                };
                Ok(out)
            }
        }
    }

    /// Free variables, in no particular order.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Call { arg, .. } => arg.collect_vars(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            _ => {}
        }
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
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let bytes = text.char_indices().collect::<Vec<_>>();
    let mut i = 0;
    while i < bytes.len() {
        let (offset, c) = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((offset, Token::Plus));
                i += 1;
            }
            // U+2212 is the Unicode minus sign
            '-' | '\u{2212}' => {
                tokens.push((offset, Token::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((offset, Token::Star));
                i += 1;
            }
            '/' => {
                tokens.push((offset, Token::Slash));
                i += 1;
            }
            '^' => {
                tokens.push((offset, Token::Caret));
                i += 1;
            }
            '(' => {
                tokens.push((offset, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((offset, Token::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && matches!(bytes[i].1, '0'..='9' | '.') {
                    i += 1;
                }
                // optional exponent
                if i < bytes.len() && matches!(bytes[i].1, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j].1, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].1.is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let end = if i < bytes.len() { bytes[i].0 } else { text.len() };
                let slice = &text[offset..end];
                let value: f64 = slice.parse().map_err(|_| ParseError {
                    offset,
                    found: format!("'{slice}'"),
                    expected: vec!["number"],
                })?;
                tokens.push((offset, Token::Number(value)));
            }
            c if c.is_ascii_alphabetic() => {
                let start_off = offset;
                let mut name = String::new();
                while i < bytes.len() && (bytes[i].1.is_ascii_alphanumeric()) {
                    name.push(bytes[i].1);
                    i += 1;
                }
                tokens.push((start_off, Token::Ident(name)));
            }
            other => {
                return Err(ParseError {
                    offset,
                    found: format!("'{other}'"),
                    expected: vec!["number", "identifier", "operator", "'('"],
                })
            }
        }
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if matches!(self.peek(), Token::Caret) {
            self.advance();
            let exponent = self.factor()?; // right-associative
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Token::RParen) {
            self.advance();
            Ok(())
        } else {
            Err(ParseError {
                offset: self.offset(),
                found: self.peek().describe(),
                expected: vec!["')'"],
            })
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.advance() {
            Token::Number(v) => Ok(Expr::Number(v)),
            Token::Minus => Ok(Expr::Neg(Box::new(self.base()?))),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => self.ident(offset, name),
            tok => Err(ParseError {
                offset,
                found: tok.describe(),
                expected: vec!["number", "variable", "function call", "'('", "'-'"],
            }),
        }
    }

    fn ident(&mut self, offset: usize, name: String) -> Result<Expr, ParseError> {
        let func = match name.as_str() {
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            "z" => return Ok(Expr::Var(Var::Z)),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            "tanh" => Some(Func::Tanh),
            "pi" => None,
            other => {
                if let Some(rest) = other.strip_prefix('x') {
                    if let Ok(i) = rest.parse::<u8>() {
                        if (1..=9).contains(&i) {
                            return Ok(Expr::Var(Var::Indexed(i)));
                        }
                    }
                }
                return Err(ParseError {
                    offset,
                    found: format!("identifier '{other}'"),
                    expected: vec!["variable x|y|z|x1..x9", "function", "pi()"],
                });
            }
        };
        // function application or the pi() constant
        if !matches!(self.peek(), Token::LParen) {
            return Err(ParseError {
                offset: self.offset(),
                found: self.peek().describe(),
                expected: vec!["'('"],
            });
        }
        self.advance();
        match func {
            None => {
                self.expect_rparen()?;
                Ok(Expr::Pi)
            }
            Some(f) => {
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call {
                    func: f,
                    arg: Box::new(arg),
                })
            }
        }
    }
}
