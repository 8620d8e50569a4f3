//! Arithmetic expressions used to define parameter fields.
//!
//! Grammar (see `docs/expression-grammar.md`):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | ident [ "(" expr { "," expr } ")" ] | "(" expr ")" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`, and it is
//! right-associative.

mod parser;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

pub use parser::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Built-in functions. The set is closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Exp,
    Ln,
    Abs,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sqrt,
        Func::Exp,
        Func::Ln,
        Func::Abs,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// `min` and `max` take two or more arguments, the rest exactly one.
    fn accepts(self, n: usize) -> bool {
        match self {
            Func::Min | Func::Max => n >= 2,
            _ => n == 1,
        }
    }
}

/// Named constants. These are never free variables.
pub const CONSTANTS: [(&str, f64); 2] = [("pi", core::f64::consts::PI), ("e", core::f64::consts::E)];

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Const(&'static str, f64),
    Var(String),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    InvalidNumber,
    UnknownFunction(String),
    /// A function name used without an argument list.
    MissingArguments(String),
    WrongArity { func: &'static str, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'")?,
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of expression")?,
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected '{t}'")?,
            ParseErrorKind::InvalidNumber => write!(f, "malformed number")?,
            ParseErrorKind::UnknownFunction(n) => write!(f, "unknown function '{n}'")?,
            ParseErrorKind::MissingArguments(n) => write!(f, "function '{n}' needs an argument list")?,
            ParseErrorKind::WrongArity { func, got } => {
                write!(f, "function '{func}' cannot take {got} argument(s)")?
            }
        }
        write!(f, " at offset {}", self.offset)
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    UnboundVariable(String),
    /// A builtin was called outside its domain, or an operation produced a
    /// non-finite value.
    Domain { op: &'static str, detail: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundVariable(v) => write!(f, "unbound variable '{v}'"),
            EvalError::Domain { op, detail } => write!(f, "domain error in {op}: {detail}"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Variable bindings for evaluation.
pub trait Scope {
    fn lookup(&self, name: &str) -> Option<f64>;
}

impl Scope for BTreeMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Scope for BTreeMap<&str, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Scope for [(&str, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<const N: usize> Scope for [(&str, f64); N] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

impl<S: Scope + ?Sized> Scope for &S {
    fn lookup(&self, name: &str) -> Option<f64> {
        (**self).lookup(name)
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        parse(source)
    }

    /// Expression that always evaluates to `value`.
    pub fn constant(value: f64) -> Expr {
        let root = Node::Num(value);
        let source = alloc::format!("{}", Display(&root));
        Expr { root, source }
    }

    pub(crate) fn from_parts(root: Node, source: String) -> Expr {
        Expr { root, source }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Text the expression was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn evaluate<S: Scope + ?Sized>(&self, scope: &S) -> Result<f64, EvalError> {
        eval(&self.root, scope)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_vars(&self.root, &mut out);
        out
    }

    /// `Some(value)` when the tree has no free variables.
    pub fn as_constant(&self) -> Option<f64> {
        if self.free_variables().is_empty() {
            self.evaluate(&[] as &[(&str, f64)]).ok()
        } else {
            None
        }
    }
}

/// Fully parenthesized rendering; re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Display(&self.root))
    }
}

struct Display<'a>(&'a Node);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            // `{}` on f64 prints the shortest text that round-trips exactly.
            Node::Num(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Node::Num(v) => write!(f, "{v}"),
            Node::Const(name, _) => f.write_str(name),
            Node::Var(name) => f.write_str(name),
            Node::Neg(inner) => write!(f, "(-{})", Display(inner)),
            Node::Binary(op, l, r) => write!(f, "({} {} {})", Display(l), op.symbol(), Display(r)),
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Display(a))?;
                }
                f.write_str(")")
            }
        }
    }
}

fn collect_vars(node: &Node, out: &mut BTreeSet<String>) {
    match node {
        Node::Num(_) | Node::Const(..) => {}
        Node::Var(name) => {
            out.insert(name.clone());
        }
        Node::Neg(inner) => collect_vars(inner, out),
        Node::Binary(_, l, r) => {
            collect_vars(l, out);
            collect_vars(r, out);
        }
        Node::Call(_, args) => args.iter().for_each(|a| collect_vars(a, out)),
    }
}

fn domain(op: &'static str, detail: String) -> EvalError {
    EvalError::Domain { op, detail }
}

fn finite(op: &'static str, v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(op, alloc::format!("result is {v}")))
    }
}

fn eval<S: Scope + ?Sized>(node: &Node, scope: &S) -> Result<f64, EvalError> {
    match node {
        Node::Num(v) => Ok(*v),
        Node::Const(_, v) => Ok(*v),
        Node::Var(name) => scope
            .lookup(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        Node::Neg(inner) => Ok(-eval(inner, scope)?),
        Node::Binary(op, l, r) => {
            let a = eval(l, scope)?;
            let b = eval(r, scope)?;
            match op {
                BinOp::Add => finite("+", a + b),
                BinOp::Sub => finite("-", a - b),
                BinOp::Mul => finite("*", a * b),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(domain("/", alloc::format!("division of {a} by zero")))
                    } else {
                        finite("/", a / b)
                    }
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(domain("^", alloc::format!("0 raised to negative power {b}")));
                    }
                    if a < 0.0 && b != libm::trunc(b) {
                        return Err(domain("^", alloc::format!("{a} raised to non-integer power {b}")));
                    }
                    finite("^", libm::pow(a, b))
                }
            }
        }
        Node::Call(func, args) => {
            let first = eval(&args[0], scope)?;
            match func {
                Func::Sin => finite("sin", math::sin(first)),
                Func::Cos => finite("cos", math::cos(first)),
                Func::Tan => finite("tan", libm::tan(first)),
                Func::Sqrt => {
                    if first < 0.0 {
                        Err(domain("sqrt", alloc::format!("negative argument {first}")))
                    } else {
                        Ok(math::sqrt(first))
                    }
                }
                Func::Exp => finite("exp", libm::exp(first)),
                Func::Ln => {
                    if first <= 0.0 {
                        Err(domain("ln", alloc::format!("non-positive argument {first}")))
                    } else {
                        Ok(libm::log(first))
                    }
                }
                Func::Abs => Ok(math::abs(first)),
                Func::Min | Func::Max => {
                    let mut acc = first;
                    for a in &args[1..] {
                        let v = eval(a, scope)?;
                        acc = if *func == Func::Min { acc.min(v) } else { acc.max(v) };
                    }
                    Ok(acc)
                }
            }
        }
    }
}
