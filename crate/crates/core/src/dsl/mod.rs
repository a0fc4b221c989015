//! A small typed language for relational expressions.
//!
//! ```text
//! script  := stmt* "eval" expr ";"?
//! stmt    := "carrier" ID "=" (NAT | cexpr) ";"
//!          | "let" ID (":" rtype)? "=" expr ";"
//! rtype   := cexpr "<->" cexpr
//! cexpr   := cterm ("*" cterm)*
//! cterm   := ID | "pow" cterm | "unit" | "(" cexpr ")"
//! expr    := inter ("|" inter)*
//! inter   := comp ("&" comp)*
//! comp    := unary ("." unary)*
//! unary   := "-" unary | atom ("^")*
//! atom    := ID | "(" expr ")" | builtin
//! builtin := ("L" | "O") "[" rtype "]"
//!          | ("I" | "eps" | "omega" | "pi" | "rho") "[" cexpr "]"
//!          | ("syq" | "pair") "(" expr "," expr ")"
//!          | ("vec" | "rel" | "inj") "(" expr ")"
//! ```
//!
//! `#` starts a comment. `let` may rebind a name; carriers may not be
//! redefined. `carrier X = 5;` declares a base carrier with elements
//! `0..5`, while `carrier X = A*B;` is an alias.

mod eval;
mod lexer;
mod parser;
mod print;
mod typeck;

use std::fmt;

use thiserror::Error;

pub use eval::{eval, DslEnv};
pub use parser::parse;
pub use typeck::{typecheck, RelType, TypeEnv, TypedScript};

use crate::relalg::{RelAlgebra, RelError, Relation};

/// The shipped scripts.
pub mod scripts {
    /// Dominance `C` from `P`.
    pub const CV1: &str = include_str!("../../scripts/cv1.ra");
    /// Relativized dominance `R`.
    pub const CV2: &str = include_str!("../../scripts/cv2.ra");
    /// Optimal voter sets for the Condorcet rule; needs the target point `p`.
    pub const CV3: &str = include_str!("../../scripts/cv3.ra");
    /// Relativized covering `U`.
    pub const CV4: &str = include_str!("../../scripts/cv4.ra");
    /// Optimal voter sets for the uncovered-set rule; needs `p`.
    pub const CV5: &str = include_str!("../../scripts/cv5.ra");

    pub const ALL: [(&str, &str); 5] = [
        ("cv1.ra", CV1),
        ("cv2.ra", CV2),
        ("cv3.ra", CV3),
        ("cv4.ra", CV4),
        ("cv5.ra", CV5),
    ];
}

/// Start position of a syntax node (1-based line and column).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub stmts: Vec<Stmt>,
    pub result: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Carrier {
        name: String,
        def: CarrierDef,
        span: Span,
    },
    Let {
        name: String,
        ty: Option<RelTypeExpr>,
        value: Expr,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarrierDef {
    Size(u64),
    Expr(CExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CExpr {
    Name(String, Span),
    Unit(Span),
    Pow(Box<CExpr>, Span),
    Product(Box<CExpr>, Box<CExpr>, Span),
}

impl CExpr {
    pub fn span(&self) -> Span {
        match self {
            CExpr::Name(_, s) | CExpr::Unit(s) | CExpr::Pow(_, s) | CExpr::Product(_, _, s) => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelTypeExpr {
    pub src: CExpr,
    pub tgt: CExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    Compose(Box<Expr>, Box<Expr>),
    Complement(Box<Expr>),
    Transpose(Box<Expr>),
    Universal(RelTypeExpr),
    Empty(RelTypeExpr),
    Identity(CExpr),
    Eps(CExpr),
    Omega(CExpr),
    Pi(CExpr),
    Rho(CExpr),
    Syq(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Vec(Box<Expr>),
    Rel(Box<Expr>),
    Inj(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at {span}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub span: Span,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("type error at {span}: {message}")]
pub struct TypeError {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] RelError),
}

/// Parse, typecheck against the environment, and evaluate.
pub fn run(text: &str, alg: &mut RelAlgebra, env: &DslEnv) -> Result<Relation, DslError> {
    let script = parse(text)?;
    let typed = typecheck(&script, &env.type_env())?;
    Ok(eval(&typed, alg, env)?)
}

impl Script {
    /// A copy with every span reset, for comparing trees by shape.
    pub fn without_spans(&self) -> Script {
        let mut s = self.clone();
        for st in &mut s.stmts {
            match st {
                Stmt::Carrier { def, span, .. } => {
                    *span = Span::default();
                    if let CarrierDef::Expr(c) = def {
                        erase_c(c);
                    }
                }
                Stmt::Let { ty, value, span, .. } => {
                    *span = Span::default();
                    if let Some(t) = ty {
                        erase_t(t);
                    }
                    erase_e(value);
                }
            }
        }
        erase_e(&mut s.result);
        s
    }
}

fn erase_c(c: &mut CExpr) {
    match c {
        CExpr::Name(_, s) | CExpr::Unit(s) => *s = Span::default(),
        CExpr::Pow(inner, s) => {
            *s = Span::default();
            erase_c(inner);
        }
        CExpr::Product(l, r, s) => {
            *s = Span::default();
            erase_c(l);
            erase_c(r);
        }
    }
}

fn erase_t(t: &mut RelTypeExpr) {
    erase_c(&mut t.src);
    erase_c(&mut t.tgt);
}

fn erase_e(e: &mut Expr) {
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Var(_) => {}
        ExprKind::Union(a, b)
        | ExprKind::Inter(a, b)
        | ExprKind::Compose(a, b)
        | ExprKind::Syq(a, b)
        | ExprKind::Pair(a, b) => {
            erase_e(a);
            erase_e(b);
        }
        ExprKind::Complement(a) | ExprKind::Transpose(a) | ExprKind::Vec(a) | ExprKind::Rel(a) | ExprKind::Inj(a) => {
            erase_e(a)
        }
        ExprKind::Universal(t) | ExprKind::Empty(t) => erase_t(t),
        ExprKind::Identity(c) | ExprKind::Eps(c) | ExprKind::Omega(c) | ExprKind::Pi(c) | ExprKind::Rho(c) => {
            erase_c(c)
        }
    }
}
