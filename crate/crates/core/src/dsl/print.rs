use std::fmt::{self, Write as _};

use super::*;

fn prec(e: &Expr) -> u8 {
    match e.kind {
        ExprKind::Union(..) => 1,
        ExprKind::Inter(..) => 2,
        ExprKind::Compose(..) => 3,
        ExprKind::Complement(..) => 4,
        ExprKind::Transpose(..) => 5,
        _ => 6,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn cprec(c: &CExpr) -> u8 {
    match c {
        CExpr::Product(..) => 1,
        _ => 2,
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CExpr::Name(n, _) => f.write_str(n),
            CExpr::Unit(_) => f.write_str("unit"),
            CExpr::Pow(inner, _) if cprec(inner) < 2 => write!(f, "pow ({inner})"),
            CExpr::Pow(inner, _) => write!(f, "pow {inner}"),
            CExpr::Product(l, r, _) => {
                write!(f, "{l}*")?;
                if cprec(r) < 2 {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl fmt::Display for RelTypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-> {}", self.src, self.tgt)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            child(f, a, p)?;
            write!(f, " {op} ")?;
            child(f, b, p + 1)
        };
        match &self.kind {
            ExprKind::Var(n) => f.write_str(n),
            ExprKind::Union(a, b) => bin(f, a, "|", b, 1),
            ExprKind::Inter(a, b) => bin(f, a, "&", b, 2),
            ExprKind::Compose(a, b) => bin(f, a, ".", b, 3),
            ExprKind::Complement(a) => {
                f.write_str("-")?;
                child(f, a, 4)
            }
            ExprKind::Transpose(a) => {
                child(f, a, 5)?;
                f.write_str("^")
            }
            ExprKind::Universal(t) => write!(f, "L[{t}]"),
            ExprKind::Empty(t) => write!(f, "O[{t}]"),
            ExprKind::Identity(c) => write!(f, "I[{c}]"),
            ExprKind::Eps(c) => write!(f, "eps[{c}]"),
            ExprKind::Omega(c) => write!(f, "omega[{c}]"),
            ExprKind::Pi(c) => write!(f, "pi[{c}]"),
            ExprKind::Rho(c) => write!(f, "rho[{c}]"),
            ExprKind::Syq(a, b) => write!(f, "syq({a}, {b})"),
            ExprKind::Pair(a, b) => write!(f, "pair({a}, {b})"),
            ExprKind::Vec(a) => write!(f, "vec({a})"),
            ExprKind::Rel(a) => write!(f, "rel({a})"),
            ExprKind::Inj(a) => write!(f, "inj({a})"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            match s {
                Stmt::Carrier { name, def, .. } => match def {
                    CarrierDef::Size(n) => writeln!(f, "carrier {name} = {n};")?,
                    CarrierDef::Expr(c) => writeln!(f, "carrier {name} = {c};")?,
                },
                Stmt::Let { name, ty, value, .. } => match ty {
                    Some(t) => writeln!(f, "let {name} : {t} = {value};")?,
                    None => writeln!(f, "let {name} = {value};")?,
                },
            }
        }
        writeln!(f, "eval {};", self.result)
    }
}

fn sexpr_c(c: &CExpr, out: &mut String) {
    match c {
        CExpr::Name(n, _) => out.push_str(n),
        CExpr::Unit(_) => out.push_str("unit"),
        CExpr::Pow(i, _) => {
            out.push_str("(pow ");
            sexpr_c(i, out);
            out.push(')');
        }
        CExpr::Product(l, r, _) => {
            out.push_str("(* ");
            sexpr_c(l, out);
            out.push(' ');
            sexpr_c(r, out);
            out.push(')');
        }
    }
}

fn sexpr_t(t: &RelTypeExpr, out: &mut String) {
    out.push_str("(<-> ");
    sexpr_c(&t.src, out);
    out.push(' ');
    sexpr_c(&t.tgt, out);
    out.push(')');
}

fn sexpr_e(e: &Expr, out: &mut String) {
    let _ = write!(out, "{}:{} ", e.span.line, e.span.col);
    let node = |out: &mut String, head: &str, kids: &[&Expr]| {
        let _ = write!(out, "({head}");
        for k in kids {
            out.push(' ');
            sexpr_e(k, out);
        }
        out.push(')');
    };
    let carrier = |out: &mut String, head: &str, c: &CExpr| {
        let _ = write!(out, "({head} ");
        sexpr_c(c, out);
        out.push(')');
    };
    match &e.kind {
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Union(a, b) => node(out, "|", &[a, b]),
        ExprKind::Inter(a, b) => node(out, "&", &[a, b]),
        ExprKind::Compose(a, b) => node(out, ".", &[a, b]),
        ExprKind::Complement(a) => node(out, "-", &[a]),
        ExprKind::Transpose(a) => node(out, "^", &[a]),
        ExprKind::Universal(t) | ExprKind::Empty(t) => {
            out.push_str(if matches!(e.kind, ExprKind::Universal(_)) { "(L " } else { "(O " });
            sexpr_t(t, out);
            out.push(')');
        }
        ExprKind::Identity(c) => carrier(out, "I", c),
        ExprKind::Eps(c) => carrier(out, "eps", c),
        ExprKind::Omega(c) => carrier(out, "omega", c),
        ExprKind::Pi(c) => carrier(out, "pi", c),
        ExprKind::Rho(c) => carrier(out, "rho", c),
        ExprKind::Syq(a, b) => node(out, "syq", &[a, b]),
        ExprKind::Pair(a, b) => node(out, "pair", &[a, b]),
        ExprKind::Vec(a) => node(out, "vec", &[a]),
        ExprKind::Rel(a) => node(out, "rel", &[a]),
        ExprKind::Inj(a) => node(out, "inj", &[a]),
    }
}

impl Script {
    /// One line per statement: an S-expression tree with `line:col` positions.
    pub fn to_tree(&self) -> String {
        let mut out = String::new();
        for s in &self.stmts {
            match s {
                Stmt::Carrier { name, def, span } => {
                    let _ = write!(out, "{}:{} (carrier {name} ", span.line, span.col);
                    match def {
                        CarrierDef::Size(n) => {
                            let _ = write!(out, "{n}");
                        }
                        CarrierDef::Expr(c) => sexpr_c(c, &mut out),
                    }
                    out.push_str(")\n");
                }
                Stmt::Let { name, ty, value, span } => {
                    let _ = write!(out, "{}:{} (let {name} ", span.line, span.col);
                    if let Some(t) = ty {
                        sexpr_t(t, &mut out);
                        out.push(' ');
                    }
                    sexpr_e(value, &mut out);
                    out.push_str(")\n");
                }
            }
        }
        out.push_str("(eval ");
        sexpr_e(&self.result, &mut out);
        out.push_str(")\n");
        out
    }
}
