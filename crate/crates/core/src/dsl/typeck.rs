use std::collections::HashMap;
use std::fmt;

use super::*;
use crate::relalg::Carrier;

/// Type `source <-> target` of a relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelType {
    pub src: Carrier,
    pub tgt: Carrier,
}

impl RelType {
    pub fn new(src: Carrier, tgt: Carrier) -> Self {
        RelType { src, tgt }
    }
}

impl fmt::Display for RelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-> {}", self.src, self.tgt)
    }
}

/// Names visible to a script before its first statement.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub carriers: HashMap<String, Carrier>,
    pub relations: HashMap<String, RelType>,
}

/// Typechecked expression; every node carries its type.
#[derive(Clone, Debug)]
pub struct TExpr {
    pub kind: TKind,
    pub ty: RelType,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum TKind {
    Var(String),
    Union(Box<TExpr>, Box<TExpr>),
    Inter(Box<TExpr>, Box<TExpr>),
    Compose(Box<TExpr>, Box<TExpr>),
    Complement(Box<TExpr>),
    Transpose(Box<TExpr>),
    Universal,
    Empty,
    Identity,
    Eps,
    Omega,
    Pi,
    Rho,
    Syq(Box<TExpr>, Box<TExpr>),
    Pair(Box<TExpr>, Box<TExpr>),
    Vec(Box<TExpr>),
    Rel(Box<TExpr>),
    /// Embedding into a fresh base carrier whose size is fixed at evaluation.
    Inj(Box<TExpr>, String),
}

#[derive(Clone, Debug)]
pub struct TypedScript {
    pub lets: Vec<(String, TExpr)>,
    pub result: TExpr,
    /// Engine block width needed to evaluate every node.
    pub required_width: u32,
}

impl TypedScript {
    pub fn result_type(&self) -> &RelType {
        &self.result.ty
    }
}

/// Carrier name given to the result of `inj` at the given position.
pub fn inj_carrier_name(span: Span) -> String {
    format!("inj_L{}C{}", span.line, span.col)
}

struct Checker {
    carriers: HashMap<String, Carrier>,
    relations: HashMap<String, RelType>,
    inj_bounds: HashMap<String, u32>,
    width: u32,
}

fn err<T>(span: Span, message: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError {
        span,
        message: message.into(),
    })
}

impl Checker {
    fn carrier(&self, c: &CExpr) -> Result<Carrier, TypeError> {
        Ok(match c {
            CExpr::Name(n, span) => match self.carriers.get(n) {
                Some(c) => c.clone(),
                None => return err(*span, format!("unknown carrier `{n}`")),
            },
            CExpr::Unit(_) => Carrier::Unit,
            CExpr::Pow(inner, _) => Carrier::powerset(self.carrier(inner)?),
            CExpr::Product(l, r, _) => Carrier::product(self.carrier(l)?, self.carrier(r)?),
        })
    }

    fn rtype(&self, t: &RelTypeExpr) -> Result<RelType, TypeError> {
        Ok(RelType::new(self.carrier(&t.src)?, self.carrier(&t.tgt)?))
    }

    fn bound(&self, c: &Carrier) -> u32 {
        match c {
            Carrier::Base { name, .. } if self.inj_bounds.contains_key(name) => self.inj_bounds[name],
            Carrier::Product(l, r) => self.bound(l).saturating_add(self.bound(r)),
            other => other.width(),
        }
    }

    fn note(&mut self, t: &RelType) {
        self.width = self.width.max(self.bound(&t.src)).max(self.bound(&t.tgt));
    }

    fn mismatch(op: &str, a: &TExpr, b: &TExpr) -> TypeError {
        TypeError {
            span: a.span,
            message: format!(
                "type mismatch in `{op}`: left operand at {} has type {}, right operand at {} has type {}",
                a.span, a.ty, b.span, b.ty
            ),
        }
    }

    fn product_parts(c: &Carrier, span: Span, op: &str) -> Result<(Carrier, Carrier), TypeError> {
        match c.as_product() {
            Some((l, r)) => Ok((l.clone(), r.clone())),
            None => err(span, format!("`{op}` expects a product carrier, found {c}")),
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<TExpr, TypeError> {
        let span = e.span;
        let (kind, ty) = match &e.kind {
            ExprKind::Var(n) => match self.relations.get(n) {
                Some(t) => (TKind::Var(n.clone()), t.clone()),
                None => return err(span, format!("unknown identifier `{n}`")),
            },
            ExprKind::Union(a, b) | ExprKind::Inter(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                let union = matches!(e.kind, ExprKind::Union(..));
                if a.ty != b.ty {
                    return Err(Self::mismatch(if union { "|" } else { "&" }, &a, &b));
                }
                let ty = a.ty.clone();
                let kind = if union {
                    TKind::Union(Box::new(a), Box::new(b))
                } else {
                    TKind::Inter(Box::new(a), Box::new(b))
                };
                (kind, ty)
            }
            ExprKind::Compose(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                if a.ty.tgt != b.ty.src {
                    return Err(Self::mismatch(".", &a, &b));
                }
                let ty = RelType::new(a.ty.src.clone(), b.ty.tgt.clone());
                (TKind::Compose(Box::new(a), Box::new(b)), ty)
            }
            ExprKind::Complement(a) => {
                let a = self.expr(a)?;
                let ty = a.ty.clone();
                (TKind::Complement(Box::new(a)), ty)
            }
            ExprKind::Transpose(a) => {
                let a = self.expr(a)?;
                let ty = RelType::new(a.ty.tgt.clone(), a.ty.src.clone());
                (TKind::Transpose(Box::new(a)), ty)
            }
            ExprKind::Universal(t) => (TKind::Universal, self.rtype(t)?),
            ExprKind::Empty(t) => (TKind::Empty, self.rtype(t)?),
            ExprKind::Identity(c) => {
                let c = self.carrier(c)?;
                (TKind::Identity, RelType::new(c.clone(), c))
            }
            ExprKind::Eps(c) => {
                let c = self.carrier(c)?;
                (TKind::Eps, RelType::new(c.clone(), Carrier::powerset(c)))
            }
            ExprKind::Omega(c) => {
                let p = Carrier::powerset(self.carrier(c)?);
                (TKind::Omega, RelType::new(p.clone(), p))
            }
            ExprKind::Pi(c) | ExprKind::Rho(c) => {
                let prod = self.carrier(c)?;
                let is_pi = matches!(e.kind, ExprKind::Pi(_));
                let (l, r) = Self::product_parts(&prod, c.span(), if is_pi { "pi" } else { "rho" })?;
                if is_pi {
                    (TKind::Pi, RelType::new(prod, l))
                } else {
                    (TKind::Rho, RelType::new(prod, r))
                }
            }
            ExprKind::Syq(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                if a.ty.src != b.ty.src {
                    return Err(Self::mismatch("syq", &a, &b));
                }
                let ty = RelType::new(a.ty.tgt.clone(), b.ty.tgt.clone());
                (TKind::Syq(Box::new(a), Box::new(b)), ty)
            }
            ExprKind::Pair(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                if a.ty.src != b.ty.src {
                    return Err(Self::mismatch("pair", &a, &b));
                }
                let ty = RelType::new(a.ty.src.clone(), Carrier::product(a.ty.tgt.clone(), b.ty.tgt.clone()));
                (TKind::Pair(Box::new(a), Box::new(b)), ty)
            }
            ExprKind::Vec(a) => {
                let a = self.expr(a)?;
                let ty = RelType::new(Carrier::product(a.ty.src.clone(), a.ty.tgt.clone()), Carrier::Unit);
                (TKind::Vec(Box::new(a)), ty)
            }
            ExprKind::Rel(a) => {
                let a = self.expr(a)?;
                let parts = a.ty.src.as_product().filter(|_| a.ty.tgt.is_unit());
                let Some((l, r)) = parts else {
                    return err(span, format!("`rel` expects a vector X*Y <-> unit, found {}", a.ty));
                };
                let ty = RelType::new(l.clone(), r.clone());
                (TKind::Rel(Box::new(a)), ty)
            }
            ExprKind::Inj(a) => {
                let a = self.expr(a)?;
                if !a.ty.tgt.is_unit() {
                    return err(span, format!("`inj` expects a vector X <-> unit, found {}", a.ty));
                }
                let name = inj_carrier_name(span);
                self.inj_bounds.insert(name.clone(), self.bound(&a.ty.src));
                let ty = RelType::new(Carrier::base(name.clone(), 0), a.ty.src.clone());
                (TKind::Inj(Box::new(a), name), ty)
            }
        };
        self.note(&ty);
        Ok(TExpr { kind, ty, span })
    }
}

/// Annotate every node with its type, resolving carrier names structurally.
pub fn typecheck(script: &Script, env: &TypeEnv) -> Result<TypedScript, TypeError> {
    let mut ck = Checker {
        carriers: env.carriers.clone(),
        relations: env.relations.clone(),
        inj_bounds: HashMap::new(),
        width: 0,
    };
    for t in env.relations.values() {
        ck.note(t);
    }
    let mut lets = Vec::new();
    for st in &script.stmts {
        match st {
            Stmt::Carrier { name, def, span } => {
                if ck.carriers.contains_key(name) {
                    return err(*span, format!("carrier `{name}` is already defined"));
                }
                let c = match def {
                    CarrierDef::Size(n) => match usize::try_from(*n) {
                        Ok(n) => Carrier::base(name.clone(), n),
                        Err(_) => return err(*span, format!("carrier size {n} is too large")),
                    },
                    CarrierDef::Expr(c) => ck.carrier(c)?,
                };
                ck.carriers.insert(name.clone(), c);
            }
            Stmt::Let { name, ty, value, span } => {
                let te = ck.expr(value)?;
                if let Some(t) = ty {
                    let declared = ck.rtype(t)?;
                    if declared != te.ty {
                        return err(
                            *span,
                            format!("`{name}` is declared as {declared} but its value has type {}", te.ty),
                        );
                    }
                }
                ck.relations.insert(name.clone(), te.ty.clone());
                lets.push((name.clone(), te));
            }
        }
    }
    let result = ck.expr(&script.result)?;
    Ok(TypedScript {
        lets,
        result,
        required_width: ck.width,
    })
}
