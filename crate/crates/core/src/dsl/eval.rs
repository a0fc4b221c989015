use std::collections::HashMap;

use super::typeck::{TExpr, TKind, TypeEnv};
use super::{RelType, TypedScript};
use crate::election::{build_p, Election, ElectionError};
use crate::relalg::{Carrier, RelAlgebra, RelError, Relation};

/// Carriers and relations bound before a script runs.
#[derive(Clone, Debug, Default)]
pub struct DslEnv {
    pub carriers: HashMap<String, Carrier>,
    pub relations: HashMap<String, Relation>,
}

impl DslEnv {
    /// `P : N <-> A2` and the carriers `N`, `A`, `A2 = A*A`, `PN = pow N`;
    /// with a target, also its point `p : A <-> unit`.
    pub fn for_election(alg: &mut RelAlgebra, e: &Election, target: Option<usize>) -> Result<DslEnv, ElectionError> {
        e.register_labels(alg);
        let n = e.voter_carrier();
        let a = e.alternative_carrier();
        let mut env = DslEnv::default();
        env.carriers.insert("N".into(), n.clone());
        env.carriers.insert("A".into(), a.clone());
        env.carriers.insert("A2".into(), e.pair_carrier());
        env.carriers.insert("PN".into(), Carrier::powerset(n));
        env.relations.insert("P".into(), build_p(alg, e)?);
        if let Some(t) = target {
            env.relations.insert("p".into(), alg.point(&a, t)?);
        }
        Ok(env)
    }

    pub fn type_env(&self) -> TypeEnv {
        TypeEnv {
            carriers: self.carriers.clone(),
            relations: self
                .relations
                .iter()
                .map(|(k, r)| (k.clone(), RelType::new(r.source().clone(), r.target().clone())))
                .collect(),
        }
    }
}

struct Evaluator<'a> {
    alg: &'a mut RelAlgebra,
    vars: HashMap<String, Relation>,
}

impl Evaluator<'_> {
    fn expr(&mut self, e: &TExpr) -> Result<Relation, RelError> {
        let ty = &e.ty;
        match &e.kind {
            TKind::Var(n) => Ok(self.vars[n].clone()),
            TKind::Union(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.alg.union(&a, &b)
            }
            TKind::Inter(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.alg.inter(&a, &b)
            }
            TKind::Compose(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.alg.compose(&a, &b)
            }
            TKind::Complement(a) => {
                let a = self.expr(a)?;
                self.alg.complement(&a)
            }
            TKind::Transpose(a) => {
                let a = self.expr(a)?;
                self.alg.transpose(&a)
            }
            TKind::Universal => self.alg.universal(&ty.src, &ty.tgt),
            TKind::Empty => self.alg.empty(&ty.src, &ty.tgt),
            TKind::Identity => self.alg.identity(&ty.src),
            TKind::Eps => self.alg.eps(&ty.src),
            TKind::Omega => {
                let inner = ty.src.as_powerset().expect("typechecked").clone();
                self.alg.omega(&inner)
            }
            TKind::Pi => self.alg.pi(&ty.src),
            TKind::Rho => self.alg.rho(&ty.src),
            TKind::Syq(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.alg.syq(&a, &b)
            }
            TKind::Pair(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.alg.pairing(&a, &b)
            }
            TKind::Vec(a) => {
                let a = self.expr(a)?;
                self.alg.vec(&a)
            }
            TKind::Rel(a) => {
                let a = self.expr(a)?;
                self.alg.rel_of(&a)
            }
            TKind::Inj(a, name) => {
                let v = self.expr(a)?;
                let (r, members) = self.alg.inj(&v, name)?;
                let labels = members.iter().map(|&m| self.alg.element_label(v.source(), m)).collect();
                self.alg.set_labels(name, labels);
                Ok(r)
            }
        }
    }
}

/// Evaluate a typechecked script bottom-up.
pub fn eval(script: &TypedScript, alg: &mut RelAlgebra, env: &DslEnv) -> Result<Relation, RelError> {
    if script.required_width > alg.width() {
        return Err(RelError::WidthExceeded {
            carrier: "the script".to_string(),
            needed: script.required_width,
            available: alg.width(),
        });
    }
    let mut ev = Evaluator {
        alg,
        vars: env.relations.clone(),
    };
    for (name, e) in &script.lets {
        let r = ev.expr(e)?;
        ev.vars.insert(name.clone(), r);
    }
    ev.expr(&script.result)
}
