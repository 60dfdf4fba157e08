//! Bidirectional type inference. `;;` and `cast` are elaborated into
//! explicit structural isomorphisms found by [`find_maclane`].

use std::collections::HashMap;

use thiserror::Error;

use super::{Arity, EqKind, Equation, Goal, MorTerm, ObjTree, Signature, Structural};
use crate::maclane::{eval_maclane, find_maclane, MacLane};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown morphism `{0}`")]
    UnknownName(String),
    #[error("in `{term}`: expected {expected}, found {found} (use `;;` to compose up to bracketing)")]
    Mismatch { term: String, expected: ObjTree, found: ObjTree },
    #[error("in `{term}`: arities {left} and {right} differ")]
    Arity { term: String, left: Arity, right: Arity },
    #[error("sides of `{name}` have types {lhs_src} ~> {lhs_tgt} and {rhs_src} ~> {rhs_tgt}; use `≡'` to compare up to bracketing")]
    StrictEndpoints { name: String, lhs_src: ObjTree, lhs_tgt: ObjTree, rhs_src: ObjTree, rhs_tgt: ObjTree },
    #[error("definition `{0}` refers to itself")]
    Recursive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypedKind {
    Gen(String),
    /// A reference to a goal definition, kept opaque.
    Def(String),
    Id,
    Structural(Structural),
    /// An isomorphism inserted by elaboration.
    Iso(MacLane),
    Comp(Box<TypedTerm>, Box<TypedTerm>),
    Tensor(Box<TypedTerm>, Box<TypedTerm>),
    Boxed(Box<TypedTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTerm {
    pub kind: TypedKind,
    pub source: ObjTree,
    pub target: ObjTree,
}

impl TypedTerm {
    fn comp(f: TypedTerm, g: TypedTerm) -> TypedTerm {
        let (source, target) = (f.source.clone(), g.target.clone());
        TypedTerm { kind: TypedKind::Comp(Box::new(f), Box::new(g)), source, target }
    }

    fn iso(m: MacLane) -> TypedTerm {
        let (source, target) = m.endpoints();
        TypedTerm { kind: TypedKind::Iso(m), source, target }
    }

    /// The fully explicit surface term, with inserted isomorphisms spelled out.
    pub fn to_explicit(&self) -> MorTerm {
        match &self.kind {
            TypedKind::Gen(g) | TypedKind::Def(g) => MorTerm::gen(g.clone()),
            TypedKind::Id => MorTerm::Id(self.source.clone()),
            TypedKind::Structural(s) => MorTerm::Structural(s.clone()),
            TypedKind::Iso(m) => eval_maclane(m),
            TypedKind::Comp(f, g) => MorTerm::comp(f.to_explicit(), g.to_explicit()),
            TypedKind::Tensor(f, g) => MorTerm::tensor(f.to_explicit(), g.to_explicit()),
            TypedKind::Boxed(f) => MorTerm::boxed(f.to_explicit()),
        }
    }

    pub fn arities(&self) -> (Arity, Arity) {
        (self.source.arity(), self.target.arity())
    }
}

/// Both sides of an equation, elaborated to the same endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedEquation {
    pub name: Option<String>,
    pub lhs: TypedTerm,
    pub rhs: TypedTerm,
}

/// A signature together with typed definitions.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub signature: Signature,
    defs: HashMap<String, TypedTerm>,
    order: Vec<String>,
}

#[derive(Clone, Copy, Default)]
struct Want<'a> {
    source: Option<&'a ObjTree>,
    target: Option<&'a ObjTree>,
}

impl Context {
    pub fn new(signature: Signature) -> Self {
        Context { signature, defs: HashMap::new(), order: Vec::new() }
    }

    /// Types the signature and every definition of a goal.
    pub fn from_goal(goal: &Goal) -> Result<Self, TypeError> {
        let mut ctx = Context::new(goal.signature.clone());
        for d in &goal.definitions {
            ctx.define(&d.name, &d.body)?;
        }
        Ok(ctx)
    }

    pub fn define(&mut self, name: &str, body: &MorTerm) -> Result<&TypedTerm, TypeError> {
        if body.mentions(name) {
            return Err(TypeError::Recursive(name.to_string()));
        }
        let typed = self.typecheck(body)?;
        self.order.push(name.to_string());
        self.defs.insert(name.to_string(), typed);
        Ok(&self.defs[name])
    }

    pub fn definition(&self, name: &str) -> Option<&TypedTerm> {
        self.defs.get(name)
    }

    pub fn definition_names(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn typecheck(&self, term: &MorTerm) -> Result<TypedTerm, TypeError> {
        self.infer(term, Want::default())
    }

    /// Types `term` with the given endpoints; casts inside adopt them.
    pub fn check(&self, term: &MorTerm, source: &ObjTree, target: &ObjTree) -> Result<TypedTerm, TypeError> {
        let t = self.infer(term, Want { source: Some(source), target: Some(target) })?;
        for (want, got) in [(source, &t.source), (target, &t.target)] {
            if want != got {
                return Err(TypeError::Mismatch { term: term.to_string(), expected: want.clone(), found: got.clone() });
            }
        }
        Ok(t)
    }

    pub fn typecheck_equation(&self, eq: &Equation) -> Result<TypedEquation, TypeError> {
        let lhs = self.typecheck(&eq.lhs)?;
        let want = Want { source: Some(&lhs.source), target: Some(&lhs.target) };
        let rhs = self.infer(&eq.rhs, want)?;
        let name = eq.name.clone();
        match eq.kind {
            EqKind::Strict => {
                if lhs.source != rhs.source || lhs.target != rhs.target {
                    return Err(TypeError::StrictEndpoints {
                        name: name.unwrap_or_else(|| "goal".into()),
                        lhs_src: lhs.source,
                        lhs_tgt: lhs.target,
                        rhs_src: rhs.source,
                        rhs_tgt: rhs.target,
                    });
                }
                Ok(TypedEquation { name, lhs, rhs })
            }
            EqKind::UpToCast => {
                let term = || eq.to_string();
                let pre = find_maclane(&lhs.source, &rhs.source).map_err(|e| TypeError::Arity {
                    term: term(),
                    left: e.from.arity(),
                    right: e.to.arity(),
                })?;
                let post = find_maclane(&rhs.target, &lhs.target).map_err(|e| TypeError::Arity {
                    term: term(),
                    left: e.to.arity(),
                    right: e.from.arity(),
                })?;
                let rhs = TypedTerm::comp(TypedTerm::iso(pre), TypedTerm::comp(rhs, TypedTerm::iso(post)));
                Ok(TypedEquation { name, lhs, rhs })
            }
        }
    }

    fn infer(&self, term: &MorTerm, want: Want<'_>) -> Result<TypedTerm, TypeError> {
        match term {
            MorTerm::Gen(name) => {
                if let Some(g) = self.signature.generator(name) {
                    return Ok(TypedTerm {
                        kind: TypedKind::Gen(name.clone()),
                        source: g.source.clone(),
                        target: g.target.clone(),
                    });
                }
                match self.defs.get(name) {
                    Some(d) => Ok(TypedTerm {
                        kind: TypedKind::Def(name.clone()),
                        source: d.source.clone(),
                        target: d.target.clone(),
                    }),
                    None => Err(TypeError::UnknownName(name.clone())),
                }
            }
            MorTerm::Id(t) => Ok(TypedTerm { kind: TypedKind::Id, source: t.clone(), target: t.clone() }),
            MorTerm::Structural(s) => {
                let (source, target) = s.endpoints();
                Ok(TypedTerm { kind: TypedKind::Structural(s.clone()), source, target })
            }
            MorTerm::Comp(f, g) => {
                let (tf, tg) = if ends_flexible(f) {
                    let tg = self.infer(g, Want { source: None, target: want.target })?;
                    let tf = self.infer(f, Want { source: want.source, target: Some(&tg.source) })?;
                    (tf, tg)
                } else {
                    let tf = self.infer(f, Want { source: want.source, target: None })?;
                    let tg = self.infer(g, Want { source: Some(&tf.target), target: want.target })?;
                    (tf, tg)
                };
                if tf.target != tg.source {
                    return Err(TypeError::Mismatch { term: term.to_string(), expected: tf.target, found: tg.source });
                }
                Ok(TypedTerm::comp(tf, tg))
            }
            MorTerm::StrictComp(f, g) => {
                let tf = self.infer(f, Want { source: want.source, target: None })?;
                let tg = self.infer(g, Want { source: None, target: want.target })?;
                let iso = find_maclane(&tf.target, &tg.source).map_err(|e| TypeError::Arity {
                    term: term.to_string(),
                    left: e.from.arity(),
                    right: e.to.arity(),
                })?;
                Ok(TypedTerm::comp(TypedTerm::comp(tf, TypedTerm::iso(iso)), tg))
            }
            MorTerm::Tensor(f, g) => {
                let (fs, gs) = split(want.source);
                let (ft, gt) = split(want.target);
                let tf = self.infer(f, Want { source: fs, target: ft })?;
                let tg = self.infer(g, Want { source: gs, target: gt })?;
                let source = ObjTree::tensor(tf.source.clone(), tg.source.clone());
                let target = ObjTree::tensor(tf.target.clone(), tg.target.clone());
                Ok(TypedTerm { kind: TypedKind::Tensor(Box::new(tf), Box::new(tg)), source, target })
            }
            MorTerm::Cast { body, pinned } => {
                let tb = self.infer(body, Want::default())?;
                let (src, tgt) = match pinned {
                    Some(p) => (p.0.clone(), p.1.clone()),
                    None => (
                        want.source.cloned().unwrap_or_else(|| tb.source.clone()),
                        want.target.cloned().unwrap_or_else(|| tb.target.clone()),
                    ),
                };
                let arity_err = |l: &ObjTree, r: &ObjTree| TypeError::Arity {
                    term: term.to_string(),
                    left: l.arity(),
                    right: r.arity(),
                };
                let pre = find_maclane(&src, &tb.source).map_err(|_| arity_err(&src, &tb.source))?;
                let post = find_maclane(&tb.target, &tgt).map_err(|_| arity_err(&tb.target, &tgt))?;
                Ok(TypedTerm::comp(TypedTerm::iso(pre), TypedTerm::comp(tb, TypedTerm::iso(post))))
            }
            MorTerm::Boxed(inner) => {
                let t = self.infer(inner, want)?;
                let (source, target) = (t.source.clone(), t.target.clone());
                Ok(TypedTerm { kind: TypedKind::Boxed(Box::new(t)), source, target })
            }
        }
    }
}

fn split(t: Option<&ObjTree>) -> (Option<&ObjTree>, Option<&ObjTree>) {
    match t {
        Some(ObjTree::Tensor(a, b)) => (Some(a), Some(b)),
        _ => (None, None),
    }
}

fn ends_flexible(t: &MorTerm) -> bool {
    match t {
        MorTerm::Cast { pinned: None, .. } => true,
        MorTerm::Comp(_, b) | MorTerm::Boxed(b) => ends_flexible(b),
        _ => false,
    }
}
