//! Objects, arities, morphism terms and goals.
//!
//! Terms are kept in their surface form here (with `;;`, `cast` and boxes);
//! [`typing`] elaborates them into fully explicit typed terms.

mod lexer;
mod parser;
mod print;
pub mod typing;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexer::{Lexer, Token, TokenKind};
pub use parser::{parse_goal, parse_obj, parse_term, ParseError, ParseErrorKind, Resolver};
pub use print::Notation;

/// Names that may not be declared by a goal.
pub const RESERVED: &[&str] = &["assoc", "unitl", "unitr", "α", "λ", "ρ", "cast", "object"];

/// A tensor expression over atomic objects and the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjTree {
    Atom(String),
    Unit,
    Tensor(Box<ObjTree>, Box<ObjTree>),
}

impl ObjTree {
    pub fn atom(name: impl Into<String>) -> Self {
        ObjTree::Atom(name.into())
    }

    pub fn tensor(a: ObjTree, b: ObjTree) -> Self {
        ObjTree::Tensor(Box::new(a), Box::new(b))
    }

    /// Flattens the tree into its list of atoms, dropping units.
    pub fn arity(&self) -> Arity {
        let mut out = Vec::new();
        self.push_atoms(&mut out);
        Arity(out)
    }

    fn push_atoms(&self, out: &mut Vec<String>) {
        match self {
            ObjTree::Atom(a) => out.push(a.clone()),
            ObjTree::Unit => {}
            ObjTree::Tensor(a, b) => {
                a.push_atoms(out);
                b.push_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            while let Some(t) = stack.pop() {
                match t {
                    ObjTree::Atom(a) => return Some(a.as_str()),
                    ObjTree::Unit => {}
                    ObjTree::Tensor(a, b) => {
                        stack.push(b);
                        stack.push(a);
                    }
                }
            }
            None
        })
    }

    pub fn size(&self) -> usize {
        match self {
            ObjTree::Atom(_) | ObjTree::Unit => 1,
            ObjTree::Tensor(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// `arity_of` as a free function.
pub fn arity_of(t: &ObjTree) -> Arity {
    t.arity()
}

/// A flat, ordered list of atomic objects.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Arity(pub Vec<String>);

impl Arity {
    pub fn empty() -> Self {
        Arity(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Arity) -> Arity {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Arity(v)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }
}

impl<S: Into<String>> FromIterator<S> for Arity {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Arity(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&self.0.join("⊗"))
    }
}

/// The structural isomorphisms of a monoidal category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructKind {
    /// `(a⊗b)⊗c ~> a⊗(b⊗c)`
    Assoc(ObjTree, ObjTree, ObjTree),
    /// `1⊗a ~> a`
    UnitL(ObjTree),
    /// `a⊗1 ~> a`
    UnitR(ObjTree),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Structural {
    pub kind: StructKind,
    pub inverse: bool,
}

impl Structural {
    pub fn assoc(a: ObjTree, b: ObjTree, c: ObjTree) -> Self {
        Structural { kind: StructKind::Assoc(a, b, c), inverse: false }
    }

    pub fn unitl(a: ObjTree) -> Self {
        Structural { kind: StructKind::UnitL(a), inverse: false }
    }

    pub fn unitr(a: ObjTree) -> Self {
        Structural { kind: StructKind::UnitR(a), inverse: false }
    }

    pub fn inverted(mut self) -> Self {
        self.inverse = !self.inverse;
        self
    }

    /// Source and target trees.
    pub fn endpoints(&self) -> (ObjTree, ObjTree) {
        let (s, t) = match &self.kind {
            StructKind::Assoc(a, b, c) => (
                ObjTree::tensor(ObjTree::tensor(a.clone(), b.clone()), c.clone()),
                ObjTree::tensor(a.clone(), ObjTree::tensor(b.clone(), c.clone())),
            ),
            StructKind::UnitL(a) => (ObjTree::tensor(ObjTree::Unit, a.clone()), a.clone()),
            StructKind::UnitR(a) => (ObjTree::tensor(a.clone(), ObjTree::Unit), a.clone()),
        };
        if self.inverse {
            (t, s)
        } else {
            (s, t)
        }
    }
}

/// A morphism expression in surface syntax.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MorTerm {
    /// A generator or a reference to a goal definition.
    Gen(String),
    Id(ObjTree),
    Structural(Structural),
    /// `f ; g`
    Comp(Box<MorTerm>, Box<MorTerm>),
    /// `f ;; g`, composition up to an inferred MacLane isomorphism.
    StrictComp(Box<MorTerm>, Box<MorTerm>),
    /// `f · g`
    Tensor(Box<MorTerm>, Box<MorTerm>),
    /// `cast f`. `pinned` fixes the endpoints when they are not recoverable
    /// from the context (rewrite results).
    Cast {
        body: Box<MorTerm>,
        pinned: Option<Box<(ObjTree, ObjTree)>>,
    },
    /// `[f]`
    Boxed(Box<MorTerm>),
}

impl MorTerm {
    pub fn gen(name: impl Into<String>) -> Self {
        MorTerm::Gen(name.into())
    }

    pub fn id(t: ObjTree) -> Self {
        MorTerm::Id(t)
    }

    pub fn comp(f: MorTerm, g: MorTerm) -> Self {
        MorTerm::Comp(Box::new(f), Box::new(g))
    }

    pub fn strict_comp(f: MorTerm, g: MorTerm) -> Self {
        MorTerm::StrictComp(Box::new(f), Box::new(g))
    }

    pub fn tensor(f: MorTerm, g: MorTerm) -> Self {
        MorTerm::Tensor(Box::new(f), Box::new(g))
    }

    pub fn cast(f: MorTerm) -> Self {
        MorTerm::Cast { body: Box::new(f), pinned: None }
    }

    pub fn cast_to(f: MorTerm, source: ObjTree, target: ObjTree) -> Self {
        MorTerm::Cast { body: Box::new(f), pinned: Some(Box::new((source, target))) }
    }

    pub fn boxed(f: MorTerm) -> Self {
        MorTerm::Boxed(Box::new(f))
    }

    /// Number of leaves (generators, identities, structural morphisms).
    pub fn size(&self) -> usize {
        match self {
            MorTerm::Gen(_) | MorTerm::Id(_) | MorTerm::Structural(_) => 1,
            MorTerm::Comp(f, g) | MorTerm::StrictComp(f, g) | MorTerm::Tensor(f, g) => f.size() + g.size(),
            MorTerm::Cast { body, .. } | MorTerm::Boxed(body) => body.size(),
        }
    }

    /// Replaces every `[f]` by `f`, recursively.
    pub fn inline_boxes(&self) -> MorTerm {
        self.map_boxes(&mut |inner| inner)
    }

    /// Rebuilds the term, passing each (already rebuilt) box content through `f`.
    pub fn map_boxes(&self, f: &mut impl FnMut(MorTerm) -> MorTerm) -> MorTerm {
        match self {
            MorTerm::Gen(_) | MorTerm::Id(_) | MorTerm::Structural(_) => self.clone(),
            MorTerm::Comp(a, b) => MorTerm::comp(a.map_boxes(f), b.map_boxes(f)),
            MorTerm::StrictComp(a, b) => MorTerm::strict_comp(a.map_boxes(f), b.map_boxes(f)),
            MorTerm::Tensor(a, b) => MorTerm::tensor(a.map_boxes(f), b.map_boxes(f)),
            MorTerm::Cast { body, pinned } => {
                MorTerm::Cast { body: Box::new(body.map_boxes(f)), pinned: pinned.clone() }
            }
            MorTerm::Boxed(inner) => {
                let inner = inner.map_boxes(f);
                f(inner)
            }
        }
    }

    /// Replaces every generator reference `name` by `body`.
    pub fn substitute(&self, name: &str, body: &MorTerm) -> MorTerm {
        match self {
            MorTerm::Gen(g) if g == name => body.clone(),
            MorTerm::Gen(_) | MorTerm::Id(_) | MorTerm::Structural(_) => self.clone(),
            MorTerm::Comp(a, b) => MorTerm::comp(a.substitute(name, body), b.substitute(name, body)),
            MorTerm::StrictComp(a, b) => MorTerm::strict_comp(a.substitute(name, body), b.substitute(name, body)),
            MorTerm::Tensor(a, b) => MorTerm::tensor(a.substitute(name, body), b.substitute(name, body)),
            MorTerm::Cast { body: inner, pinned } => {
                MorTerm::Cast { body: Box::new(inner.substitute(name, body)), pinned: pinned.clone() }
            }
            MorTerm::Boxed(inner) => MorTerm::boxed(inner.substitute(name, body)),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            MorTerm::Gen(g) => g == name,
            MorTerm::Id(_) | MorTerm::Structural(_) => false,
            MorTerm::Comp(a, b) | MorTerm::StrictComp(a, b) | MorTerm::Tensor(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            MorTerm::Cast { body, .. } | MorTerm::Boxed(body) => body.mentions(name),
        }
    }

    /// Top-level boxes in left-to-right order (boxes nested inside boxes are
    /// not visited).
    pub fn top_boxes(&self) -> Vec<&MorTerm> {
        let mut out = Vec::new();
        self.collect_top_boxes(&mut out);
        out
    }

    fn collect_top_boxes<'a>(&'a self, out: &mut Vec<&'a MorTerm>) {
        match self {
            MorTerm::Gen(_) | MorTerm::Id(_) | MorTerm::Structural(_) => {}
            MorTerm::Comp(a, b) | MorTerm::StrictComp(a, b) | MorTerm::Tensor(a, b) => {
                a.collect_top_boxes(out);
                b.collect_top_boxes(out);
            }
            MorTerm::Cast { body, .. } => body.collect_top_boxes(out),
            MorTerm::Boxed(inner) => out.push(inner),
        }
    }
}

/// Optional rendering hints attached to a generator declaration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Style {
    pub shape: Option<String>,
    pub color: Option<String>,
}

impl Style {
    pub fn is_empty(&self) -> bool {
        self.shape.is_none() && self.color.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDecl {
    pub name: String,
    pub source: ObjTree,
    pub target: ObjTree,
    #[serde(default, skip_serializing_if = "Style::is_empty")]
    pub style: Style,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// Atomic objects, in order of first appearance.
    pub objects: Vec<String>,
    pub generators: Vec<GeneratorDecl>,
}

impl Signature {
    pub fn has_object(&self, name: &str) -> bool {
        self.objects.iter().any(|o| o == name)
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorDecl> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub(crate) fn add_object(&mut self, name: &str) {
        if !self.has_object(name) {
            self.objects.push(name.to_string());
        }
    }
}

/// `≡` (endpoints must coincide as trees) or `≡'` (endpoints need only
/// have equal arities).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EqKind {
    Strict,
    UpToCast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub name: Option<String>,
    pub lhs: MorTerm,
    pub rhs: MorTerm,
    pub kind: EqKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub name: String,
    pub body: MorTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub signature: Signature,
    pub hypotheses: Vec<Equation>,
    pub definitions: Vec<Definition>,
    pub conclusion: Equation,
}

impl Goal {
    pub fn hypothesis(&self, name: &str) -> Option<&Equation> {
        self.hypotheses.iter().find(|h| h.name.as_deref() == Some(name))
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.name == name)
    }

    /// Every name bound by the goal.
    pub fn names(&self) -> HashSet<&str> {
        let mut names: HashSet<&str> = self.signature.objects.iter().map(String::as_str).collect();
        names.extend(self.signature.generators.iter().map(|g| g.name.as_str()));
        names.extend(self.hypotheses.iter().filter_map(|h| h.name.as_deref()));
        names.extend(self.definitions.iter().map(|d| d.name.as_str()));
        names
    }

    /// Resolves identifiers the way the goal file does.
    pub fn resolver(&self) -> Resolver<'_> {
        Resolver::new(&self.signature, self.definitions.iter().map(|d| d.name.as_str()))
    }
}
