//! Erasing bracketing: typed terms become morphisms between flat arities,
//! with every structural isomorphism turned into an identity.

use serde::{Deserialize, Serialize};

use crate::syntax::typing::{Context, TypedKind, TypedTerm};
use crate::syntax::Arity;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomRef {
    Named(String),
    Boxed(Box<AMor>),
}

/// A morphism of the strict category on arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AMor {
    Atom { atom: AtomRef, source: Arity, target: Arity },
    Id(Arity),
    Comp(Box<AMor>, Box<AMor>),
    Tens(Box<AMor>, Box<AMor>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoxMode {
    /// Boxes disappear; their content is spliced in.
    #[default]
    Inline,
    /// Boxes become atoms carrying their strictified content.
    Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DefMode {
    /// Definitions are replaced by their bodies.
    #[default]
    Expand,
    /// Definitions stay atomic, named after the definition.
    Opaque,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Options {
    pub boxes: BoxMode,
    pub defs: DefMode,
}

impl Options {
    pub const DIAGRAM: Options = Options { boxes: BoxMode::Keep, defs: DefMode::Opaque };
}

impl AMor {
    pub fn comp(f: AMor, g: AMor) -> AMor {
        match (f, g) {
            (AMor::Id(_), g) => g,
            (f, AMor::Id(_)) => f,
            (f, g) => AMor::Comp(Box::new(f), Box::new(g)),
        }
    }

    pub fn tens(f: AMor, g: AMor) -> AMor {
        match (f, g) {
            (AMor::Id(a), AMor::Id(b)) => AMor::Id(a.concat(&b)),
            (f, g) if f.is_unit_id() => g,
            (f, g) if g.is_unit_id() => f,
            (f, g) => AMor::Tens(Box::new(f), Box::new(g)),
        }
    }

    fn is_unit_id(&self) -> bool {
        matches!(self, AMor::Id(a) if a.is_empty())
    }

    pub fn atom(name: impl Into<String>, source: Arity, target: Arity) -> AMor {
        AMor::Atom { atom: AtomRef::Named(name.into()), source, target }
    }

    pub fn source(&self) -> Arity {
        match self {
            AMor::Atom { source, .. } => source.clone(),
            AMor::Id(a) => a.clone(),
            AMor::Comp(f, _) => f.source(),
            AMor::Tens(f, g) => f.source().concat(&g.source()),
        }
    }

    pub fn target(&self) -> Arity {
        match self {
            AMor::Atom { target, .. } => target.clone(),
            AMor::Id(a) => a.clone(),
            AMor::Comp(_, g) => g.target(),
            AMor::Tens(f, g) => f.target().concat(&g.target()),
        }
    }

    /// Whether some atom (inside boxes too) has no outputs.
    pub fn has_empty_target(&self) -> bool {
        match self {
            AMor::Atom { atom, target, .. } => {
                target.is_empty() || matches!(atom, AtomRef::Boxed(inner) if inner.has_empty_target())
            }
            AMor::Id(_) => false,
            AMor::Comp(f, g) | AMor::Tens(f, g) => f.has_empty_target() || g.has_empty_target(),
        }
    }
}

pub fn strictify(ctx: &Context, t: &TypedTerm, opts: Options) -> AMor {
    match &t.kind {
        TypedKind::Gen(g) => AMor::atom(g.clone(), t.source.arity(), t.target.arity()),
        TypedKind::Def(d) => match (opts.defs, ctx.definition(d)) {
            (DefMode::Expand, Some(body)) => strictify(ctx, body, opts),
            _ => AMor::atom(d.clone(), t.source.arity(), t.target.arity()),
        },
        TypedKind::Id | TypedKind::Structural(_) | TypedKind::Iso(_) => AMor::Id(t.source.arity()),
        TypedKind::Comp(f, g) => AMor::comp(strictify(ctx, f, opts), strictify(ctx, g, opts)),
        TypedKind::Tensor(f, g) => AMor::tens(strictify(ctx, f, opts), strictify(ctx, g, opts)),
        TypedKind::Boxed(inner) => {
            let content = strictify(ctx, inner, opts);
            match opts.boxes {
                BoxMode::Inline => content,
                BoxMode::Keep => AMor::Atom {
                    source: t.source.arity(),
                    target: t.target.arity(),
                    atom: AtomRef::Boxed(Box::new(content)),
                },
            }
        }
    }
}
