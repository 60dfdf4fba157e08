//! Printing in the same syntax the parser reads.

use std::fmt::{self, Write};

use super::{MorTerm, ObjTree, StructKind, Structural};

/// Which glyphs to print operators with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Notation {
    #[default]
    Unicode,
    Ascii,
}

impl Notation {
    fn otimes(self) -> &'static str {
        match self {
            Notation::Unicode => "⊗",
            Notation::Ascii => "*",
        }
    }

    fn dot(self) -> &'static str {
        match self {
            Notation::Unicode => "·",
            Notation::Ascii => ".",
        }
    }

    pub fn obj(self, t: &ObjTree) -> String {
        let mut s = String::new();
        write_obj(&mut s, t, self, false).unwrap();
        s
    }

    pub fn term(self, t: &MorTerm) -> String {
        let mut s = String::new();
        write_term(&mut s, t, self, 0).unwrap();
        s
    }
}

fn write_obj(out: &mut impl Write, t: &ObjTree, n: Notation, paren: bool) -> fmt::Result {
    match t {
        ObjTree::Atom(a) => out.write_str(a),
        ObjTree::Unit => out.write_str("1"),
        ObjTree::Tensor(a, b) => {
            if paren {
                out.write_char('(')?;
            }
            write_obj(out, a, n, matches!(**a, ObjTree::Tensor(..)))?;
            out.write_str(n.otimes())?;
            write_obj(out, b, n, false)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn write_structural(out: &mut impl Write, s: &Structural, n: Notation) -> fmt::Result {
    let (name, args): (&str, Vec<&ObjTree>) = match &s.kind {
        StructKind::Assoc(a, b, c) => ("assoc", vec![a, b, c]),
        StructKind::UnitL(a) => ("unitl", vec![a]),
        StructKind::UnitR(a) => ("unitr", vec![a]),
    };
    write!(out, "{name}[")?;
    for (i, a) in args.into_iter().enumerate() {
        if i > 0 {
            out.write_char(',')?;
        }
        write_obj(out, a, n, false)?;
    }
    out.write_char(']')?;
    if s.inverse {
        out.write_char('~')?;
    }
    Ok(())
}

// Levels: 0 composition, 1 tensor, 2 cast, 3 atomic.
fn level_of(t: &MorTerm) -> u8 {
    match t {
        MorTerm::Comp(..) | MorTerm::StrictComp(..) => 0,
        MorTerm::Tensor(..) => 1,
        MorTerm::Cast { .. } => 2,
        _ => 3,
    }
}

fn write_term(out: &mut impl Write, t: &MorTerm, n: Notation, min: u8) -> fmt::Result {
    if level_of(t) < min {
        out.write_char('(')?;
        write_term(out, t, n, 0)?;
        return out.write_char(')');
    }
    match t {
        MorTerm::Gen(g) => out.write_str(g),
        MorTerm::Id(tree) => write_obj(out, tree, n, false),
        MorTerm::Structural(s) => write_structural(out, s, n),
        MorTerm::Comp(a, b) | MorTerm::StrictComp(a, b) => {
            write_term(out, a, n, 0)?;
            out.write_str(if matches!(t, MorTerm::Comp(..)) { " ; " } else { " ;; " })?;
            write_term(out, b, n, 1)
        }
        MorTerm::Tensor(a, b) => {
            write_term(out, a, n, 2)?;
            out.write_str(n.dot())?;
            write_term(out, b, n, 1)
        }
        MorTerm::Cast { body, .. } => {
            out.write_str("cast ")?;
            write_term(out, body, n, 2)
        }
        MorTerm::Boxed(inner) => {
            out.write_char('[')?;
            write_term(out, inner, n, 0)?;
            out.write_char(']')
        }
    }
}

impl fmt::Display for ObjTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_obj(f, self, Notation::Unicode, false)
    }
}

/// Pinned cast endpoints are not printed; they only arise from rewriting.
impl fmt::Display for MorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, Notation::Unicode, 0)
    }
}

impl fmt::Display for Structural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_structural(f, self, Notation::Unicode)
    }
}
