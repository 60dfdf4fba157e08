//! Row normal forms for strict morphisms.
//!
//! A morphism is a stack of rows, each row a tensor of identity pads and
//! exactly-placed atoms. Atoms are pushed as far towards the target as
//! planarity allows. Two morphisms without output-free atoms are equal iff
//! their normal forms coincide; with such atoms the normal form can differ
//! for equal morphisms, and [`decide_equal`] answers `Unknown`.

mod sink;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::maclane::list_form;
use crate::strictify::{strictify, AMor, AtomRef, Options};
use crate::syntax::typing::{Context, TypeError, TypedTerm};
use crate::syntax::{Arity, MorTerm, ObjTree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Atom {
    Named(String),
    Boxed(Box<NMor>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomCell {
    pub atom: Atom,
    pub input: Arity,
    pub output: Arity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Pad(Arity),
    Atom(AtomCell),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NMor {
    pub source: Arity,
    pub target: Arity,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    NotEqual,
    Unknown,
}

impl Row {
    pub fn source(&self) -> Arity {
        self.cells
            .iter()
            .flat_map(|c| match c {
                Cell::Pad(a) => a.iter(),
                Cell::Atom(a) => a.input.iter(),
            })
            .cloned()
            .collect()
    }

    pub fn target(&self) -> Arity {
        self.cells
            .iter()
            .flat_map(|c| match c {
                Cell::Pad(a) => a.iter(),
                Cell::Atom(a) => a.output.iter(),
            })
            .cloned()
            .collect()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AtomCell> {
        self.cells.iter().filter_map(|c| match c {
            Cell::Atom(a) => Some(a),
            Cell::Pad(_) => None,
        })
    }

    fn has_atoms(&self) -> bool {
        self.atoms().next().is_some()
    }

    fn single(cell: AtomCell) -> Row {
        Row { cells: vec![Cell::Atom(cell)] }
    }

    fn padded(&self, left: &Arity, right: &Arity) -> Row {
        let mut cells = Vec::with_capacity(self.cells.len() + 2);
        if !left.is_empty() {
            cells.push(Cell::Pad(left.clone()));
        }
        cells.extend(self.cells.iter().cloned());
        if !right.is_empty() {
            cells.push(Cell::Pad(right.clone()));
        }
        sink::from_items(sink::items(&Row { cells }))
    }
}

impl NMor {
    pub fn identity(a: Arity) -> NMor {
        NMor { source: a.clone(), target: a, rows: Vec::new() }
    }

    pub fn atom_count(&self) -> usize {
        self.rows.iter().map(|r| r.atoms().count()).sum()
    }

    pub fn has_empty_target(&self) -> bool {
        self.rows
            .iter()
            .flat_map(Row::atoms)
            .any(|a| a.output.is_empty() || matches!(&a.atom, Atom::Boxed(inner) if inner.has_empty_target()))
    }

    /// Rebuilds a surface term, one `·`-chain per row. Adjacent rows are
    /// joined with `;` when their bracketings agree and `;;` otherwise.
    pub fn to_term(&self, ctx: &Context) -> Result<MorTerm, TypeError> {
        if self.rows.is_empty() {
            return Ok(wires(&self.source));
        }
        let mut acc: Option<(MorTerm, ObjTree)> = None;
        for row in &self.rows {
            let t = row_term(row, ctx)?;
            let typed = ctx.typecheck(&t)?;
            acc = Some(match acc {
                None => (t, typed.target),
                Some((prev, tgt)) => {
                    let joined =
                        if tgt == typed.source { MorTerm::comp(prev, t) } else { MorTerm::strict_comp(prev, t) };
                    (joined, typed.target)
                }
            });
        }
        Ok(acc.expect("at least one row").0)
    }
}

fn wires(a: &Arity) -> MorTerm {
    if a.is_empty() {
        return MorTerm::Id(ObjTree::Unit);
    }
    chain(a.iter().map(|w| MorTerm::Id(ObjTree::atom(w.as_str()))).collect())
}

fn chain(mut parts: Vec<MorTerm>) -> MorTerm {
    let mut acc = parts.pop().expect("non-empty chain");
    while let Some(p) = parts.pop() {
        acc = MorTerm::tensor(p, acc);
    }
    acc
}

fn row_term(row: &Row, ctx: &Context) -> Result<MorTerm, TypeError> {
    let mut parts = Vec::new();
    for c in &row.cells {
        match c {
            Cell::Pad(a) => parts.extend(a.iter().map(|w| MorTerm::Id(ObjTree::atom(w.as_str())))),
            Cell::Atom(cell) => parts.push(match &cell.atom {
                Atom::Named(n) => MorTerm::gen(n.clone()),
                Atom::Boxed(inner) => MorTerm::boxed(inner.to_term(ctx)?),
            }),
        }
    }
    Ok(chain(parts))
}

/// Normalizes a strict morphism.
pub fn norm(f: &AMor) -> NMor {
    match f {
        AMor::Atom { atom, source, target } => {
            let atom = match atom {
                AtomRef::Named(n) => Atom::Named(n.clone()),
                AtomRef::Boxed(inner) => Atom::Boxed(Box::new(norm(inner))),
            };
            let cell = AtomCell { atom, input: source.clone(), output: target.clone() };
            NMor { source: source.clone(), target: target.clone(), rows: vec![Row::single(cell)] }
        }
        AMor::Id(a) => NMor::identity(a.clone()),
        AMor::Comp(f, g) => {
            let (nf, ng) = (norm(f), norm(g));
            let mut rows = nf.rows;
            rows.extend(ng.rows);
            settle(NMor { source: nf.source, target: ng.target, rows })
        }
        AMor::Tens(f, g) => {
            let (nf, ng) = (norm(f), norm(g));
            let empty = Arity::empty();
            let mut rows: Vec<Row> = nf.rows.iter().map(|r| r.padded(&empty, &ng.source)).collect();
            rows.extend(ng.rows.iter().map(|r| r.padded(&nf.target, &empty)));
            settle(NMor { source: nf.source.concat(&ng.source), target: nf.target.concat(&ng.target), rows })
        }
    }
}

fn settle(mut m: NMor) -> NMor {
    m.rows.retain(Row::has_atoms);
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < m.rows.len() {
            if let Some((up, low)) = sink::sink_once(&m.rows[i], &m.rows[i + 1]) {
                debug_assert_eq!(sink::width_out(&up), low.source().len());
                m.rows[i] = up;
                m.rows[i + 1] = low;
                changed = true;
                if !m.rows[i].has_atoms() {
                    m.rows.remove(i);
                    i = i.saturating_sub(1);
                }
            } else {
                i += 1;
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Normal form of a typed term with boxes inlined and definitions expanded.
pub fn normal_form(ctx: &Context, t: &TypedTerm) -> NMor {
    norm(&strictify(ctx, t, Options::default()))
}

pub fn decide_equal(ctx: &Context, lhs: &TypedTerm, rhs: &TypedTerm) -> Verdict {
    decide_nf(&normal_form(ctx, lhs), &normal_form(ctx, rhs))
}

pub fn decide_nf(l: &NMor, r: &NMor) -> Verdict {
    if l.source != r.source || l.target != r.target {
        Verdict::NotEqual
    } else if l == r {
        Verdict::Equal
    } else if l.has_empty_target() || r.has_empty_target() {
        Verdict::Unknown
    } else {
        Verdict::NotEqual
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "equal",
            Verdict::NotEqual => "not equal",
            Verdict::Unknown => "unknown",
        })
    }
}

fn write_wires(f: &mut fmt::Formatter<'_>, a: &Arity) -> fmt::Result {
    for (i, w) in a.iter().enumerate() {
        if i > 0 {
            f.write_str("·")?;
        }
        f.write_str(w)?;
    }
    Ok(())
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            match c {
                Cell::Pad(a) => write_wires(f, a)?,
                Cell::Atom(a) => match &a.atom {
                    Atom::Named(n) => f.write_str(n)?,
                    Atom::Boxed(inner) => write!(f, "[{inner}]")?,
                },
            }
        }
        Ok(())
    }
}

impl fmt::Display for NMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            if self.source.is_empty() {
                return f.write_str("1");
            }
            return write_wires(f, &self.source);
        }
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// The list-form bracketing of `a`, for callers that need a concrete tree.
pub fn tree_of(a: &Arity) -> ObjTree {
    list_form(a)
}
