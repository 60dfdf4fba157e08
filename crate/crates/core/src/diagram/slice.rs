//! Reading a diagram back as rows, bottom up, taking every node whose
//! outputs are all available.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DiagramError, NodeId, NodeKind, Sink, Source, StringDiagram};
use crate::normalize::{Atom, AtomCell, Cell, NMor, Row, Verdict};
use crate::syntax::typing::{Context, TypeError};
use crate::syntax::{Arity, MorTerm, ObjTree};

/// Search steps allowed when placing output-free nodes.
const BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Invalid(#[from] DiagramError),
    #[error("the diagram admits no planar reading")]
    Nonplanar,
    #[error("gave up placing output-free nodes")]
    Budget,
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceItem {
    /// An edge passing through the row.
    Pad(usize),
    Node(NodeId),
}

/// Rows top to bottom; `lines[k]` lists the edges above row `k`, and the
/// last line lists the edges reaching the outer outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub lines: Vec<Vec<usize>>,
    pub rows: Vec<Vec<SliceItem>>,
}

struct Search<'d> {
    d: &'d StringDiagram,
    node_in: Vec<Vec<usize>>,
    node_out: Vec<Vec<usize>>,
    inputs: Vec<usize>,
    placed: Vec<bool>,
    rows: Vec<Vec<SliceItem>>,
    budget: usize,
}

enum Outcome {
    Done,
    Dead,
    Exhausted,
}

impl Search<'_> {
    fn run(&mut self, frontier: Vec<usize>) -> Outcome {
        if self.budget == 0 {
            return Outcome::Exhausted;
        }
        self.budget -= 1;
        if self.placed.iter().all(|&p| p) {
            return if frontier == self.inputs { Outcome::Done } else { Outcome::Dead };
        }
        let pos: HashMap<usize, usize> = frontier.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut forced: Vec<(usize, NodeId)> = Vec::new();
        let mut zero: Vec<NodeId> = Vec::new();
        for n in 0..self.d.nodes.len() {
            if self.placed[n] {
                continue;
            }
            let outs = &self.node_out[n];
            if outs.is_empty() {
                zero.push(n);
                continue;
            }
            let Some(ps) = outs.iter().map(|e| pos.get(e).copied()).collect::<Option<Vec<_>>>() else {
                continue;
            };
            if ps.windows(2).all(|w| w[1] == w[0] + 1) {
                forced.push((ps[0], n));
            }
        }
        forced.sort();
        let mut choice = vec![None; zero.len()];
        self.choose(&frontier, &forced, &zero, &mut choice, 0)
    }

    fn choose(
        &mut self,
        frontier: &[usize],
        forced: &[(usize, NodeId)],
        zero: &[NodeId],
        choice: &mut Vec<Option<usize>>,
        k: usize,
    ) -> Outcome {
        if k == zero.len() {
            if forced.is_empty() && choice.iter().all(Option::is_none) {
                return Outcome::Dead;
            }
            return self.emit(frontier, forced, zero, choice);
        }
        let blocked: Vec<bool> = (0..=frontier.len())
            .map(|g| forced.iter().any(|&(p, n)| p < g && g < p + self.node_out[n].len()))
            .collect();
        for g in 0..=frontier.len() {
            if blocked[g] {
                continue;
            }
            choice[k] = Some(g);
            match self.choose(frontier, forced, zero, choice, k + 1) {
                Outcome::Dead => {}
                other => return other,
            }
        }
        choice[k] = None;
        self.choose(frontier, forced, zero, choice, k + 1)
    }

    fn emit(
        &mut self,
        frontier: &[usize],
        forced: &[(usize, NodeId)],
        zero: &[NodeId],
        choice: &[Option<usize>],
    ) -> Outcome {
        let mut row = Vec::new();
        let at_gap = |g: usize, row: &mut Vec<SliceItem>| {
            for (i, c) in choice.iter().enumerate() {
                if *c == Some(g) {
                    row.push(SliceItem::Node(zero[i]));
                }
            }
        };
        let mut i = 0;
        let mut f = forced.iter().peekable();
        while i < frontier.len() {
            at_gap(i, &mut row);
            match f.peek() {
                Some(&&(p, n)) if p == i => {
                    row.push(SliceItem::Node(n));
                    i += self.node_out[n].len();
                    f.next();
                }
                _ => {
                    row.push(SliceItem::Pad(frontier[i]));
                    i += 1;
                }
            }
        }
        at_gap(frontier.len(), &mut row);

        let mut upper = Vec::new();
        for it in &row {
            match *it {
                SliceItem::Pad(e) => upper.push(e),
                SliceItem::Node(n) => upper.extend(self.node_in[n].iter().copied()),
            }
        }
        let newly: Vec<NodeId> = row
            .iter()
            .filter_map(|it| match *it {
                SliceItem::Node(n) => Some(n),
                SliceItem::Pad(_) => None,
            })
            .collect();
        for &n in &newly {
            self.placed[n] = true;
        }
        self.rows.push(row);
        let r = self.run(upper);
        if !matches!(r, Outcome::Done) {
            self.rows.pop();
            for &n in &newly {
                self.placed[n] = false;
            }
        }
        r
    }
}

/// Cuts a diagram into rows, bottom up, each as full as possible.
pub fn slicing(d: &StringDiagram) -> Result<Slice, ExtractError> {
    d.validate()?;
    let (out_map, in_map) = (d.out_edges(), d.in_edges());
    let node_in = d
        .nodes
        .iter()
        .enumerate()
        .map(|(n, node)| (0..node.inputs.len()).map(|j| in_map[&Sink::Node(n, j)]).collect())
        .collect();
    let node_out = d
        .nodes
        .iter()
        .enumerate()
        .map(|(n, node)| (0..node.outputs.len()).map(|j| out_map[&Source::Node(n, j)]).collect())
        .collect();
    let inputs = (0..d.inputs.len()).map(|i| out_map[&Source::Input(i)]).collect();
    let bottom: Vec<usize> = (0..d.outputs.len()).map(|i| in_map[&Sink::Output(i)]).collect();
    // scalars fit anywhere, so they stay out of the search and go first in the bottom row
    let scalars: Vec<NodeId> =
        (0..d.nodes.len()).filter(|&n| d.nodes[n].inputs.is_empty() && d.nodes[n].outputs.is_empty()).collect();
    let mut placed = vec![false; d.nodes.len()];
    for &n in &scalars {
        placed[n] = true;
    }
    let mut s = Search { d, node_in, node_out, inputs, placed, rows: Vec::new(), budget: BUDGET };
    match s.run(bottom.clone()) {
        Outcome::Done => {}
        Outcome::Dead => return Err(ExtractError::Nonplanar),
        Outcome::Exhausted => return Err(ExtractError::Budget),
    }
    let mut rows = s.rows;
    if !scalars.is_empty() {
        if rows.is_empty() {
            rows.push(bottom.iter().map(|&e| SliceItem::Pad(e)).collect());
        }
        rows[0].splice(0..0, scalars.into_iter().map(SliceItem::Node));
    }
    rows.reverse();
    Ok(rebuild_lines(d, rows, bottom))
}

fn rebuild_lines(d: &StringDiagram, rows: Vec<Vec<SliceItem>>, bottom: Vec<usize>) -> Slice {
    let in_map = d.in_edges();
    let mut lines = Vec::with_capacity(rows.len() + 1);
    for row in &rows {
        let mut line = Vec::new();
        for it in row {
            match *it {
                SliceItem::Pad(e) => line.push(e),
                SliceItem::Node(n) => line.extend((0..d.nodes[n].inputs.len()).map(|j| in_map[&Sink::Node(n, j)])),
            }
        }
        lines.push(line);
    }
    lines.push(bottom);
    Slice { lines, rows }
}

fn label(d: &StringDiagram, e: usize) -> String {
    d.source_label(d.edges[e].from).expect("validated").to_string()
}

/// The row normal form read off the diagram; boxes are read recursively.
pub fn extract_nmor(d: &StringDiagram) -> Result<NMor, ExtractError> {
    let s = slicing(d)?;
    let mut rows = Vec::with_capacity(s.rows.len());
    for row in &s.rows {
        let mut cells: Vec<Cell> = Vec::new();
        for it in row {
            match *it {
                SliceItem::Pad(e) => {
                    let l = label(d, e);
                    match cells.last_mut() {
                        Some(Cell::Pad(a)) => a.0.push(l),
                        _ => cells.push(Cell::Pad(Arity(vec![l]))),
                    }
                }
                SliceItem::Node(n) => {
                    let node = &d.nodes[n];
                    let atom = match &node.kind {
                        NodeKind::Generator { name } => Atom::Named(name.clone()),
                        NodeKind::Boxed { inner, .. } => Atom::Boxed(Box::new(extract_nmor(inner)?)),
                    };
                    cells.push(Cell::Atom(AtomCell { atom, input: node.inputs.clone(), output: node.outputs.clone() }));
                }
            }
        }
        rows.push(Row { cells });
    }
    Ok(NMor { source: d.inputs.clone(), target: d.outputs.clone(), rows })
}

/// The normal-form expression of a diagram.
pub fn extract_expr(ctx: &Context, d: &StringDiagram) -> Result<MorTerm, ExtractError> {
    extract_expr_with(ctx, d, &mut |_, _| None)
}

/// Like [`extract_expr`], but `content` may supply the text of a box
/// (given its node id and inner diagram) instead of reading it recursively.
pub fn extract_expr_with(
    ctx: &Context,
    d: &StringDiagram,
    content: &mut dyn FnMut(NodeId, &StringDiagram) -> Option<MorTerm>,
) -> Result<MorTerm, ExtractError> {
    let s = slicing(d)?;
    if s.rows.is_empty() {
        return Ok(wires(&d.inputs));
    }
    let mut acc: Option<(MorTerm, ObjTree)> = None;
    for row in &s.rows {
        let mut parts = Vec::new();
        for it in row {
            match *it {
                SliceItem::Pad(e) => parts.push(MorTerm::Id(ObjTree::atom(label(d, e)))),
                SliceItem::Node(n) => parts.push(match &d.nodes[n].kind {
                    NodeKind::Generator { name } => MorTerm::gen(name.clone()),
                    NodeKind::Boxed { inner, .. } => {
                        let body = match content(n, inner) {
                            Some(t) => t,
                            None => extract_expr(ctx, inner)?,
                        };
                        MorTerm::boxed(body)
                    }
                }),
            }
        }
        let t = chain(parts);
        let typed = ctx.typecheck(&t)?;
        acc = Some(match acc {
            None => (t, typed.target),
            Some((prev, tgt)) if tgt == typed.source => (MorTerm::comp(prev, t), typed.target),
            Some((prev, _)) => (MorTerm::strict_comp(prev, t), typed.target),
        });
    }
    Ok(acc.expect("nonempty").0)
}

fn wires(a: &Arity) -> MorTerm {
    if a.is_empty() {
        return MorTerm::Id(ObjTree::Unit);
    }
    chain(a.iter().map(|w| MorTerm::Id(ObjTree::atom(w.as_str()))).collect())
}

fn chain(mut parts: Vec<MorTerm>) -> MorTerm {
    let mut acc = parts.pop().expect("row has items");
    while let Some(p) = parts.pop() {
        acc = MorTerm::tensor(p, acc);
    }
    acc
}

/// Equivalence up to deformation, with boxes inlined.
pub fn diagram_equiv(a: &StringDiagram, b: &StringDiagram) -> Verdict {
    if a.inputs != b.inputs || a.outputs != b.outputs {
        return Verdict::NotEqual;
    }
    let (fa, fb) = (a.flatten(), b.flatten());
    match (extract_nmor(&fa), extract_nmor(&fb)) {
        (Ok(x), Ok(y)) if x == y => Verdict::Equal,
        (Ok(_), Ok(_)) if fa.has_outputless_nodes() || fb.has_outputless_nodes() => Verdict::Unknown,
        _ => Verdict::NotEqual,
    }
}
