//! String diagrams: nodes, ports and wires, with planar layouts.

mod boxing;
pub mod geometry;
mod json;
mod layout;
mod slice;
mod svg;

use std::collections::{HashMap, VecDeque};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strictify::{strictify, AMor, AtomRef, Options};
use crate::syntax::typing::{Context, TypedTerm};
use crate::syntax::Arity;

pub use boxing::{box_polygon, BoxError, Boxed};
pub use geometry::{Point, Polygon};
pub use json::{DecodeError, DiagramJson, SCHEMA_VERSION};
pub use layout::{layout, LaidOutDiagram, NodeBox};
pub use slice::{
    diagram_equiv, extract_expr, extract_expr_with, extract_nmor, slicing, ExtractError, Slice, SliceItem,
};
pub use svg::{render_svg, StyleSheet};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    Generator {
        name: String,
    },
    Boxed {
        inner: Box<StringDiagram>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outline: Option<Polygon>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    #[serde(flatten)]
    pub kind: NodeKind,
    pub inputs: Arity,
    pub outputs: Arity,
}

impl Node {
    pub fn generator(name: impl Into<String>, inputs: Arity, outputs: Arity) -> Node {
        Node { kind: NodeKind::Generator { name: name.into() }, inputs, outputs }
    }

    pub fn is_box(&self) -> bool {
        matches!(self.kind, NodeKind::Boxed { .. })
    }

    pub fn inner(&self) -> Option<&StringDiagram> {
        match &self.kind {
            NodeKind::Boxed { inner, .. } => Some(inner),
            NodeKind::Generator { .. } => None,
        }
    }
}

/// The upper end of a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Input(usize),
    Node(NodeId, usize),
}

/// The lower end of a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Sink {
    Output(usize),
    Node(NodeId, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: Source,
    pub to: Sink,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StringDiagram {
    pub inputs: Arity,
    pub outputs: Arity,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("port {0} is not connected exactly once")]
    Port(String),
    #[error("wire from {from} to {to} joins different objects")]
    Label { from: String, to: String },
    #[error("edge refers to a missing port {0}")]
    Dangling(String),
    #[error("the diagram has a cycle")]
    Cyclic,
    #[error("no node {0}")]
    NoNode(NodeId),
    #[error("node {0} is not a box")]
    NotABox(NodeId),
}

impl StringDiagram {
    pub fn identity(a: Arity) -> StringDiagram {
        let edges = (0..a.len()).map(|i| Edge { from: Source::Input(i), to: Sink::Output(i) }).collect();
        StringDiagram { inputs: a.clone(), outputs: a, nodes: Vec::new(), edges }
    }

    pub fn source_label(&self, s: Source) -> Option<&str> {
        match s {
            Source::Input(i) => self.inputs.0.get(i),
            Source::Node(n, j) => self.nodes.get(n)?.outputs.0.get(j),
        }
        .map(String::as_str)
    }

    pub fn sink_label(&self, s: Sink) -> Option<&str> {
        match s {
            Sink::Output(i) => self.outputs.0.get(i),
            Sink::Node(n, j) => self.nodes.get(n)?.inputs.0.get(j),
        }
        .map(String::as_str)
    }

    /// Edge index per source port.
    pub fn out_edges(&self) -> HashMap<Source, usize> {
        self.edges.iter().enumerate().map(|(i, e)| (e.from, i)).collect()
    }

    /// Edge index per sink port.
    pub fn in_edges(&self) -> HashMap<Sink, usize> {
        self.edges.iter().enumerate().map(|(i, e)| (e.to, i)).collect()
    }

    /// Checks port incidence, labels and acyclicity, recursively.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let mut sources: HashMap<Source, usize> = HashMap::new();
        let mut sinks: HashMap<Sink, usize> = HashMap::new();
        for e in &self.edges {
            let fl = self.source_label(e.from).ok_or_else(|| DiagramError::Dangling(format!("{:?}", e.from)))?;
            let tl = self.sink_label(e.to).ok_or_else(|| DiagramError::Dangling(format!("{:?}", e.to)))?;
            if fl != tl {
                return Err(DiagramError::Label { from: format!("{:?}", e.from), to: format!("{:?}", e.to) });
            }
            *sources.entry(e.from).or_default() += 1;
            *sinks.entry(e.to).or_default() += 1;
        }
        let mut expect_src: Vec<Source> = (0..self.inputs.len()).map(Source::Input).collect();
        let mut expect_sink: Vec<Sink> = (0..self.outputs.len()).map(Sink::Output).collect();
        for (n, node) in self.nodes.iter().enumerate() {
            expect_src.extend((0..node.outputs.len()).map(|j| Source::Node(n, j)));
            expect_sink.extend((0..node.inputs.len()).map(|j| Sink::Node(n, j)));
            if let Some(inner) = node.inner() {
                if inner.inputs != node.inputs || inner.outputs != node.outputs {
                    return Err(DiagramError::Port(format!("box {n} interface")));
                }
                inner.validate()?;
            }
        }
        if sources.len() != expect_src.len() || sources.values().any(|&c| c != 1) {
            let bad = expect_src.iter().find(|s| sources.get(s) != Some(&1));
            return Err(DiagramError::Port(format!("{bad:?}")));
        }
        if sinks.len() != expect_sink.len() || sinks.values().any(|&c| c != 1) {
            let bad = expect_sink.iter().find(|s| sinks.get(s) != Some(&1));
            return Err(DiagramError::Port(format!("{bad:?}")));
        }
        if self.topological_order().is_none() {
            return Err(DiagramError::Cyclic);
        }
        Ok(())
    }

    /// Nodes ordered so that every wire goes forward, or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for e in &self.edges {
            if let (Source::Node(a, _), Sink::Node(b, _)) = (e.from, e.to) {
                if a >= n || b >= n {
                    return None;
                }
                succ[a].push(b);
                indeg[b] += 1;
            }
        }
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (out.len() == n).then_some(out)
    }

    pub fn has_outputless_nodes(&self) -> bool {
        self.nodes.iter().any(|n| n.outputs.is_empty() || n.inner().is_some_and(StringDiagram::has_outputless_nodes))
    }

    /// Inlines box `id`. Returns the new diagram and, for each old node, its
    /// new index (`None` for the removed box). Inner nodes are appended.
    pub fn unbox(&self, id: NodeId) -> Result<(StringDiagram, Vec<Option<NodeId>>), DiagramError> {
        let node = self.nodes.get(id).ok_or(DiagramError::NoNode(id))?;
        let inner = node.inner().ok_or(DiagramError::NotABox(id))?;
        let mut map: Vec<Option<NodeId>> = Vec::with_capacity(self.nodes.len());
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if i == id {
                map.push(None);
            } else {
                map.push(Some(nodes.len()));
                nodes.push(n.clone());
            }
        }
        let base = nodes.len();
        nodes.extend(inner.nodes.iter().cloned());

        let remap_src = |s: Source| match s {
            Source::Node(n, j) => Source::Node(map[n].expect("box handled separately"), j),
            s => s,
        };
        let remap_sink = |s: Sink| match s {
            Sink::Node(n, j) => Sink::Node(map[n].expect("box handled separately"), j),
            s => s,
        };
        // what feeds box input i, and where box output j goes
        let mut feeds = vec![None; inner.inputs.len()];
        let mut drains = vec![None; inner.outputs.len()];
        let mut edges = Vec::new();
        for e in &self.edges {
            match (e.from, e.to) {
                (_, Sink::Node(n, i)) if n == id => feeds[i] = Some(e.from),
                (Source::Node(n, j), _) if n == id => drains[j] = Some(e.to),
                _ => edges.push(Edge { from: remap_src(e.from), to: remap_sink(e.to) }),
            }
        }
        for e in &inner.edges {
            let from = match e.from {
                Source::Input(i) => remap_src(feeds[i].ok_or(DiagramError::Port(format!("box {id} input {i}")))?),
                Source::Node(n, j) => Source::Node(base + n, j),
            };
            let to = match e.to {
                Sink::Output(j) => remap_sink(drains[j].ok_or(DiagramError::Port(format!("box {id} output {j}")))?),
                Sink::Node(n, j) => Sink::Node(base + n, j),
            };
            edges.push(Edge { from, to });
        }
        let d = StringDiagram { inputs: self.inputs.clone(), outputs: self.outputs.clone(), nodes, edges };
        Ok((d, map))
    }

    /// Inlines every box, recursively.
    pub fn flatten(&self) -> StringDiagram {
        let mut d = self.clone();
        while let Some(i) = d.nodes.iter().position(Node::is_box) {
            d = d.unbox(i).expect("validated box").0;
        }
        d
    }

    /// Graph isomorphism respecting port order, found by walking from the
    /// boundary. Components not reachable from the boundary are compared by
    /// their node labels only.
    pub fn isomorphic(&self, other: &StringDiagram) -> bool {
        if self.inputs != other.inputs || self.outputs != other.outputs || self.nodes.len() != other.nodes.len() {
            return false;
        }
        let (a_out, a_in) = (self.out_edges(), self.in_edges());
        let (b_out, b_in) = (other.out_edges(), other.in_edges());
        let mut map: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut used = vec![false; other.nodes.len()];
        let mut queue: VecDeque<(NodeId, NodeId)> = VecDeque::new();

        fn bind(
            a: NodeId,
            b: NodeId,
            map: &mut [Option<NodeId>],
            used: &mut [bool],
            queue: &mut VecDeque<(NodeId, NodeId)>,
        ) -> bool {
            match map[a] {
                Some(x) => x == b,
                None if used[b] => false,
                None => {
                    map[a] = Some(b);
                    used[b] = true;
                    queue.push_back((a, b));
                    true
                }
            }
        }
        let matches_end = |x: Sink, y: Sink| match (x, y) {
            (Sink::Output(i), Sink::Output(j)) => i == j,
            (Sink::Node(_, i), Sink::Node(_, j)) => i == j,
            _ => false,
        };
        let matches_start = |x: Source, y: Source| match (x, y) {
            (Source::Input(i), Source::Input(j)) => i == j,
            (Source::Node(_, i), Source::Node(_, j)) => i == j,
            _ => false,
        };
        for i in 0..self.inputs.len() {
            let (ea, eb) = (&self.edges[a_out[&Source::Input(i)]], &other.edges[b_out[&Source::Input(i)]]);
            if !matches_end(ea.to, eb.to) {
                return false;
            }
            if let (Sink::Node(x, _), Sink::Node(y, _)) = (ea.to, eb.to) {
                if !bind(x, y, &mut map, &mut used, &mut queue) {
                    return false;
                }
            }
        }
        for i in 0..self.outputs.len() {
            let (ea, eb) = (&self.edges[a_in[&Sink::Output(i)]], &other.edges[b_in[&Sink::Output(i)]]);
            if !matches_start(ea.from, eb.from) {
                return false;
            }
            if let (Source::Node(x, _), Source::Node(y, _)) = (ea.from, eb.from) {
                if !bind(x, y, &mut map, &mut used, &mut queue) {
                    return false;
                }
            }
        }
        loop {
            while let Some((a, b)) = queue.pop_front() {
                let (na, nb) = (&self.nodes[a], &other.nodes[b]);
                if na.inputs != nb.inputs || na.outputs != nb.outputs || !same_kind(na, nb) {
                    return false;
                }
                for j in 0..na.inputs.len() {
                    let (ea, eb) = (&self.edges[a_in[&Sink::Node(a, j)]], &other.edges[b_in[&Sink::Node(b, j)]]);
                    if !matches_start(ea.from, eb.from) {
                        return false;
                    }
                    if let (Source::Node(x, _), Source::Node(y, _)) = (ea.from, eb.from) {
                        if !bind(x, y, &mut map, &mut used, &mut queue) {
                            return false;
                        }
                    }
                }
                for j in 0..na.outputs.len() {
                    let (ea, eb) = (&self.edges[a_out[&Source::Node(a, j)]], &other.edges[b_out[&Source::Node(b, j)]]);
                    if !matches_end(ea.to, eb.to) {
                        return false;
                    }
                    if let (Sink::Node(x, _), Sink::Node(y, _)) = (ea.to, eb.to) {
                        if !bind(x, y, &mut map, &mut used, &mut queue) {
                            return false;
                        }
                    }
                }
            }
            // seed an unreached component by label
            let Some(a) = map.iter().position(Option::is_none) else { return true };
            let Some(b) = (0..other.nodes.len()).find(|&b| {
                !used[b] && same_kind(&self.nodes[a], &other.nodes[b]) && self.nodes[a].inputs == other.nodes[b].inputs
            }) else {
                return false;
            };
            if !bind(a, b, &mut map, &mut used, &mut queue) {
                return false;
            }
        }
    }
}

fn same_kind(a: &Node, b: &Node) -> bool {
    match (&a.kind, &b.kind) {
        (NodeKind::Generator { name: x }, NodeKind::Generator { name: y }) => x == y,
        (NodeKind::Boxed { inner: x, .. }, NodeKind::Boxed { inner: y, .. }) => x.isomorphic(y),
        _ => false,
    }
}

/// Builds the diagram of a strict morphism. Boxes become box nodes; nodes
/// are numbered in left-to-right order of the term.
pub fn diagram_of_amor(m: &AMor) -> StringDiagram {
    let mut d = StringDiagram { inputs: m.source(), outputs: m.target(), ..Default::default() };
    let ins: Vec<Source> = (0..d.inputs.len()).map(Source::Input).collect();
    let outs = plug(m, &mut d, ins);
    for (j, s) in outs.into_iter().enumerate() {
        d.edges.push(Edge { from: s, to: Sink::Output(j) });
    }
    d
}

fn plug(m: &AMor, d: &mut StringDiagram, ins: Vec<Source>) -> Vec<Source> {
    match m {
        AMor::Id(_) => ins,
        AMor::Atom { atom, source, target } => {
            let id = d.nodes.len();
            let kind = match atom {
                AtomRef::Named(n) => NodeKind::Generator { name: n.clone() },
                AtomRef::Boxed(inner) => NodeKind::Boxed { inner: Box::new(diagram_of_amor(inner)), outline: None },
            };
            d.nodes.push(Node { kind, inputs: source.clone(), outputs: target.clone() });
            for (i, s) in ins.into_iter().enumerate() {
                d.edges.push(Edge { from: s, to: Sink::Node(id, i) });
            }
            (0..target.len()).map(|j| Source::Node(id, j)).collect()
        }
        AMor::Comp(f, g) => {
            let mid = plug(f, d, ins);
            plug(g, d, mid)
        }
        AMor::Tens(f, g) => {
            let mut ins = ins;
            let rest = ins.split_off(f.source().len());
            let mut outs = plug(f, d, ins);
            outs.extend(plug(g, d, rest));
            outs
        }
    }
}

/// The diagram of a typed term, keeping boxes and definitions opaque.
pub fn diagram_of_term(ctx: &Context, t: &TypedTerm) -> StringDiagram {
    diagram_of_amor(&strictify(ctx, t, Options::DIAGRAM))
}
