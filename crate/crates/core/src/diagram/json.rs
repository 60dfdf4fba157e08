//! The JSON form of a laid-out diagram, as consumed by editors.
//!
//! Coordinates are scaled so the top level is 1000 units wide. Box contents
//! are nested under their node, in the same coordinates as the top level.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{Point, Polygon};
use super::layout::LaidOutDiagram;
use super::{DiagramError, Edge, Node, NodeKind, Sink, Source, StringDiagram};
use crate::syntax::Arity;

pub const SCHEMA_VERSION: &str = "moncat-diagram/1";
const VIEW_WIDTH: f64 = 1000.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PortJson {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct NodeJson {
    pub id: usize,
    /// `"generator"` or `"box"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outline: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<DiagramJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct EdgeJson {
    pub id: usize,
    pub from: Source,
    pub to: Sink,
    pub label: String,
    pub route: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DiagramJson {
    pub schema: String,
    pub width: f64,
    pub height: f64,
    pub inputs: Vec<PortJson>,
    pub outputs: Vec<PortJson>,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {0:?}")]
    Schema(String),
    #[error("node {0} has kind {1:?}")]
    Kind(usize, String),
    #[error("node ids must be 0, 1, 2, ... in order")]
    Ids,
    #[error(transparent)]
    Invalid(#[from] DiagramError),
}

#[derive(Clone, Copy)]
struct Frame {
    dx: f64,
    dy: f64,
    k: f64,
}

impl Frame {
    fn p(self, p: Point) -> Point {
        Point::new((p.x + self.dx) * self.k, (p.y + self.dy) * self.k)
    }
}

fn export(l: &LaidOutDiagram, f: Frame) -> DiagramJson {
    let d = &l.diagram;
    let port = |label: &String, p: Point| {
        let q = f.p(p);
        PortJson { label: label.clone(), x: q.x, y: q.y }
    };
    let nodes = d
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let b = &l.nodes[i];
            let c = f.p(b.center);
            let (kind, name, outline, inner) = match &node.kind {
                NodeKind::Generator { name } => ("generator", Some(name.clone()), None, None),
                NodeKind::Boxed { outline, .. } => {
                    let inner = l.children[i].as_ref().map(|child| {
                        let sub = Frame {
                            dx: b.center.x - child.width / 2.0 + f.dx,
                            dy: b.center.y - child.height / 2.0 + f.dy,
                            k: f.k,
                        };
                        Box::new(export(child, sub))
                    });
                    let outline = outline
                        .as_ref()
                        .map(|p| p.translate(b.center.x, b.center.y).points.iter().map(|&q| f.p(q)).collect());
                    ("box", None, outline, inner)
                }
            };
            NodeJson {
                id: i,
                kind: kind.into(),
                name,
                inputs: node.inputs.0.clone(),
                outputs: node.outputs.0.clone(),
                x: c.x,
                y: c.y,
                w: b.w * f.k,
                h: b.h * f.k,
                outline,
                inner,
            }
        })
        .collect();
    let edges = d
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| EdgeJson {
            id: i,
            from: e.from,
            to: e.to,
            label: d.source_label(e.from).unwrap_or_default().to_string(),
            route: l.routes[i].iter().map(|&p| f.p(p)).collect(),
        })
        .collect();
    DiagramJson {
        schema: SCHEMA_VERSION.into(),
        width: l.width * f.k,
        height: l.height * f.k,
        inputs: d.inputs.iter().zip(&l.inputs).map(|(a, &p)| port(a, p)).collect(),
        outputs: d.outputs.iter().zip(&l.outputs).map(|(a, &p)| port(a, p)).collect(),
        nodes,
        edges,
    }
}

impl DiagramJson {
    pub fn from_layout(l: &LaidOutDiagram) -> DiagramJson {
        let k = if l.width > 0.0 { VIEW_WIDTH / l.width } else { 1.0 };
        export(l, Frame { dx: 0.0, dy: 0.0, k })
    }

    /// The combinatorial diagram described, validated. Box outlines are kept
    /// relative to the box center.
    pub fn to_diagram(&self) -> Result<StringDiagram, DecodeError> {
        if self.schema != SCHEMA_VERSION {
            return Err(DecodeError::Schema(self.schema.clone()));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(DecodeError::Ids);
            }
            let kind = match (n.kind.as_str(), &n.name, &n.inner) {
                ("generator", Some(name), None) => NodeKind::Generator { name: name.clone() },
                ("box", None, Some(inner)) => NodeKind::Boxed {
                    inner: Box::new(inner.to_diagram()?),
                    outline: n
                        .outline
                        .as_ref()
                        .map(|ps| Polygon::new(ps.iter().map(|p| Point::new(p.x - n.x, p.y - n.y)).collect())),
                },
                _ => return Err(DecodeError::Kind(i, n.kind.clone())),
            };
            nodes.push(Node { kind, inputs: Arity(n.inputs.clone()), outputs: Arity(n.outputs.clone()) });
        }
        let d = StringDiagram {
            inputs: self.inputs.iter().map(|p| p.label.clone()).collect(),
            outputs: self.outputs.iter().map(|p| p.label.clone()).collect(),
            nodes,
            edges: self.edges.iter().map(|e| Edge { from: e.from, to: e.to }).collect(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn decode(text: &str) -> Result<StringDiagram, DecodeError> {
        let j: DiagramJson = serde_json::from_str(text)?;
        j.to_diagram()
    }
}
