//! Turning a region of a laid-out diagram into a box node.

use thiserror::Error;

use super::geometry::{crossings, Point, Polygon};
use super::layout::{layout, LaidOutDiagram};
use super::slice::slicing;
use super::{Edge, Node, NodeId, NodeKind, Sink, Source, StringDiagram};
use crate::syntax::Arity;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("the outline is not a simple polygon")]
    NotSimple,
    #[error("wire {edge} crosses the outline more than twice")]
    EdgeCrossesTwicePlus { edge: usize },
    #[error("inputs and outputs of the region are interleaved along the outline")]
    BadAlternation,
    #[error("the region is not a subdiagram: {0}")]
    InvalidSubdiagram(String),
}

/// The result of boxing: the new layout, the id of the new box node, and
/// for every old node its id in the new diagram (`None` if it went inside).
#[derive(Clone, Debug)]
pub struct Boxed {
    pub layout: LaidOutDiagram,
    pub box_id: NodeId,
    pub node_map: Vec<Option<NodeId>>,
    /// Old ids of the nodes that went inside, in their new inner order.
    pub inside: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    In,
    Out,
}

struct Crossing {
    perim: f64,
    at: Point,
    dir: Dir,
    edge: usize,
}

fn point_on(poly: &Polygon, perim: f64) -> Point {
    let n = poly.points.len();
    let i = (perim.floor() as usize).min(n - 1);
    let t = perim - i as f64;
    let (a, b) = (poly.points[i], poly.points[(i + 1) % n]);
    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

/// Boxes the nodes whose anchors lie inside `poly`.
pub fn box_polygon(lay: &LaidOutDiagram, poly: &Polygon) -> Result<Boxed, BoxError> {
    if !poly.is_simple() {
        return Err(BoxError::NotSimple);
    }
    let d = &lay.diagram;
    let mut inside = vec![false; d.nodes.len()];
    for (n, b) in lay.nodes.iter().enumerate() {
        if poly.on_boundary(b.center, 1e-6) {
            return Err(BoxError::InvalidSubdiagram(format!("node {n} sits on the outline")));
        }
        inside[n] = poly.contains(b.center);
    }
    let src_in = |s: Source| matches!(s, Source::Node(n, _) if inside[n]);
    let dst_in = |s: Sink| matches!(s, Sink::Node(n, _) if inside[n]);

    let mut cross: Vec<Crossing> = Vec::new();
    let mut through = vec![false; d.edges.len()];
    for (e, edge) in d.edges.iter().enumerate() {
        let hits = crossings(&lay.routes[e], poly);
        if hits.len() > 2 {
            return Err(BoxError::EdgeCrossesTwicePlus { edge: e });
        }
        let (a, b) = (src_in(edge.from), dst_in(edge.to));
        if (hits.len() % 2 == 1) != (a != b) {
            return Err(BoxError::InvalidSubdiagram(format!("wire {e} meets the outline ambiguously")));
        }
        match (hits.len(), a, b) {
            (1, false, true) | (1, true, false) => cross.push(Crossing {
                perim: hits[0].1,
                at: point_on(poly, hits[0].1),
                dir: if b { Dir::In } else { Dir::Out },
                edge: e,
            }),
            (2, false, false) => {
                through[e] = true;
                cross.push(Crossing { perim: hits[0].1, at: point_on(poly, hits[0].1), dir: Dir::In, edge: e });
                cross.push(Crossing { perim: hits[1].1, at: point_on(poly, hits[1].1), dir: Dir::Out, edge: e });
            }
            (2, true, true) => {
                return Err(BoxError::InvalidSubdiagram(format!("wire {e} leaves the region and comes back")));
            }
            _ => {}
        }
    }
    if !inside.iter().any(|&i| i) && cross.is_empty() {
        return Err(BoxError::InvalidSubdiagram("the region is empty".into()));
    }

    cross.sort_by(|a, b| a.perim.total_cmp(&b.perim));
    if poly.signed_area2() < 0.0 {
        cross.reverse();
    }
    let k = cross.len();
    let changes = (0..k).filter(|&i| cross[i].dir != cross[(i + 1) % k].dir).count();
    if changes > 2 {
        return Err(BoxError::BadAlternation);
    }
    let (ins, outs): (Vec<usize>, Vec<usize>) = if changes == 0 {
        let mut order: Vec<usize> = (0..k).collect();
        let start = (0..k).min_by(|&a, &b| cross[a].at.x.total_cmp(&cross[b].at.x)).unwrap_or(0);
        order.rotate_left(start);
        if cross.first().is_some_and(|c| c.dir == Dir::In) {
            (order, Vec::new())
        } else {
            // counterclockwise from the leftmost
            if !order.is_empty() {
                order[1..].reverse();
            }
            (Vec::new(), order)
        }
    } else {
        let start_of = |dir: Dir| (0..k).find(|&i| cross[i].dir == dir && cross[(i + k - 1) % k].dir != dir).unwrap();
        let block = |dir: Dir| {
            let s = start_of(dir);
            (0..k).map(|j| (s + j) % k).take_while(|&i| cross[i].dir == dir).collect::<Vec<_>>()
        };
        let mut outs = block(Dir::Out);
        outs.reverse();
        (block(Dir::In), outs)
    };

    let label = |e: usize| d.source_label(d.edges[e].from).expect("validated").to_string();
    let in_pos: std::collections::HashMap<usize, usize> =
        ins.iter().enumerate().map(|(p, &c)| (cross[c].edge, p)).collect();
    let out_pos: std::collections::HashMap<usize, usize> =
        outs.iter().enumerate().map(|(p, &c)| (cross[c].edge, p)).collect();
    let box_inputs: Arity = ins.iter().map(|&c| label(cross[c].edge)).collect();
    let box_outputs: Arity = outs.iter().map(|&c| label(cross[c].edge)).collect();

    let mut node_map: Vec<Option<NodeId>> = vec![None; d.nodes.len()];
    let mut inner_map: Vec<Option<NodeId>> = vec![None; d.nodes.len()];
    let mut outer_nodes: Vec<Node> = Vec::new();
    let mut inner_nodes: Vec<Node> = Vec::new();
    let mut moved = Vec::new();
    for (n, node) in d.nodes.iter().enumerate() {
        if inside[n] {
            inner_map[n] = Some(inner_nodes.len());
            inner_nodes.push(node.clone());
            moved.push(n);
        } else {
            node_map[n] = Some(outer_nodes.len());
            outer_nodes.push(node.clone());
        }
    }
    let box_id = outer_nodes.len();
    let outer_src = |s: Source| match s {
        Source::Node(n, j) => Source::Node(node_map[n].expect("outside"), j),
        s => s,
    };
    let outer_dst = |s: Sink| match s {
        Sink::Node(n, j) => Sink::Node(node_map[n].expect("outside"), j),
        s => s,
    };
    let inner_src = |s: Source| match s {
        Source::Node(n, j) => Source::Node(inner_map[n].expect("inside"), j),
        s => s,
    };
    let inner_dst = |s: Sink| match s {
        Sink::Node(n, j) => Sink::Node(inner_map[n].expect("inside"), j),
        s => s,
    };

    let mut outer_edges = Vec::new();
    let mut inner_edges = Vec::new();
    for (e, edge) in d.edges.iter().enumerate() {
        let (a, b) = (src_in(edge.from), dst_in(edge.to));
        if through[e] {
            outer_edges.push(Edge { from: outer_src(edge.from), to: Sink::Node(box_id, in_pos[&e]) });
            inner_edges.push(Edge { from: Source::Input(in_pos[&e]), to: Sink::Output(out_pos[&e]) });
            outer_edges.push(Edge { from: Source::Node(box_id, out_pos[&e]), to: outer_dst(edge.to) });
            continue;
        }
        match (a, b) {
            (false, false) => outer_edges.push(Edge { from: outer_src(edge.from), to: outer_dst(edge.to) }),
            (true, true) => inner_edges.push(Edge { from: inner_src(edge.from), to: inner_dst(edge.to) }),
            (false, true) => {
                outer_edges.push(Edge { from: outer_src(edge.from), to: Sink::Node(box_id, in_pos[&e]) });
                inner_edges.push(Edge { from: Source::Input(in_pos[&e]), to: inner_dst(edge.to) });
            }
            (true, false) => {
                inner_edges.push(Edge { from: inner_src(edge.from), to: Sink::Output(out_pos[&e]) });
                outer_edges.push(Edge { from: Source::Node(box_id, out_pos[&e]), to: outer_dst(edge.to) });
            }
        }
    }
    let inner = StringDiagram {
        inputs: box_inputs.clone(),
        outputs: box_outputs.clone(),
        nodes: inner_nodes,
        edges: inner_edges,
    };
    let (lo, hi) = poly.bbox();
    let outline = poly.translate(-(lo.x + hi.x) / 2.0, -(lo.y + hi.y) / 2.0);
    outer_nodes.push(Node {
        kind: NodeKind::Boxed { inner: Box::new(inner), outline: Some(outline) },
        inputs: box_inputs,
        outputs: box_outputs,
    });
    let outer =
        StringDiagram { inputs: d.inputs.clone(), outputs: d.outputs.clone(), nodes: outer_nodes, edges: outer_edges };
    let bad = |e: &dyn std::fmt::Display| BoxError::InvalidSubdiagram(e.to_string());
    outer.validate().map_err(|e| bad(&e))?;
    if let Some(inner) = outer.nodes[box_id].inner() {
        slicing(inner).map_err(|e| bad(&e))?;
    }
    slicing(&outer).map_err(|e| bad(&e))?;
    let layout = layout(&outer).map_err(|e| bad(&e))?;
    Ok(Boxed { layout, box_id, node_map, inside: moved })
}
