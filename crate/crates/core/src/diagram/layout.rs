//! Row-banded planar layout.
//!
//! Each row of the slicing gets a horizontal band. Inside a band every wire
//! is vertical; wires only bend in a thin strip around the line between two
//! bands, where they join two increasing sequences of ports in order. That
//! makes every layout planar. Horizontal positions are then relaxed: each
//! item is pulled towards the ports it is wired to, subject to the left to
//! right order and minimum gaps of its row.

use serde::{Deserialize, Serialize};

use super::geometry::{segments_cross, Point, Polygon};
use super::slice::{slicing, ExtractError, SliceItem};
use super::{NodeId, NodeKind, Sink, Source, StringDiagram};

pub const PORT_GAP: f64 = 40.0;
pub const MARGIN: f64 = 40.0;
pub const NODE_H: f64 = 30.0;
const NODE_PAD: f64 = 12.0;
/// Half height of the strip where wires may bend.
const BEND: f64 = 16.0;
const BAND_MIN: f64 = 100.0;
const ROUNDS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeBox {
    pub center: Point,
    pub w: f64,
    pub h: f64,
    /// Horizontal port offsets from the center.
    pub in_ports: Vec<f64>,
    pub out_ports: Vec<f64>,
}

impl NodeBox {
    pub fn in_port(&self, j: usize) -> Point {
        Point::new(self.center.x + self.in_ports[j], self.center.y - self.h / 2.0)
    }

    pub fn out_port(&self, j: usize) -> Point {
        Point::new(self.center.x + self.out_ports[j], self.center.y + self.h / 2.0)
    }

    fn half_width(&self) -> f64 {
        self.w / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaidOutDiagram {
    pub diagram: StringDiagram,
    pub nodes: Vec<NodeBox>,
    pub inputs: Vec<Point>,
    pub outputs: Vec<Point>,
    /// One polyline per edge, from its source port to its sink port.
    pub routes: Vec<Vec<Point>>,
    /// Layouts of box contents, in coordinates local to the box.
    pub children: Vec<Option<LaidOutDiagram>>,
    pub width: f64,
    pub height: f64,
    /// Items of each row with their x position, top to bottom.
    pub rows: Vec<Vec<(SliceItem, f64)>>,
    /// The y of each line between bands, `rows.len() + 1` of them.
    pub lines: Vec<f64>,
}

fn spread(n: usize) -> Vec<f64> {
    (0..n).map(|j| (j as f64 - (n as f64 - 1.0) / 2.0) * PORT_GAP).collect()
}

fn generator_box(inputs: usize, outputs: usize) -> NodeBox {
    let k = inputs.max(outputs).max(1) as f64;
    NodeBox {
        center: Point::default(),
        w: (k - 1.0) * PORT_GAP + 2.0 * NODE_PAD + 8.0,
        h: NODE_H,
        in_ports: spread(inputs),
        out_ports: spread(outputs),
    }
}

// An item in a row for relaxation purposes.
#[derive(Clone, Debug)]
struct Slot {
    half: f64,
    top: Vec<f64>,
    bottom: Vec<f64>,
    x: f64,
}

fn isotonic(targets: &[f64]) -> Vec<f64> {
    // pool adjacent violators, unit weights
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &t in targets {
        blocks.push((t, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat(m).take(n)).collect()
}

/// Moves a row as little as possible from `desired` while keeping order and gaps.
fn project(slots: &mut [Slot], desired: &[f64]) {
    let mut offs = Vec::with_capacity(slots.len());
    let mut c = 0.0;
    for i in 0..slots.len() {
        if i > 0 {
            c += slots[i - 1].half + slots[i].half + PORT_GAP;
        }
        offs.push(c);
    }
    let e: Vec<f64> = desired.iter().zip(&offs).map(|(d, o)| d - o).collect();
    let y = isotonic(&e);
    for (i, s) in slots.iter_mut().enumerate() {
        s.x = y[i] + offs[i];
    }
}

pub fn layout(d: &StringDiagram) -> Result<LaidOutDiagram, ExtractError> {
    let slice = slicing(d)?;
    let n_rows = slice.rows.len();

    let mut children: Vec<Option<LaidOutDiagram>> = vec![None; d.nodes.len()];
    let mut boxes: Vec<NodeBox> = Vec::with_capacity(d.nodes.len());
    for (i, node) in d.nodes.iter().enumerate() {
        let mut b = generator_box(node.inputs.len(), node.outputs.len());
        if let NodeKind::Boxed { inner, outline } = &node.kind {
            let child = layout(inner)?;
            b.w = b.w.max(child.width);
            b.h = child.height;
            if let Some(p) = outline {
                let (lo, hi) = p.bbox();
                b.w = b.w.max(hi.x - lo.x);
                b.h = b.h.max(hi.y - lo.y);
            }
            b.in_ports = child.inputs.iter().map(|p| p.x - child.width / 2.0).collect();
            b.out_ports = child.outputs.iter().map(|p| p.x - child.width / 2.0).collect();
            children[i] = Some(child);
        }
        boxes.push(b);
    }

    // virtual row 0 holds the inputs, virtual row n_rows + 1 the outputs
    let mut rows: Vec<Vec<Slot>> = Vec::with_capacity(n_rows + 2);
    let port = |top: bool| Slot {
        half: 0.0,
        top: if top { vec![0.0] } else { vec![] },
        bottom: if top { vec![] } else { vec![0.0] },
        x: 0.0,
    };
    rows.push((0..d.inputs.len()).map(|_| port(false)).collect());
    for row in &slice.rows {
        rows.push(
            row.iter()
                .map(|it| match *it {
                    SliceItem::Pad(_) => Slot { half: 0.0, top: vec![0.0], bottom: vec![0.0], x: 0.0 },
                    SliceItem::Node(n) => Slot {
                        half: boxes[n].half_width(),
                        top: boxes[n].in_ports.clone(),
                        bottom: boxes[n].out_ports.clone(),
                        x: 0.0,
                    },
                })
                .collect(),
        );
    }
    rows.push((0..d.outputs.len()).map(|_| port(true)).collect());

    for r in rows.iter_mut() {
        let zeros = vec![0.0; r.len()];
        project(r, &zeros);
        let mid = r.first().map_or(0.0, |s| s.x) / 2.0 + r.last().map_or(0.0, |s| s.x) / 2.0;
        for s in r.iter_mut() {
            s.x -= mid;
        }
    }

    // port positions along each line, as (slot index, port index)
    let ports_of = |r: &[Slot], bottom: bool| -> Vec<(usize, f64)> {
        r.iter()
            .enumerate()
            .flat_map(|(i, s)| {
                let ps = if bottom { &s.bottom } else { &s.top };
                ps.iter().map(move |&o| (i, o))
            })
            .collect()
    };

    for round in 0..ROUNDS {
        let order: Vec<usize> =
            if round % 2 == 0 { (0..rows.len()).collect() } else { (0..rows.len()).rev().collect() };
        for &r in &order {
            let mut sum = vec![0.0; rows[r].len()];
            let mut cnt = vec![0usize; rows[r].len()];
            if r > 0 {
                let above = ports_of(&rows[r - 1], true);
                let here = ports_of(&rows[r], false);
                for ((ai, ao), (hi, ho)) in above.iter().zip(&here) {
                    sum[*hi] += rows[r - 1][*ai].x + ao - ho;
                    cnt[*hi] += 1;
                }
            }
            if r + 1 < rows.len() {
                let below = ports_of(&rows[r + 1], false);
                let here = ports_of(&rows[r], true);
                for ((bi, bo), (hi, ho)) in below.iter().zip(&here) {
                    sum[*hi] += rows[r + 1][*bi].x + bo - ho;
                    cnt[*hi] += 1;
                }
            }
            let desired: Vec<f64> = rows[r]
                .iter()
                .enumerate()
                .map(|(i, s)| if cnt[i] == 0 { s.x } else { sum[i] / cnt[i] as f64 })
                .collect();
            project(&mut rows[r], &desired);
        }
    }

    let min_x = rows.iter().flatten().map(|s| s.x - s.half).fold(f64::INFINITY, f64::min);
    let max_x = rows.iter().flatten().map(|s| s.x + s.half).fold(f64::NEG_INFINITY, f64::max);
    let (min_x, max_x) = if min_x.is_finite() { (min_x, max_x) } else { (0.0, 0.0) };
    let shift = MARGIN - min_x;
    for s in rows.iter_mut().flatten() {
        s.x += shift;
    }
    let width = (max_x - min_x) + 2.0 * MARGIN;

    // vertical structure
    let mut lines = Vec::with_capacity(n_rows + 1);
    let mut y = MARGIN + BEND;
    lines.push(y);
    for row in &slice.rows {
        let tallest = row
            .iter()
            .filter_map(|it| match *it {
                SliceItem::Node(n) => Some(boxes[n].h),
                SliceItem::Pad(_) => None,
            })
            .fold(0.0, f64::max);
        y += BAND_MIN.max(tallest + 2.0 * BEND + 24.0);
        lines.push(y);
    }
    let height = y + BEND + MARGIN;
    let y_in = MARGIN / 2.0;
    let y_out = height - MARGIN / 2.0;

    for (r, row) in slice.rows.iter().enumerate() {
        let cy = (lines[r] + lines[r + 1]) / 2.0;
        for (i, it) in row.iter().enumerate() {
            if let SliceItem::Node(n) = *it {
                boxes[n].center = Point::new(rows[r + 1][i].x, cy);
            }
        }
    }
    let inputs: Vec<Point> = rows[0].iter().map(|s| Point::new(s.x, y_in)).collect();
    let outputs: Vec<Point> = rows[n_rows + 1].iter().map(|s| Point::new(s.x, y_out)).collect();

    // absolute x of each edge at the bottom of virtual row r and the top of row r
    let mut bottom_x: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_rows + 2];
    let mut top_x: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_rows + 2];
    for (k, line) in slice.lines.iter().enumerate() {
        let above = ports_of(&rows[k], true);
        let below = ports_of(&rows[k + 1], false);
        for (j, &e) in line.iter().enumerate() {
            bottom_x[k].push((e, rows[k][above[j].0].x + above[j].1));
            top_x[k + 1].push((e, rows[k + 1][below[j].0].x + below[j].1));
        }
    }
    let mut routes: Vec<Vec<Point>> = vec![Vec::new(); d.edges.len()];
    for (k, line) in slice.lines.iter().enumerate() {
        for (j, &e) in line.iter().enumerate() {
            let (xa, xb) = (bottom_x[k][j].1, top_x[k + 1][j].1);
            routes[e].push(Point::new(xa, lines[k] - BEND));
            routes[e].push(Point::new(xb, lines[k] + BEND));
        }
    }
    for (e, edge) in d.edges.iter().enumerate() {
        let start = match edge.from {
            Source::Input(i) => inputs[i],
            Source::Node(n, j) => boxes[n].out_port(j),
        };
        let end = match edge.to {
            Sink::Output(i) => outputs[i],
            Sink::Node(n, j) => boxes[n].in_port(j),
        };
        let r = &mut routes[e];
        r.insert(0, start);
        r.push(end);
        r.dedup_by(|a, b| a.dist(*b) < 1e-9);
    }

    let row_items = slice
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| row.iter().enumerate().map(|(i, it)| (*it, rows[r + 1][i].x)).collect())
        .collect();

    Ok(LaidOutDiagram {
        diagram: d.clone(),
        nodes: boxes,
        inputs,
        outputs,
        routes,
        children,
        width,
        height,
        rows: row_items,
        lines,
    })
}

impl LaidOutDiagram {
    /// Number of pairs of wire segments that cross.
    pub fn crossing_count(&self) -> usize {
        let segs: Vec<(usize, Point, Point)> =
            self.routes.iter().enumerate().flat_map(|(e, r)| r.windows(2).map(move |w| (e, w[0], w[1]))).collect();
        let mut n = 0;
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if segs[i].0 != segs[j].0 && segments_cross(segs[i].1, segs[i].2, segs[j].1, segs[j].2) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Moves a node. Only the ends of its wires follow; nothing else changes.
    pub fn drag(&mut self, node: NodeId, to: Point) -> bool {
        let Some(b) = self.nodes.get_mut(node) else { return false };
        b.center = to;
        let b = b.clone();
        for (e, edge) in self.diagram.edges.iter().enumerate() {
            if let Source::Node(n, j) = edge.from {
                if n == node {
                    self.routes[e][0] = b.out_port(j);
                }
            }
            if let Sink::Node(n, j) = edge.to {
                if n == node {
                    let last = self.routes[e].len() - 1;
                    self.routes[e][last] = b.in_port(j);
                }
            }
        }
        true
    }

    /// The row holding a node, if the node is at top level.
    pub fn row_of(&self, node: NodeId) -> Option<usize> {
        self.rows.iter().position(|r| r.iter().any(|(it, _)| *it == SliceItem::Node(node)))
    }

    /// A polygon tightly around the given nodes, which must occupy
    /// consecutive rows and be consecutive within each row up to pass-through
    /// wires. Wires are crossed only where they enter or leave the selection.
    pub fn polygon_around(&self, nodes: &[NodeId]) -> Option<Polygon> {
        if nodes.is_empty() {
            return None;
        }
        let rows: Vec<usize> = nodes.iter().map(|&n| self.row_of(n)).collect::<Option<_>>()?;
        let (r0, r1) = (*rows.iter().min()?, *rows.iter().max()?);
        let margin = PORT_GAP / 2.0;
        let mut spans = Vec::new();
        for r in r0..=r1 {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (it, x) in &self.rows[r] {
                if let SliceItem::Node(n) = *it {
                    if nodes.contains(&n) {
                        let half = self.nodes[n].w / 2.0;
                        lo = lo.min(x - half - margin);
                        hi = hi.max(x + half + margin);
                    }
                }
            }
            if !lo.is_finite() {
                return None;
            }
            // a node not selected must not sit inside the span
            for (it, x) in &self.rows[r] {
                if let SliceItem::Node(n) = *it {
                    if !nodes.contains(&n) && *x > lo && *x < hi {
                        return None;
                    }
                }
            }
            spans.push((lo, hi));
        }
        let top = self.lines[r0] + BEND + 2.0;
        let bottom = self.lines[r1 + 1] - BEND - 2.0;
        let mut right = vec![Point::new(spans[0].1, top)];
        for (i, r) in (r0..r1).enumerate() {
            right.push(Point::new(spans[i].1, self.lines[r + 1] - BEND));
            right.push(Point::new(spans[i + 1].1, self.lines[r + 1] + BEND));
        }
        right.push(Point::new(spans[spans.len() - 1].1, bottom));
        let mut left = vec![Point::new(spans[spans.len() - 1].0, bottom)];
        for (i, r) in (r0..r1).enumerate().rev() {
            left.push(Point::new(spans[i + 1].0, self.lines[r + 1] + BEND));
            left.push(Point::new(spans[i].0, self.lines[r + 1] - BEND));
        }
        left.push(Point::new(spans[0].0, top));
        right.extend(left);
        Some(Polygon::new(right))
    }
}
