//! An interactive proof: both sides as laid-out diagrams that the user
//! boxes, unboxes and rewrites, with the script recorded as it goes.

use thiserror::Error;

use super::script::{to_neutral, to_rocq};
use super::{apply, hypothesis_sides, match_form, Direction, ProofState, Side, Step, StepError};
use crate::diagram::{
    box_polygon, diagram_of_term, extract_expr, extract_nmor, layout, BoxError, DiagramError, ExtractError,
    LaidOutDiagram, NodeId, Point, Polygon,
};
use crate::normalize::Verdict;
use crate::syntax::typing::{Context, TypeError};
use crate::syntax::{Goal, MorTerm};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("no node {0}")]
    NoNode(NodeId),
    #[error("node {0} is not a box")]
    NotABox(NodeId),
    #[error("the box does not contain the {0} side of {1}")]
    NoMatch(&'static str, String),
    #[error("those nodes do not form a region")]
    NoRegion,
    #[error("nothing to undo")]
    NothingToUndo,
}

#[derive(Clone, Debug)]
struct SideState {
    term: MorTerm,
    layout: LaidOutDiagram,
    /// For each top-level node, the index of the term box it shows.
    origin: Vec<Option<usize>>,
}

/// Read-only view of one side.
pub struct SideView<'a> {
    pub term: &'a MorTerm,
    pub layout: &'a LaidOutDiagram,
    pub origin: &'a [Option<usize>],
}

#[derive(Clone, Debug)]
struct Snapshot {
    state: ProofState,
    lhs: SideState,
    rhs: SideState,
    trace_len: usize,
}

#[derive(Clone, Debug)]
pub struct ProofSession {
    goal: Goal,
    ctx: Context,
    state: ProofState,
    lhs: SideState,
    rhs: SideState,
    trace: Vec<Step>,
    history: Vec<Snapshot>,
    revision: u64,
}

fn build(ctx: &Context, term: &MorTerm, other: &MorTerm, side: Side) -> Result<SideState, SessionError> {
    // each side is typed against the other, as in the goal
    let (l, r) = match side {
        Side::Lhs => super::typed_pair(ctx, term, other)?,
        Side::Rhs => super::typed_pair(ctx, other, term)?,
    };
    let typed = if side == Side::Lhs { l } else { r };
    let d = diagram_of_term(ctx, &typed);
    let mut k = 0;
    let origin = d
        .nodes
        .iter()
        .map(|n| {
            n.is_box().then(|| {
                k += 1;
                k - 1
            })
        })
        .collect();
    Ok(SideState { term: term.clone(), layout: layout(&d)?, origin })
}

impl ProofSession {
    pub fn new(goal: Goal) -> Result<ProofSession, SessionError> {
        let ctx = Context::from_goal(&goal)?;
        let state = ProofState::new(&goal);
        let lhs = build(&ctx, &state.lhs, &state.rhs, Side::Lhs)?;
        let rhs = build(&ctx, &state.rhs, &state.lhs, Side::Rhs)?;
        Ok(ProofSession { goal, ctx, state, lhs, rhs, trace: Vec::new(), history: Vec::new(), revision: 0 })
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn trace(&self) -> &[Step] {
        &self.trace
    }

    pub fn side(&self, s: Side) -> SideView<'_> {
        let st = self.side_state(s);
        SideView { term: &st.term, layout: &st.layout, origin: &st.origin }
    }

    fn side_state(&self, s: Side) -> &SideState {
        match s {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    fn side_state_mut(&mut self, s: Side) -> &mut SideState {
        match s {
            Side::Lhs => &mut self.lhs,
            Side::Rhs => &mut self.rhs,
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.state.verdict(&self.ctx).unwrap_or(Verdict::NotEqual)
    }

    pub fn done(&self) -> bool {
        self.verdict() == Verdict::Equal
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            state: self.state.clone(),
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
            trace_len: self.trace.len(),
        }
    }

    fn commit(&mut self, snap: Snapshot) {
        self.history.push(snap);
        self.revision += 1;
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        let snap = self.history.pop().ok_or(SessionError::NothingToUndo)?;
        self.state = snap.state;
        self.lhs = snap.lhs;
        self.rhs = snap.rhs;
        self.trace.truncate(snap.trace_len);
        self.revision += 1;
        Ok(())
    }

    /// Rebuilds the diagram of each side whose term changed.
    fn resync(&mut self) -> Result<(), SessionError> {
        if self.lhs.term != self.state.lhs {
            self.lhs = build(&self.ctx, &self.state.lhs, &self.state.rhs, Side::Lhs)?;
        }
        if self.rhs.term != self.state.rhs {
            self.rhs = build(&self.ctx, &self.state.rhs, &self.state.lhs, Side::Rhs)?;
        }
        Ok(())
    }

    fn run_steps(&mut self, steps: Vec<Step>) -> Result<Vec<Step>, SessionError> {
        let snap = self.snapshot();
        for s in &steps {
            if let Err(e) = apply(&self.goal, &self.ctx, &mut self.state, s) {
                self.state = snap.state;
                return Err(e.into());
            }
        }
        if let Err(e) = self.resync() {
            self.state = snap.state.clone();
            self.lhs = snap.lhs;
            self.rhs = snap.rhs;
            return Err(e);
        }
        self.trace.extend(steps.iter().cloned());
        self.commit(snap);
        Ok(steps)
    }

    pub fn unfold(&mut self, name: &str) -> Result<Vec<Step>, SessionError> {
        self.run_steps(vec![Step::Unfold { name: name.to_string() }])
    }

    /// Replaces one side by a term equal to it.
    pub fn transitivity(&mut self, side: Side, term: MorTerm) -> Result<Vec<Step>, SessionError> {
        self.run_steps(vec![Step::Trans { side, term }])
    }

    /// Boxes the region enclosed by `poly`, in layout coordinates.
    pub fn box_region(&mut self, side: Side, poly: &Polygon) -> Result<NodeId, SessionError> {
        let snap = self.snapshot();
        let st = self.side_state(side);
        let b = box_polygon(&st.layout, poly)?;
        let mut origin = vec![None; b.layout.diagram.nodes.len()];
        for (old, new) in b.node_map.iter().enumerate() {
            if let Some(n) = new {
                origin[*n] = st.origin[old];
            }
        }
        let st = self.side_state_mut(side);
        st.layout = b.layout;
        st.origin = origin;
        self.commit(snap);
        Ok(b.box_id)
    }

    /// Boxes the smallest staircase region around the given nodes.
    pub fn box_nodes(&mut self, side: Side, nodes: &[NodeId]) -> Result<NodeId, SessionError> {
        let poly = self.side_state(side).layout.polygon_around(nodes).ok_or(SessionError::NoRegion)?;
        self.box_region(side, &poly)
    }

    pub fn unbox(&mut self, side: Side, node: NodeId) -> Result<(), SessionError> {
        let snap = self.snapshot();
        let st = self.side_state(side);
        let (d, map) = st.layout.diagram.unbox(node)?;
        let mut origin = vec![None; d.nodes.len()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                origin[*n] = st.origin[old];
            }
        }
        let l = layout(&d)?;
        let st = self.side_state_mut(side);
        st.layout = l;
        st.origin = origin;
        self.commit(snap);
        Ok(())
    }

    pub fn drag(&mut self, side: Side, node: NodeId, to: Point) -> Result<(), SessionError> {
        let snap = self.snapshot();
        if !self.side_state_mut(side).layout.drag(node, to) {
            return Err(SessionError::NoNode(node));
        }
        self.commit(snap);
        Ok(())
    }

    /// The reading of a side's diagram as it is currently boxed.
    pub fn reading(&self, side: Side) -> Result<MorTerm, SessionError> {
        Ok(extract_expr(&self.ctx, &self.side_state(side).layout.diagram)?)
    }

    /// Every hypothesis and direction whose pattern is the content of box `node`.
    pub fn matches(&self, side: Side, node: NodeId) -> Result<Vec<(String, Direction)>, SessionError> {
        let n = self.side_state(side).layout.diagram.nodes.get(node).ok_or(SessionError::NoNode(node))?;
        let content = extract_nmor(n.inner().ok_or(SessionError::NotABox(node))?)?;
        let mut out = Vec::new();
        for h in &self.goal.hypotheses {
            let name = h.name.clone().unwrap_or_default();
            for (dir, pat) in [(Direction::Forward, &h.lhs), (Direction::Backward, &h.rhs)] {
                if match_form(&self.ctx, pat).as_ref() == Some(&content) {
                    out.push((name.clone(), dir));
                }
            }
        }
        Ok(out)
    }

    /// Rewrites the box `node` of `side` with hypothesis `hyp`. If the
    /// current term does not already show that box, a transitivity step to
    /// the diagram's reading (with all its boxes) is emitted first.
    pub fn rewrite(&mut self, side: Side, node: NodeId, hyp: &str, dir: Direction) -> Result<Vec<Step>, SessionError> {
        let (pat, _) =
            hypothesis_sides(&self.goal, hyp, dir).ok_or_else(|| StepError::UnknownHypothesis(hyp.to_string()))?;
        let which = if dir == Direction::Forward { "left" } else { "right" };
        let no_match = || SessionError::NoMatch(which, hyp.to_string());
        let pattern = match_form(&self.ctx, pat).ok_or_else(no_match)?;
        let st = self.side_state(side);
        let n = st.layout.diagram.nodes.get(node).ok_or(SessionError::NoNode(node))?;
        let inner = n.inner().ok_or(SessionError::NotABox(node))?;
        if extract_nmor(inner)? != pattern {
            return Err(no_match());
        }
        let rewrite = Step::Rewrite { hyp: hyp.to_string(), dir };
        let already = st.origin[node]
            .and_then(|k| st.term.top_boxes().get(k).map(|t| match_form(&self.ctx, t)))
            .is_some_and(|nf| nf.as_ref() == Some(&pattern));
        if already {
            return self.run_steps(vec![rewrite]);
        }
        let t = extract_expr(&self.ctx, &st.layout.diagram)?;
        self.run_steps(vec![Step::Trans { side, term: t }, rewrite])
    }

    /// The recorded steps, closed off if the sides are now equal.
    pub fn steps(&self) -> Vec<Step> {
        let mut s = self.trace.clone();
        if self.done() && !self.state.closed {
            s.push(Step::Close);
        }
        s
    }

    pub fn export_neutral(&self) -> String {
        to_neutral(&self.steps())
    }

    pub fn export_rocq(&self) -> String {
        to_rocq(&self.goal, &self.steps())
    }
}
