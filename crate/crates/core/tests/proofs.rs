mod common;

use common::{fixture, squash};
use moncat::diagram::{NodeKind, SliceItem};
use moncat::rewrite::{
    parse_neutral, parse_rocq, replay, Direction, Located, ProofSession, SessionError, Side, Step, StepError,
};
use moncat::syntax::parse_goal;

/// The node called `name` (`"box"` for boxes) in row `row` of a side.
fn node(s: &ProofSession, side: Side, name: &str, row: usize) -> usize {
    let l = s.side(side).layout;
    l.rows[row]
        .iter()
        .find_map(|(it, _)| match *it {
            SliceItem::Node(n) => {
                let here = match &l.diagram.nodes[n].kind {
                    NodeKind::Generator { name } => name.as_str(),
                    NodeKind::Boxed { .. } => "box",
                };
                (here == name).then_some(n)
            }
            SliceItem::Pad(_) => None,
        })
        .unwrap_or_else(|| panic!("no {name} in row {row}"))
}

fn mna() -> ProofSession {
    ProofSession::new(parse_goal(&fixture("mna.goal")).unwrap()).unwrap()
}

#[test]
fn stepwise_script_replays() {
    let g = parse_goal(&fixture("mna.goal")).unwrap();
    let steps = parse_rocq(&fixture("mna_stepwise.v"), &g).unwrap();
    assert_eq!(steps.len(), 10);
    assert!(replay(&g, &steps).unwrap().closed);
    let plain = parse_neutral(&fixture("mna_stepwise.proof"), &g).unwrap();
    let strip = |v: Vec<Located>| v.into_iter().map(|l| l.step).collect::<Vec<_>>();
    assert_eq!(strip(plain), strip(steps));
}

#[test]
fn parallel_script_replays() {
    let g = parse_goal(&fixture("mna.goal")).unwrap();
    let steps = parse_rocq(&fixture("mna_parallel.v"), &g).unwrap();
    assert!(replay(&g, &steps).unwrap().closed);
}

#[test]
fn dropping_a_rewrite_breaks_the_next_step() {
    let g = parse_goal(&fixture("mna.goal")).unwrap();
    let mut steps = parse_rocq(&fixture("mna_stepwise.v"), &g).unwrap();
    steps.remove(2);
    let err = replay(&g, &steps).unwrap_err();
    // the right side does not care; the next change of the left side fails
    assert_eq!(err.index, 4);
    assert_eq!(err.line, 11);
    assert!(matches!(err.reason, StepError::NotEqual(_)));
}

#[test]
fn unit_laws_replay() {
    for side in ["left", "right"] {
        let g = parse_goal(&fixture(&format!("units_{side}.goal"))).unwrap();
        let steps = parse_neutral(&fixture(&format!("units_{side}.proof")), &g).unwrap();
        assert!(replay(&g, &steps).unwrap().closed, "{side}");
    }
}

/// Boxes and rewrites the way a user would, one match at a time.
pub fn stepwise_session() -> ProofSession {
    let mut s = mna();
    s.unfold("mn").unwrap();
    let b = s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "n", 1), node(&s, Side::Lhs, "x", 2)]).unwrap();
    assert_eq!(s.rewrite(Side::Lhs, b, "nx", Direction::Forward).unwrap().len(), 2);
    let b = s.box_nodes(Side::Rhs, &[node(&s, Side::Rhs, "m", 1), node(&s, Side::Rhs, "x", 2)]).unwrap();
    assert_eq!(s.rewrite(Side::Rhs, b, "mx", Direction::Forward).unwrap().len(), 2);
    s.unbox(Side::Lhs, node(&s, Side::Lhs, "box", 1)).unwrap();
    s.unbox(Side::Rhs, node(&s, Side::Rhs, "box", 1)).unwrap();
    let b = s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "m", 2), node(&s, Side::Lhs, "m", 3)]).unwrap();
    s.rewrite(Side::Lhs, b, "mA", Direction::Forward).unwrap();
    assert!(!s.done());
    let b = s.box_nodes(Side::Rhs, &[node(&s, Side::Rhs, "n", 2), node(&s, Side::Rhs, "n", 3)]).unwrap();
    s.rewrite(Side::Rhs, b, "nA", Direction::Backward).unwrap();
    s
}

#[test]
fn session_exports_the_stepwise_script() {
    let s = stepwise_session();
    assert!(s.done());
    assert_eq!(squash(&s.export_rocq()), squash(&fixture("mna_stepwise.v")));
    assert_eq!(
        squash(&s.export_neutral()),
        squash(&fixture("mna_stepwise.proof").replace("# the stepwise proof in the plain format", ""))
    );
}

#[test]
fn session_exports_the_parallel_script() {
    let mut s = mna();
    s.unfold("mn").unwrap();
    s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "n", 1), node(&s, Side::Lhs, "x", 2)]).unwrap();
    s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "m", 1), node(&s, Side::Lhs, "m", 2)]).unwrap();
    assert_eq!(s.rewrite(Side::Lhs, node(&s, Side::Lhs, "box", 1), "nx", Direction::Forward).unwrap().len(), 2);
    // the other box is now part of the term, so it rewrites directly
    assert_eq!(s.rewrite(Side::Lhs, node(&s, Side::Lhs, "box", 2), "mA", Direction::Forward).unwrap().len(), 1);
    s.box_nodes(Side::Rhs, &[node(&s, Side::Rhs, "m", 1), node(&s, Side::Rhs, "x", 2)]).unwrap();
    s.box_nodes(Side::Rhs, &[node(&s, Side::Rhs, "n", 1), node(&s, Side::Rhs, "n", 2)]).unwrap();
    assert_eq!(s.rewrite(Side::Rhs, node(&s, Side::Rhs, "box", 1), "mx", Direction::Forward).unwrap().len(), 2);
    let last = s.side(Side::Rhs).layout.diagram.nodes.iter().rposition(|n| n.is_box()).unwrap();
    assert!(s.side(Side::Rhs).origin[last].is_some());
    assert_eq!(s.rewrite(Side::Rhs, last, "nA", Direction::Backward).unwrap().len(), 1);
    assert!(s.done());
    assert_eq!(squash(&s.export_rocq()), squash(&fixture("mna_parallel.v")));
}

#[test]
fn session_undo_restores_state() {
    let mut s = mna();
    let r0 = s.revision();
    s.unfold("mn").unwrap();
    let before = s.side(Side::Lhs).term.clone();
    let b = s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "n", 1), node(&s, Side::Lhs, "x", 2)]).unwrap();
    s.rewrite(Side::Lhs, b, "nx", Direction::Forward).unwrap();
    assert_eq!(s.trace().len(), 3);
    s.undo().unwrap();
    s.undo().unwrap();
    assert_eq!(s.trace().len(), 1);
    assert_eq!(s.side(Side::Lhs).term, &before);
    assert!(s.revision() > r0);
    s.undo().unwrap();
    assert!(matches!(s.undo(), Err(SessionError::NothingToUndo)));
}

#[test]
fn session_rejects_wrong_hypothesis() {
    let mut s = mna();
    s.unfold("mn").unwrap();
    let b = s.box_nodes(Side::Lhs, &[node(&s, Side::Lhs, "n", 1), node(&s, Side::Lhs, "x", 2)]).unwrap();
    let rev = s.revision();
    assert!(matches!(s.rewrite(Side::Lhs, b, "mx", Direction::Forward), Err(SessionError::NoMatch(..))));
    assert!(matches!(
        s.rewrite(Side::Lhs, b, "nope", Direction::Forward),
        Err(SessionError::Step(StepError::UnknownHypothesis(_)))
    ));
    assert!(matches!(s.rewrite(Side::Lhs, 0, "nx", Direction::Forward), Err(SessionError::NotABox(0))));
    assert_eq!(s.revision(), rev);
    assert!(s.trace().iter().all(|t| matches!(t, Step::Unfold { .. })));
}
