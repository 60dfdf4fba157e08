//! Proofs by rewriting with hypotheses: steps, replay and script formats.
//!
//! A proof works on the two sides of the goal. `transitivity` swaps one side
//! for a term it provably equals, usually to expose boxes; `rewrite` swaps
//! every box whose content is one side of a hypothesis for the other side.

mod script;
mod session;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{decide_equal, norm, NMor, Verdict};
use crate::strictify::{strictify, Options};
use crate::syntax::typing::{Context, TypeError, TypedTerm};
use crate::syntax::{EqKind, Equation, Goal, MorTerm};

pub use script::{parse_neutral, parse_rocq, to_neutral, to_rocq, ScriptError};
pub use session::{ProofSession, SessionError, SideView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Replace instances of the left side by the right side.
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Unfold { name: String },
    Trans { side: Side, term: MorTerm },
    Rewrite { hyp: String, dir: Direction },
    Close,
}

/// A step with the script line it came from (1-based, 0 if unknown).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Located {
    pub line: usize,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no definition named {0}")]
    UnknownDefinition(String),
    #[error("no hypothesis named {0}")]
    UnknownHypothesis(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("the new side is not equal to the old one (verdict: {0})")]
    NotEqual(Verdict),
    #[error("no box matches a side of {0}")]
    NoMatch(String),
    #[error("the two sides are not equal yet (verdict: {0})")]
    Open(Verdict),
    #[error("the proof is already closed")]
    AfterClose,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {index} (line {line}) failed: {reason}")]
pub struct FailureAt {
    pub index: usize,
    pub line: usize,
    pub reason: StepError,
}

/// The two sides of a goal while a proof is in progress.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofState {
    pub lhs: MorTerm,
    pub rhs: MorTerm,
    pub closed: bool,
}

impl ProofState {
    pub fn new(goal: &Goal) -> ProofState {
        ProofState { lhs: goal.conclusion.lhs.clone(), rhs: goal.conclusion.rhs.clone(), closed: false }
    }

    pub fn side(&self, s: Side) -> &MorTerm {
        match s {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    fn side_mut(&mut self, s: Side) -> &mut MorTerm {
        match s {
            Side::Lhs => &mut self.lhs,
            Side::Rhs => &mut self.rhs,
        }
    }

    pub fn verdict(&self, ctx: &Context) -> Result<Verdict, TypeError> {
        let (l, r) = typed_pair(ctx, &self.lhs, &self.rhs)?;
        Ok(decide_equal(ctx, &l, &r))
    }
}

/// Types `a ≡' b`, returning both sides typed against each other.
fn typed_pair(ctx: &Context, a: &MorTerm, b: &MorTerm) -> Result<(TypedTerm, TypedTerm), TypeError> {
    let eq = Equation { name: None, lhs: a.clone(), rhs: b.clone(), kind: EqKind::UpToCast };
    let te = ctx.typecheck_equation(&eq)?;
    Ok((te.lhs, te.rhs))
}

/// Normal form used to match box contents: boxes kept, definitions opaque.
pub fn match_form(ctx: &Context, t: &MorTerm) -> Option<NMor> {
    let typed = ctx.typecheck(t).ok()?;
    Some(norm(&strictify(ctx, &typed, Options::DIAGRAM)))
}

/// The pattern and replacement of a hypothesis used in direction `dir`.
pub fn hypothesis_sides<'g>(goal: &'g Goal, hyp: &str, dir: Direction) -> Option<(&'g MorTerm, &'g MorTerm)> {
    let h = goal.hypothesis(hyp)?;
    Some(match dir {
        Direction::Forward => (&h.lhs, &h.rhs),
        Direction::Backward => (&h.rhs, &h.lhs),
    })
}

/// Replaces every box whose content matches `pattern` by a box holding
/// `replacement` cast to the old content's endpoints. Returns the new term
/// and the number of boxes replaced.
pub fn rewrite_boxes(ctx: &Context, t: &MorTerm, pattern: &NMor, replacement: &MorTerm) -> (MorTerm, usize) {
    let mut count = 0;
    let out = t.map_boxes(&mut |content| {
        if match_form(ctx, &content).as_ref() == Some(pattern) {
            if let Ok(typed) = ctx.typecheck(&content) {
                count += 1;
                return MorTerm::boxed(MorTerm::cast_to(replacement.clone(), typed.source, typed.target));
            }
        }
        MorTerm::boxed(content)
    });
    (out, count)
}

fn definition_body<'g>(goal: &'g Goal, name: &str) -> Option<&'g MorTerm> {
    goal.definition(name).map(|d| &d.body)
}

/// Applies one step.
pub fn apply(goal: &Goal, ctx: &Context, st: &mut ProofState, step: &Step) -> Result<(), StepError> {
    if st.closed {
        return Err(StepError::AfterClose);
    }
    match step {
        Step::Unfold { name } => {
            let body = definition_body(goal, name).ok_or_else(|| StepError::UnknownDefinition(name.clone()))?;
            st.lhs = st.lhs.substitute(name, body);
            st.rhs = st.rhs.substitute(name, body);
        }
        Step::Trans { side, term } => {
            let old = st.side(*side);
            let (a, b) = typed_pair(ctx, old, term)?;
            match decide_equal(ctx, &a, &b) {
                Verdict::Equal => *st.side_mut(*side) = term.clone(),
                v => return Err(StepError::NotEqual(v)),
            }
        }
        Step::Rewrite { hyp, dir } => {
            let (pat, rep) =
                hypothesis_sides(goal, hyp, *dir).ok_or_else(|| StepError::UnknownHypothesis(hyp.clone()))?;
            let pattern = match_form(ctx, pat).ok_or_else(|| StepError::NoMatch(hyp.clone()))?;
            let (l, nl) = rewrite_boxes(ctx, &st.lhs, &pattern, rep);
            let (r, nr) = rewrite_boxes(ctx, &st.rhs, &pattern, rep);
            if nl + nr == 0 {
                return Err(StepError::NoMatch(hyp.clone()));
            }
            typed_pair(ctx, &l, &r)?;
            st.lhs = l;
            st.rhs = r;
        }
        Step::Close => match st.verdict(ctx)? {
            Verdict::Equal => st.closed = true,
            v => return Err(StepError::Open(v)),
        },
    }
    Ok(())
}

/// Runs a script from the goal's conclusion.
pub fn replay(goal: &Goal, steps: &[Located]) -> Result<ProofState, FailureAt> {
    let fail = |index: usize, line: usize, reason: StepError| FailureAt { index, line, reason };
    let ctx = Context::from_goal(goal).map_err(|e| fail(0, 0, e.into()))?;
    let mut st = ProofState::new(goal);
    for (i, s) in steps.iter().enumerate() {
        apply(goal, &ctx, &mut st, &s.step).map_err(|e| fail(i, s.line, e))?;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_goal;

    const GOAL: &str = "m : M⊗M ~> M\nu : M ~> M\nmu : m ; u ≡ m\n=====\n[m ; u]·M ; m ≡ m·M ; m";

    #[test]
    fn rewrite_then_close() {
        let g = parse_goal(GOAL).unwrap();
        let steps = vec![
            Located { line: 1, step: Step::Rewrite { hyp: "mu".into(), dir: Direction::Forward } },
            Located { line: 2, step: Step::Close },
        ];
        let st = replay(&g, &steps).unwrap();
        assert!(st.closed);
        assert_eq!(st.lhs.to_string(), "[cast m]·M ; m");
    }

    #[test]
    fn close_fails_before_rewriting() {
        let g = parse_goal(GOAL).unwrap();
        let err = replay(&g, &[Located { line: 7, step: Step::Close }]).unwrap_err();
        assert_eq!(err.line, 7);
        assert_eq!(err.reason, StepError::Open(Verdict::NotEqual));
    }

    #[test]
    fn backward_rewrite_needs_a_matching_box() {
        let g = parse_goal(GOAL).unwrap();
        let err =
            replay(&g, &[Located { line: 1, step: Step::Rewrite { hyp: "mu".into(), dir: Direction::Backward } }])
                .unwrap_err();
        assert_eq!(err.reason, StepError::NoMatch("mu".into()));
    }
}
