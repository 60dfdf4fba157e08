//! Structural isomorphisms between bracketings of the same object list.
//!
//! Any two object trees with equal arity are connected by a unique
//! composite of associators and unitors. [`find_maclane`] builds one by
//! sending both sides to the right-nested list form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Arity, MorTerm, ObjTree, Structural};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MacLane {
    Id(ObjTree),
    Comp(Box<MacLane>, Box<MacLane>),
    Tensor(Box<MacLane>, Box<MacLane>),
    Inv(Box<MacLane>),
    Assoc(ObjTree, ObjTree, ObjTree),
    UnitL(ObjTree),
    UnitR(ObjTree),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no structural isomorphism {from} ~> {to}: arities {} and {} differ", from.arity(), to.arity())]
pub struct NotEquivalent {
    pub from: ObjTree,
    pub to: ObjTree,
}

impl MacLane {
    fn comp(f: MacLane, g: MacLane) -> MacLane {
        match (f, g) {
            (MacLane::Id(_), g) => g,
            (f, MacLane::Id(_)) => f,
            (f, g) => MacLane::Comp(Box::new(f), Box::new(g)),
        }
    }

    fn tensor(f: MacLane, g: MacLane) -> MacLane {
        match (f, g) {
            (MacLane::Id(a), MacLane::Id(b)) => MacLane::Id(ObjTree::tensor(a, b)),
            (f, g) => MacLane::Tensor(Box::new(f), Box::new(g)),
        }
    }

    fn inv(f: MacLane) -> MacLane {
        match f {
            MacLane::Id(_) => f,
            MacLane::Inv(g) => *g,
            f => MacLane::Inv(Box::new(f)),
        }
    }

    pub fn source(&self) -> ObjTree {
        self.endpoints().0
    }

    pub fn target(&self) -> ObjTree {
        self.endpoints().1
    }

    pub fn endpoints(&self) -> (ObjTree, ObjTree) {
        match self {
            MacLane::Id(t) => (t.clone(), t.clone()),
            MacLane::Comp(f, g) => (f.source(), g.target()),
            MacLane::Tensor(f, g) => {
                let (fs, ft) = f.endpoints();
                let (gs, gt) = g.endpoints();
                (ObjTree::tensor(fs, gs), ObjTree::tensor(ft, gt))
            }
            MacLane::Inv(f) => {
                let (s, t) = f.endpoints();
                (t, s)
            }
            MacLane::Assoc(a, b, c) => Structural::assoc(a.clone(), b.clone(), c.clone()).endpoints(),
            MacLane::UnitL(a) => Structural::unitl(a.clone()).endpoints(),
            MacLane::UnitR(a) => Structural::unitr(a.clone()).endpoints(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, MacLane::Id(_))
    }
}

/// The right-nested tree `a1⊗(a2⊗(…⊗an))`, or `1` when empty.
pub fn list_form(arity: &Arity) -> ObjTree {
    let mut it = arity.iter().rev();
    match it.next() {
        None => ObjTree::Unit,
        Some(last) => it.fold(ObjTree::atom(last.as_str()), |acc, a| ObjTree::tensor(ObjTree::atom(a.as_str()), acc)),
    }
}

// l1⊗l2 ~> list form of their concatenation; both inputs are in list form.
fn merge(l1: &ObjTree, l2: &ObjTree) -> MacLane {
    match (l1, l2) {
        (ObjTree::Unit, _) => MacLane::UnitL(l2.clone()),
        (_, ObjTree::Unit) => MacLane::UnitR(l1.clone()),
        (ObjTree::Atom(_), _) => MacLane::Id(ObjTree::tensor(l1.clone(), l2.clone())),
        (ObjTree::Tensor(x, rest), _) => MacLane::comp(
            MacLane::Assoc((**x).clone(), (**rest).clone(), l2.clone()),
            MacLane::tensor(MacLane::Id((**x).clone()), merge(rest, l2)),
        ),
    }
}

/// `t ~> list_form(arity(t))`
pub fn canonical(t: &ObjTree) -> MacLane {
    match t {
        ObjTree::Unit | ObjTree::Atom(_) => MacLane::Id(t.clone()),
        ObjTree::Tensor(a, b) => {
            let la = list_form(&a.arity());
            let lb = list_form(&b.arity());
            MacLane::comp(MacLane::tensor(canonical(a), canonical(b)), merge(&la, &lb))
        }
    }
}

pub fn find_maclane(source: &ObjTree, target: &ObjTree) -> Result<MacLane, NotEquivalent> {
    if source.arity() != target.arity() {
        return Err(NotEquivalent { from: source.clone(), to: target.clone() });
    }
    if source == target {
        return Ok(MacLane::Id(source.clone()));
    }
    Ok(MacLane::comp(canonical(source), MacLane::inv(canonical(target))))
}

/// The isomorphism as a surface term built from `assoc`, `unitl`, `unitr`.
pub fn eval_maclane(m: &MacLane) -> MorTerm {
    eval(m, false)
}

fn eval(m: &MacLane, inverse: bool) -> MorTerm {
    let s = |s: Structural| MorTerm::Structural(if inverse { s.inverted() } else { s });
    match m {
        MacLane::Id(t) => MorTerm::Id(t.clone()),
        MacLane::Comp(f, g) => {
            if inverse {
                MorTerm::comp(eval(g, true), eval(f, true))
            } else {
                MorTerm::comp(eval(f, false), eval(g, false))
            }
        }
        MacLane::Tensor(f, g) => MorTerm::tensor(eval(f, inverse), eval(g, inverse)),
        MacLane::Inv(f) => eval(f, !inverse),
        MacLane::Assoc(a, b, c) => s(Structural::assoc(a.clone(), b.clone(), c.clone())),
        MacLane::UnitL(a) => s(Structural::unitl(a.clone())),
        MacLane::UnitR(a) => s(Structural::unitr(a.clone())),
    }
}
