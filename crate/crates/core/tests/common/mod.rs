#![allow(dead_code)]

use std::path::PathBuf;

use moncat::syntax::{Arity, GeneratorDecl, MorTerm, ObjTree, Signature, StructKind, Structural};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> String {
    // also used from the cli crate, hence the detour through `..`
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub const OBJECTS: [&str; 3] = ["A", "B", "C"];

/// A signature with generators of many shapes. Every arity up to two has
/// generators out of it, so random terms never get stuck.
pub fn signature(rng: &mut impl Rng, empty_targets: bool) -> Signature {
    let mut sig = Signature { objects: OBJECTS.iter().map(|s| s.to_string()).collect(), generators: Vec::new() };
    let pick = |rng: &mut dyn rand::RngCore, lo: usize, hi: usize| -> Vec<String> {
        let n = rng.gen_range(lo..=hi);
        (0..n).map(|_| OBJECTS[rng.gen_range(0..OBJECTS.len())].to_string()).collect()
    };
    let mut sources: Vec<Vec<String>> = vec![vec![]];
    for a in OBJECTS {
        sources.push(vec![a.into()]);
        for b in OBJECTS {
            sources.push(vec![a.into(), b.into()]);
        }
    }
    for (i, src) in sources.into_iter().enumerate() {
        let lo = if empty_targets { 0 } else { 1 };
        for k in 0..2 {
            let tgt = pick(rng, lo, 2);
            sig.generators.push(GeneratorDecl {
                name: format!("g{i}_{k}"),
                source: tree_of(&src),
                target: tree_of(&tgt),
                style: Default::default(),
            });
        }
    }
    sig
}

/// Right-nested tree of a list, `1` if empty.
pub fn tree_of(atoms: &[String]) -> ObjTree {
    match atoms {
        [] => ObjTree::Unit,
        [a] => ObjTree::atom(a.as_str()),
        [a, rest @ ..] => ObjTree::tensor(ObjTree::atom(a.as_str()), tree_of(rest)),
    }
}

/// A random bracketing of `atoms`, possibly with stray units.
pub fn random_tree(rng: &mut impl Rng, atoms: &[String], units: bool) -> ObjTree {
    if units && rng.gen_bool(0.15) {
        let t = random_tree(rng, atoms, false);
        return if rng.gen_bool(0.5) { ObjTree::tensor(ObjTree::Unit, t) } else { ObjTree::tensor(t, ObjTree::Unit) };
    }
    match atoms.len() {
        0 => ObjTree::Unit,
        1 => ObjTree::atom(atoms[0].as_str()),
        n => {
            let k = rng.gen_range(1..n);
            ObjTree::tensor(random_tree(rng, &atoms[..k], units), random_tree(rng, &atoms[k..], units))
        }
    }
}

pub fn random_atoms(rng: &mut impl Rng, max: usize) -> Vec<String> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| OBJECTS[rng.gen_range(0..OBJECTS.len())].to_string()).collect()
}

fn id_of(rng: &mut impl Rng, atoms: &[String]) -> MorTerm {
    MorTerm::Id(random_tree(rng, atoms, false))
}

fn whisker(rng: &mut impl Rng, pre: &[String], mid: MorTerm, post: &[String]) -> MorTerm {
    let mut t = mid;
    if !post.is_empty() {
        t = MorTerm::tensor(t, id_of(rng, post));
    }
    if !pre.is_empty() {
        t = MorTerm::tensor(id_of(rng, pre), t);
    }
    t
}

/// A random term out of `src` with about `size` generators, and its target.
/// Pieces are joined with `;;` so any bracketing typechecks.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, src: &[String], size: usize) -> (MorTerm, Vec<String>) {
    if size <= 1 {
        let mut options: Vec<(usize, &GeneratorDecl)> = Vec::new();
        for g in &sig.generators {
            let ga = g.source.arity().0;
            for p in 0..=src.len().saturating_sub(ga.len()) {
                if src.len() >= ga.len() && src[p..p + ga.len()] == ga[..] {
                    options.push((p, g));
                }
            }
        }
        if size == 0 || options.is_empty() {
            return (id_of(rng, src), src.to_vec());
        }
        let &(p, g) = options.choose(rng).expect("nonempty");
        let k = g.source.arity().len();
        let mut tgt = src[..p].to_vec();
        tgt.extend(g.target.arity().0);
        tgt.extend_from_slice(&src[p + k..]);
        return (whisker(rng, &src[..p], MorTerm::gen(g.name.clone()), &src[p + k..]), tgt);
    }
    let left = rng.gen_range(1..size);
    if src.len() >= 2 && rng.gen_bool(0.4) {
        let cut = rng.gen_range(1..src.len());
        let (a, ta) = random_term(rng, sig, &src[..cut], left);
        let (b, tb) = random_term(rng, sig, &src[cut..], size - left);
        let mut t = ta;
        t.extend(tb);
        (MorTerm::tensor(a, b), t)
    } else {
        let (a, ta) = random_term(rng, sig, src, left);
        let (b, tb) = random_term(rng, sig, &ta, size - left);
        (MorTerm::strict_comp(a, b), tb)
    }
}

/// A value of a tree-shaped object: leaves carry a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Unit,
    Leaf(usize),
    Pair(Box<Value>, Box<Value>),
}

pub fn labelled(t: &ObjTree, next: &mut usize) -> Value {
    match t {
        ObjTree::Unit => Value::Unit,
        ObjTree::Atom(_) => {
            *next += 1;
            Value::Leaf(*next - 1)
        }
        ObjTree::Tensor(a, b) => {
            let a = labelled(a, next);
            Value::Pair(Box::new(a), Box::new(labelled(b, next)))
        }
    }
}

fn pair(a: Value, b: Value) -> Value {
    Value::Pair(Box::new(a), Box::new(b))
}

/// Runs a purely structural term on a value, the way the structural
/// isomorphisms act on nested pairs. `None` if the value has the wrong shape.
pub fn run(t: &MorTerm, v: Value) -> Option<Value> {
    match t {
        MorTerm::Id(_) => Some(v),
        MorTerm::Structural(s) => run_structural(s, v),
        MorTerm::Comp(f, g) | MorTerm::StrictComp(f, g) => run(g, run(f, v)?),
        MorTerm::Tensor(f, g) => match v {
            Value::Pair(a, b) => Some(pair(run(f, *a)?, run(g, *b)?)),
            _ => None,
        },
        MorTerm::Cast { body, .. } | MorTerm::Boxed(body) => run(body, v),
        MorTerm::Gen(_) => None,
    }
}

fn run_structural(s: &Structural, v: Value) -> Option<Value> {
    match (&s.kind, s.inverse, v) {
        (StructKind::Assoc(..), false, Value::Pair(ab, c)) => match *ab {
            Value::Pair(a, b) => Some(pair(*a, pair(*b, *c))),
            _ => None,
        },
        (StructKind::Assoc(..), true, Value::Pair(a, bc)) => match *bc {
            Value::Pair(b, c) => Some(pair(pair(*a, *b), *c)),
            _ => None,
        },
        (StructKind::UnitL(_), false, Value::Pair(u, a)) if *u == Value::Unit => Some(*a),
        (StructKind::UnitR(_), false, Value::Pair(a, u)) if *u == Value::Unit => Some(*a),
        (StructKind::UnitL(_), true, a) => Some(pair(Value::Unit, a)),
        (StructKind::UnitR(_), true, a) => Some(pair(a, Value::Unit)),
        _ => None,
    }
}

/// One random structural step out of `t`, applied somewhere inside it.
fn random_move(rng: &mut impl Rng, t: &ObjTree) -> Option<(MorTerm, ObjTree)> {
    let here: Vec<Structural> = {
        let mut v = Vec::new();
        if let ObjTree::Tensor(ab, c) = t {
            if let ObjTree::Tensor(a, b) = &**ab {
                v.push(Structural::assoc((**a).clone(), (**b).clone(), (**c).clone()));
            }
        }
        if let ObjTree::Tensor(a, bc) = t {
            if let ObjTree::Tensor(b, c) = &**bc {
                v.push(Structural::assoc((**a).clone(), (**b).clone(), (**c).clone()).inverted());
            }
        }
        if let ObjTree::Tensor(u, a) = t {
            if **u == ObjTree::Unit {
                v.push(Structural::unitl((**a).clone()));
            }
        }
        if let ObjTree::Tensor(a, u) = t {
            if **u == ObjTree::Unit {
                v.push(Structural::unitr((**a).clone()));
            }
        }
        if rng.gen_bool(0.1) {
            v.push(Structural::unitl(t.clone()).inverted());
            v.push(Structural::unitr(t.clone()).inverted());
        }
        v
    };
    let descend = matches!(t, ObjTree::Tensor(..)) && (here.is_empty() || rng.gen_bool(0.5));
    if descend {
        let ObjTree::Tensor(a, b) = t else { unreachable!() };
        if rng.gen_bool(0.5) {
            let (m, a2) = random_move(rng, a)?;
            Some((MorTerm::tensor(m, MorTerm::Id((**b).clone())), ObjTree::tensor(a2, (**b).clone())))
        } else {
            let (m, b2) = random_move(rng, b)?;
            Some((MorTerm::tensor(MorTerm::Id((**a).clone()), m), ObjTree::tensor((**a).clone(), b2)))
        }
    } else {
        let s = here.choose(rng)?.clone();
        let (_, tgt) = s.endpoints();
        Some((MorTerm::Structural(s), tgt))
    }
}

/// A random path of structural steps out of `t`, composed strictly.
pub fn random_path(rng: &mut impl Rng, t: &ObjTree, steps: usize) -> (MorTerm, ObjTree) {
    let mut term = MorTerm::Id(t.clone());
    let mut cur = t.clone();
    for _ in 0..steps {
        if let Some((m, next)) = random_move(rng, &cur) {
            term = MorTerm::comp(term, m);
            cur = next;
        }
    }
    (term, cur)
}

pub fn arity(atoms: &[String]) -> Arity {
    Arity(atoms.to_vec())
}

/// Collapses `;;` to `;` and drops whitespace.
pub fn squash(s: &str) -> String {
    s.replace(";;", ";").chars().filter(|c| !c.is_whitespace()).collect()
}
