//! One line per acceptance criterion, then a nonzero exit if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use common::*;
use moncat::diagram::{box_polygon, diagram_of_term, extract_expr, extract_nmor, layout, NodeKind, SliceItem};
use moncat::maclane::{eval_maclane, find_maclane};
use moncat::normalize::{decide_equal, normal_form, Verdict};
use moncat::rewrite::{apply, parse_neutral, parse_rocq, replay, Direction, ProofSession, ProofState, Side, Step};
use moncat::syntax::typing::Context;
use moncat::syntax::{parse_goal, EqKind, Equation, MorTerm, ObjTree, Signature, Structural};
use moncat_cli::commands::check;
use rand::Rng;

type Outcome = Result<String, String>;

fn equal(ctx: &Context, lhs: MorTerm, rhs: MorTerm) -> Result<(), String> {
    let eq = Equation { name: None, lhs, rhs, kind: EqKind::UpToCast };
    let te = ctx.typecheck_equation(&eq).map_err(|e| format!("{e} in {} ≡' {}", eq.lhs, eq.rhs))?;
    match decide_equal(ctx, &te.lhs, &te.rhs) {
        Verdict::Equal => Ok(()),
        v => Err(format!("{v}: {} ≡' {}", eq.lhs, eq.rhs)),
    }
}

/// A random term of at most `size` generators and its endpoints.
fn term(r: &mut impl Rng, ctx: &Context, size: usize) -> (MorTerm, ObjTree, ObjTree) {
    let src = random_atoms(r, 2);
    let n = r.gen_range(0..=size);
    let (t, _) = random_term(r, &ctx.signature, &src, n);
    let typed = ctx.typecheck(&t).expect("random terms typecheck");
    (t, typed.source, typed.target)
}

fn tree(r: &mut impl Rng) -> ObjTree {
    let atoms = random_atoms(r, 3);
    random_tree(r, &atoms, true)
}

fn st(s: Structural) -> MorTerm {
    MorTerm::Structural(s)
}

fn id(t: &ObjTree) -> MorTerm {
    MorTerm::Id(t.clone())
}

fn comp(f: MorTerm, g: MorTerm) -> MorTerm {
    MorTerm::comp(f, g)
}

fn tens(f: MorTerm, g: MorTerm) -> MorTerm {
    MorTerm::tensor(f, g)
}

/// One instance of a law. Terms are composed with `;;` where the middle
/// bracketings of independent random terms may differ.
fn instance(law: &str, r: &mut impl Rng, ctx: &Context) -> (MorTerm, MorTerm) {
    let (f, fs, ft) = term(r, ctx, 2);
    match law {
        "bifunctoriality" => {
            let n = r.gen_range(0..=2);
            let (g, _) = random_term(r, &ctx.signature, &ft.arity().0, n);
            let (h, _, ht) = term(r, ctx, 2);
            let n = r.gen_range(0..=2);
            let (k, _) = random_term(r, &ctx.signature, &ht.arity().0, n);
            if r.gen_bool(0.2) {
                let (a, b) = (tree(r), tree(r));
                return (tens(id(&a), id(&b)), id(&ObjTree::tensor(a, b)));
            }
            (
                tens(MorTerm::strict_comp(f.clone(), g.clone()), MorTerm::strict_comp(h.clone(), k.clone())),
                MorTerm::strict_comp(tens(f, h), tens(g, k)),
            )
        }
        "exchange" => {
            let (g, gs, gt) = term(r, ctx, 6);
            (comp(tens(f.clone(), id(&gs)), tens(id(&ft), g.clone())), comp(tens(id(&fs), g), tens(f, id(&gt))))
        }
        "naturality of the associator" => {
            let (g, gs, gt) = term(r, ctx, 3);
            let (h, hs, ht) = term(r, ctx, 2);
            (
                comp(tens(tens(f.clone(), g.clone()), h.clone()), st(Structural::assoc(ft, gt, ht))),
                comp(st(Structural::assoc(fs, gs, hs)), tens(f, tens(g, h))),
            )
        }
        "naturality of the left unitor" => {
            (comp(tens(id(&ObjTree::Unit), f.clone()), st(Structural::unitl(ft))), comp(st(Structural::unitl(fs)), f))
        }
        "naturality of the right unitor" => {
            (comp(tens(f.clone(), id(&ObjTree::Unit)), st(Structural::unitr(ft))), comp(st(Structural::unitr(fs)), f))
        }
        "triangle" => {
            let (a, b) = (tree(r), tree(r));
            (
                comp(
                    st(Structural::assoc(a.clone(), ObjTree::Unit, b.clone())),
                    tens(id(&a), st(Structural::unitl(b.clone()))),
                ),
                tens(st(Structural::unitr(a)), id(&b)),
            )
        }
        "pentagon" => {
            let (a, b, c, d) = (tree(r), tree(r), tree(r), tree(r));
            let ab = ObjTree::tensor(a.clone(), b.clone());
            let bc = ObjTree::tensor(b.clone(), c.clone());
            let cd = ObjTree::tensor(c.clone(), d.clone());
            (
                comp(st(Structural::assoc(ab, c.clone(), d.clone())), st(Structural::assoc(a.clone(), b.clone(), cd))),
                comp(
                    comp(
                        tens(st(Structural::assoc(a.clone(), b.clone(), c.clone())), id(&d)),
                        st(Structural::assoc(a.clone(), bc, d.clone())),
                    ),
                    tens(id(&a), st(Structural::assoc(b, c, d))),
                ),
            )
        }
        _ => unreachable!(),
    }
}

fn axiom_suite() -> Outcome {
    const LAWS: [&str; 7] = [
        "bifunctoriality",
        "exchange",
        "naturality of the associator",
        "naturality of the left unitor",
        "naturality of the right unitor",
        "triangle",
        "pentagon",
    ];
    let start = Instant::now();
    let mut r = rng(1);
    let mut total = 0;
    for law in LAWS {
        for i in 0..500 {
            let sig = signature(&mut r, false);
            let ctx = Context::new(sig);
            let (l, rr) = instance(law, &mut r, &ctx);
            equal(&ctx, l, rr).map_err(|e| format!("{law} #{i}: {e}"))?;
            total += 1;
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(30) {
        return Err(format!("{total} instances equal but took {t:.1?}"));
    }
    Ok(format!("{total} instances over {} laws equal in {t:.2?}", LAWS.len()))
}

fn goal_equal() -> Outcome {
    let report = check(&fixture("interchange.goal")).map_err(|e| e.to_string())?;
    match report.conclusion.1 {
        Verdict::Equal => Ok("`(f;g)·h ≡ f·h ; g·C·C` is Equal".into()),
        v => Err(format!("verdict {v}")),
    }
}

/// Every way of flipping one object atom inside one transitivity term.
fn mutants(script: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (i, line) in script.lines().enumerate() {
        let Some(open) = line.find("transitivity (") else {
            continue;
        };
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        for (k, &(at, c)) in chars.iter().enumerate() {
            let alone = |j: Option<&(usize, char)>| j.is_none_or(|&(_, d)| !d.is_alphanumeric());
            if at > open + 13
                && (c == 'M' || c == 'N')
                && alone(k.checked_sub(1).and_then(|j| chars.get(j)))
                && alone(chars.get(k + 1))
            {
                let flipped = format!("{}{}{}", &line[..at], if c == 'M' { 'N' } else { 'M' }, &line[at + 1..]);
                let text: Vec<&str> =
                    script.lines().enumerate().map(|(j, l)| if j == i { flipped.as_str() } else { l }).collect();
                out.push((i + 1, text.join("\n")));
            }
        }
    }
    out
}

fn running_example() -> Outcome {
    let start = Instant::now();
    let goal = parse_goal(&fixture("mna.goal")).map_err(|e| e.to_string())?;
    let mut count = 0;
    for name in ["mna_stepwise.v", "mna_parallel.v"] {
        let text = fixture(name);
        let steps = parse_rocq(&text, &goal).map_err(|e| format!("{name}: {e}"))?;
        if !replay(&goal, &steps).map_err(|e| format!("{name}: {e}"))?.closed {
            return Err(format!("{name} does not close the proof"));
        }
        for (line, m) in mutants(&text) {
            let steps = parse_rocq(&m, &goal).map_err(|e| format!("{name} mutant at line {line}: {e}"))?;
            match replay(&goal, &steps) {
                Err(f) if f.line == line => count += 1,
                Err(f) => return Err(format!("{name} mutant at line {line} failed at line {}", f.line)),
                Ok(_) => return Err(format!("{name} mutant at line {line} replays")),
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(5) {
        return Err(format!("took {t:.1?}"));
    }
    Ok(format!("both scripts replay, all {count} one-atom mutants fail at their step, {t:.2?}"))
}

fn extraction_fidelity() -> Outcome {
    let goal = parse_goal(&fixture("mna.goal")).map_err(|e| e.to_string())?;
    let ctx = Context::from_goal(&goal).map_err(|e| e.to_string())?;
    let mut st = ProofState::new(&goal);
    apply(&goal, &ctx, &mut st, &Step::Unfold { name: "mn".into() }).map_err(|e| e.to_string())?;
    let typed = ctx.typecheck(&st.lhs).map_err(|e| e.to_string())?;
    let l = layout(&diagram_of_term(&ctx, &typed)).map_err(|e| e.to_string())?;
    let plain = extract_expr(&ctx, &l.diagram).map_err(|e| e.to_string())?.to_string();
    let want = "M·x·N·M·N ; M·M·n·M·N ; m·x·N ; m·n";
    if squash(&plain) != squash(want) {
        return Err(format!("read {plain}"));
    }
    let find = |name: &str, row: usize| {
        l.rows[row].iter().find_map(|(it, _)| match *it {
            SliceItem::Node(n) if matches!(&l.diagram.nodes[n].kind, NodeKind::Generator { name: x } if x == name) => {
                Some(n)
            }
            _ => None,
        })
    };
    let region = [find("n", 1).ok_or("no n")?, find("x", 2).ok_or("no x")?];
    let poly = l.polygon_around(&region).ok_or("no region")?;
    let b = box_polygon(&l, &poly).map_err(|e| e.to_string())?;
    let boxed = extract_expr(&ctx, &b.layout.diagram).map_err(|e| e.to_string())?.to_string();
    let want_boxed = "M·x·N·M·N ; m·[n·M ; x]·N ; m·n";
    if squash(&boxed) != squash(want_boxed) {
        return Err(format!("read {boxed}"));
    }
    Ok(format!("`{plain}` and `{boxed}`"))
}

fn counterexample() -> Outcome {
    let text = fixture("empty_target.goal");
    let goal = parse_goal(&text).map_err(|e| e.to_string())?;
    let ctx = Context::from_goal(&goal).map_err(|e| e.to_string())?;
    let nf = |src: &str| -> Result<_, String> {
        let t = moncat::syntax::parse_term(src, &goal.resolver()).map_err(|e| e.to_string())?;
        Ok(normal_form(&ctx, &ctx.typecheck(&t).map_err(|e| e.to_string())?))
    };
    if nf("f·g")? == nf("g·f")? {
        return Err("the normal forms coincide".into());
    }
    let report = check(&text).map_err(|e| e.to_string())?;
    match report.conclusion.1 {
        Verdict::Unknown => Ok(format!("distinct normal forms, verdict Unknown, exit code {}", report.exit_code())),
        v => Err(format!("verdict {v}")),
    }
}

fn oracle() -> Outcome {
    let mut r = rng(2);
    for i in 0..1000 {
        let ctx = Context::new(signature(&mut r, false));
        let src = random_atoms(&mut r, 3);
        let n = r.gen_range(1..=12);
        let (t, _) = random_term(&mut r, &ctx.signature, &src, n);
        let typed = ctx.typecheck(&t).map_err(|e| format!("#{i}: {e}"))?;
        let d = diagram_of_term(&ctx, &typed);
        let read = extract_nmor(&d).map_err(|e| format!("#{i} {t}: {e}"))?;
        if read != normal_form(&ctx, &typed) {
            return Err(format!("#{i}: {t}"));
        }
    }
    Ok("1000 random terms, normal form equals the diagram's reading".into())
}

fn coherence() -> Outcome {
    let mut r = rng(3);
    let ctx = Context::new(Signature { objects: OBJECTS.iter().map(|s| s.to_string()).collect(), generators: vec![] });
    for i in 0..200 {
        let atoms = random_atoms(&mut r, 5);
        let a = random_tree(&mut r, &atoms, true);
        let (path, b) = random_path(&mut r, &a, 12);
        let canon = eval_maclane(&find_maclane(&a, &b).map_err(|e| format!("#{i}: {e}"))?);
        let tp = ctx.check(&path, &a, &b).map_err(|e| format!("#{i}: {e}"))?;
        let tc = ctx.check(&canon, &a, &b).map_err(|e| format!("#{i}: {e}"))?;
        if decide_equal(&ctx, &tp, &tc) != Verdict::Equal {
            return Err(format!("#{i}: {path} vs {canon}"));
        }
        let mut k = 0;
        let v = labelled(&a, &mut k);
        if run(&path, v.clone()) != run(&canon, v) {
            return Err(format!("#{i}: the two witnesses move leaves differently"));
        }
    }
    Ok("200 pairs, canonical and random witnesses decide Equal and act alike".into())
}

fn unit_laws() -> Outcome {
    for side in ["left", "right"] {
        let goal = parse_goal(&fixture(&format!("units_{side}.goal"))).map_err(|e| e.to_string())?;
        let steps = parse_neutral(&fixture(&format!("units_{side}.proof")), &goal).map_err(|e| e.to_string())?;
        if !replay(&goal, &steps).map_err(|e| format!("{side}: {e}"))?.closed {
            return Err(format!("{side} unit law not closed"));
        }
    }
    Ok("left and right unit laws replay".into())
}

fn session_export() -> Outcome {
    let goal = parse_goal(&fixture("mna.goal")).map_err(|e| e.to_string())?;
    let mut s = ProofSession::new(goal).map_err(|e| e.to_string())?;
    let node = |s: &ProofSession, side: Side, name: &str, k: usize| -> Result<usize, String> {
        let l = s.side(side).layout;
        let mut v: Vec<(f64, f64, usize)> = (0..l.diagram.nodes.len())
            .filter(|&n| match &l.diagram.nodes[n].kind {
                NodeKind::Generator { name: x } => x == name,
                NodeKind::Boxed { .. } => name == "box",
            })
            .map(|n| (l.nodes[n].center.y, l.nodes[n].center.x, n))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.get(k).map(|t| t.2).ok_or_else(|| format!("no {name} #{k}"))
    };
    let e = |e: moncat::rewrite::SessionError| e.to_string();
    s.unfold("mn").map_err(e)?;
    for (side, a, b, hyp, dir) in [
        (Side::Lhs, ("n", 0), ("x", 1), "nx", Direction::Forward),
        (Side::Rhs, ("m", 0), ("x", 1), "mx", Direction::Forward),
    ] {
        let nodes = [node(&s, side, a.0, a.1)?, node(&s, side, b.0, b.1)?];
        let bx = s.box_nodes(side, &nodes).map_err(e)?;
        s.rewrite(side, bx, hyp, dir).map_err(e)?;
    }
    for side in [Side::Lhs, Side::Rhs] {
        let bx = node(&s, side, "box", 0)?;
        s.unbox(side, bx).map_err(e)?;
    }
    for (side, name, hyp, dir) in
        [(Side::Lhs, "m", "mA", Direction::Forward), (Side::Rhs, "n", "nA", Direction::Backward)]
    {
        let nodes = [node(&s, side, name, 0)?, node(&s, side, name, 1)?];
        let bx = s.box_nodes(side, &nodes).map_err(e)?;
        s.rewrite(side, bx, hyp, dir).map_err(e)?;
    }
    if !s.done() {
        return Err("the sides are not equal after four rewrites".into());
    }
    if squash(&s.export_rocq()) != squash(&fixture("mna_stepwise.v")) {
        return Err(format!("exported\n{}", s.export_rocq()));
    }
    Ok("boxing and rewriting interactively exports the reference script".into())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("axiom suite", axiom_suite),
        ("interchange goal", goal_equal),
        ("running example replay", running_example),
        ("extraction fidelity", extraction_fidelity),
        ("empty-target counterexample", counterexample),
        ("oracle equivalence", oracle),
        ("coherence", coherence),
        ("monoid unit laws", unit_laws),
        ("session export", session_export),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
