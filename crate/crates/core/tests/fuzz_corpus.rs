//! The checked-in fuzz seeds, run through the same entry points as the fuzz
//! targets. Every seed is a valid input, so every seed must be accepted.

mod common;

use std::path::PathBuf;

use common::fixture;
use moncat::diagram::{extract_nmor, layout, DiagramJson};
use moncat::rewrite::{parse_neutral, parse_rocq, replay};
use moncat::syntax::typing::Context;
use moncat::syntax::{parse_goal, parse_term};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn goal_seeds() {
    for (name, text) in seeds("parse_goal") {
        let g = parse_goal(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let ctx = Context::from_goal(&g).unwrap();
        ctx.typecheck_equation(&g.conclusion).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn term_seeds() {
    let g = parse_goal("m : M⊗M ~> M\nn : N⊗N ~> N\nx : N⊗M ~> M⊗N\nmn := M·x·N ;; m·n\n===\nmn ≡ mn").unwrap();
    for (name, text) in seeds("parse_term") {
        let t = parse_term(&text, &g.resolver()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_term(&t.to_string(), &g.resolver()).unwrap(), t, "{name}");
    }
}

#[test]
fn script_seeds() {
    let g = parse_goal(&fixture("mna.goal")).unwrap();
    for (name, text) in seeds("rocq_script") {
        let steps = parse_rocq(&text, &g).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(replay(&g, &steps).unwrap().closed, "{name}");
    }
    for (name, text) in seeds("neutral_script") {
        // seeds are named after their goal, or `<goal>_<variant>`
        let stem = if name.starts_with("units") { name.as_str() } else { name.split('_').next().unwrap() };
        let goal = parse_goal(&fixture(&format!("{stem}.goal"))).unwrap();
        let steps = parse_neutral(&text, &goal).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(replay(&goal, &steps).unwrap().closed, "{name}");
    }
}

#[test]
fn diagram_seeds() {
    for (name, text) in seeds("diagram_json") {
        let d = DiagramJson::decode(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        extract_nmor(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
        layout(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn garbage_is_refused_without_panicking() {
    let g = parse_goal(&fixture("mna.goal")).unwrap();
    for text in ["", "·", "f : ~>", "[[[", "((((", "m ;; ;; m", "{\"schema\":1}", "transitivity (m. mcat.", "\u{0}"] {
        let _ = parse_goal(text);
        let _ = parse_term(text, &g.resolver());
        let _ = parse_neutral(text, &g);
        let _ = parse_rocq(text, &g);
        assert!(DiagramJson::decode(text).is_err());
    }
}
