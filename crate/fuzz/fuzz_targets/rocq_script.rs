#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use moncat::rewrite::{parse_rocq, replay};
use moncat::syntax::{parse_goal, Goal};

fn goal() -> &'static Goal {
    static G: OnceLock<Goal> = OnceLock::new();
    G.get_or_init(|| parse_goal(include_str!("../../crates/core/tests/fixtures/mna.goal")).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(steps) = parse_rocq(text, goal()) {
        let _ = replay(goal(), &steps);
    }
});
