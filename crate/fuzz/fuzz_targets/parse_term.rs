#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use moncat::syntax::{parse_goal, parse_term, Goal};

const SIGNATURE: &str = "m : M⊗M ~> M\nn : N⊗N ~> N\nx : N⊗M ~> M⊗N\nmn := M·x·N ;; m·n\n===\nmn ≡ mn";

fn goal() -> &'static Goal {
    static G: OnceLock<Goal> = OnceLock::new();
    G.get_or_init(|| parse_goal(SIGNATURE).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_term(text, &goal().resolver()) {
        // printing then parsing again gives the same term
        let again = parse_term(&t.to_string(), &goal().resolver()).expect("printed terms parse");
        assert_eq!(again, t);
    }
});
