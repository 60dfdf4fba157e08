#![no_main]
use libfuzzer_sys::fuzz_target;
use moncat::syntax::parse_goal;
use moncat::syntax::typing::Context;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(goal) = parse_goal(text) {
        // whatever parses must also survive typing, right or wrong
        if let Ok(ctx) = Context::from_goal(&goal) {
            let _ = ctx.typecheck_equation(&goal.conclusion);
        }
    }
});
