#![no_main]
use libfuzzer_sys::fuzz_target;
use moncat::diagram::{extract_nmor, layout, DiagramJson};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = DiagramJson::decode(text) {
        // a decoded diagram is valid, so reading and laying it out must not panic
        let _ = extract_nmor(&d);
        let _ = layout(&d);
    }
});
