#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Large k_max is valid but slow; keep iterations short.
    if text.len() > 4096 {
        return;
    }
    let Ok(doc) = quasiopt::config::ProblemDocument::from_json(text) else {
        return;
    };
    if !matches!(doc.declared_k_max(), Ok(k) if k <= 1 << 16) {
        return;
    }
    if let Ok((problem, sub)) = doc.build() {
        let _ = quasiopt::model::Profiles::compute(&problem, &sub);
    }
});
