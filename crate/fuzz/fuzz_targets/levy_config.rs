#![no_main]

use libfuzzer_sys::fuzz_target;
use quasiopt::levy::LevyConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = LevyConfig::from_json(text) else { return };
    let _ = cfg.cutoffs();
    let _ = cfg.retained();
    let _ = cfg.admissible();
    let json = serde_json::to_string(&cfg).unwrap();
    LevyConfig::from_json(&json).expect("serialized config reparses");
});
