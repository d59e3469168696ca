#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = quasiopt_cli::parse_run_config(text) {
        // A parsed configuration must survive its own canonical form.
        let again = quasiopt_cli::parse_run_config(&cfg.canonical_json()).expect("canonical form reparses");
        assert_eq!(again.canonical_json(), cfg.canonical_json());
    }
});
