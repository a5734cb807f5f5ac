#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_cli::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = RunConfig::from_toml_str(text, &[]) else { return };
    // a validated config serializes to a document that loads back to itself
    let written = toml::to_string(&cfg).unwrap();
    assert_eq!(RunConfig::from_toml_str(&written, &[]).unwrap(), cfg);
});
