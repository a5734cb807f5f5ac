#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::catalog::ScreenCatalog;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = ScreenCatalog::from_toml_str(text) {
        assert_eq!(ScreenCatalog::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }
    let _ = ScreenCatalog::from_json_str(text);
});
