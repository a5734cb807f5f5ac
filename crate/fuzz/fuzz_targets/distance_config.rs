#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::distance::DistanceConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match DistanceConfig::from_json_checked(text) {
        Ok(cfg) => assert!(cfg.validate().is_ok()),
        Err(errors) => assert!(!errors.is_empty()),
    }
});
