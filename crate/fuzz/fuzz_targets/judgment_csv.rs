#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::abstraction::{abstract_mpl, read_judgment_csv, AbstractionConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(teams) = read_judgment_csv(data) else { return };
    let cfg = AbstractionConfig::default();
    for j in teams.values() {
        if let Ok(states) = abstract_mpl(&j.table, &j.targets, &cfg) {
            assert_eq!(states.len(), 5);
        }
    }
});
