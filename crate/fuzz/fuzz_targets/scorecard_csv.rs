#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::perfscore::read_scorecard_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(teams) = read_scorecard_csv(data) else { return };
    for cards in teams.values() {
        let mut running = 0.0;
        for c in cards {
            running += c.bs;
            assert!((c.cbs - running).abs() <= 1e-6 * running.abs().max(1.0));
        }
    }
});
