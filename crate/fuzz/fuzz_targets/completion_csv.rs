#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_cli::simulate::read_completion_csv;
use teamtrace_core::perfscore::team_time_score;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = read_completion_csv(text) else { return };
    for r in rows {
        if let Ok(t) = team_time_score(r.raw_hours, r.eggs) {
            assert!(t.adjusted >= 0.0 && t.adjusted <= t.raw_completion);
        }
    }
});
