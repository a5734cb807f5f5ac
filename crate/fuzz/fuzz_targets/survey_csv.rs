#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_stats::reliability::cronbach_alpha;
use teamtrace_stats::survey::SurveyMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = SurveyMatrix::from_csv(data) else { return };
    assert!(m.cells.iter().flatten().flatten().all(|v| (1..=5).contains(v)));
    if let Ok(rows) = m.complete_rows(&m.items) {
        let _ = cronbach_alpha(&rows, 0.95);
    }
});
