#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_stats::agreement::{fleiss_kappa, RatingTable};

fuzz_target!(|data: &[u8]| {
    let Ok(t) = RatingTable::from_csv(data) else { return };
    if let Ok(Some(k)) = fleiss_kappa(&t) {
        assert!(k <= 1.0 + 1e-9);
    }
});
