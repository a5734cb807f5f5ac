#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_bsas::features::FeatureMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = FeatureMatrix::from_csv(data) else { return };
    assert!(m.rows.iter().all(|r| r.len() == m.features.len()));
    let _ = m.column_means();
    let _ = FeatureMatrix::from_csv(m.to_csv().as_bytes());
});
