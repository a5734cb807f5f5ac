#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::distance::DistanceMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = DistanceMatrix::from_csv(data) else { return };
    let back = DistanceMatrix::from_csv(m.to_csv().as_bytes()).unwrap();
    assert_eq!(back.rows(), m.rows());
});
