#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::distance::{distance, DistanceConfig, MetricKind};
use teamtrace_core::states::{Sequence, SequenceFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = SequenceFile::from_json_str(text) else { return };
    assert_eq!(SequenceFile::from_json_str(&file.to_json_pretty()).unwrap(), file);
    for pair in file.sequences.windows(2) {
        let metric = match pair[0].seq {
            Sequence::Mpl(_) => MetricKind::Mpl,
            Sequence::Daedalus(_) => MetricKind::Daedalus,
        };
        let cfg = DistanceConfig { metric, ..DistanceConfig::default() };
        if let Ok(d) = distance(&pair[0].seq, &pair[1].seq, &cfg) {
            assert!(d >= 0.0);
        }
    }
});
