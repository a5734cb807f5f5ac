#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_core::model::{parse_event_line, parse_event_log, partition_traces, to_jsonl};

fuzz_target!(|data: &[u8]| {
    let log = parse_event_log(data).expect("in-memory reads cannot fail");
    assert_eq!(log.events.len(), log.lines.len());
    // accepted events survive a write/read cycle unchanged
    let again = parse_event_log(to_jsonl(&log.events).as_bytes()).unwrap();
    assert_eq!(again.events, log.events);
    assert!(again.diagnostics.is_empty());
    let traces = partition_traces(&log.events);
    assert_eq!(traces.values().map(|t| t.events().len()).sum::<usize>(), log.events.len());
    if let Ok(line) = std::str::from_utf8(data) {
        let _ = parse_event_line(line);
    }
});
