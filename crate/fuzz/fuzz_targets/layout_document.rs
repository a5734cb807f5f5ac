#![no_main]
use libfuzzer_sys::fuzz_target;
use teamtrace_layout::LayoutDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = serde_json::from_slice::<LayoutDocument>(data) else { return };
    let text = serde_json::to_string(&doc).unwrap();
    let _ = serde_json::from_str::<LayoutDocument>(&text).unwrap();
});
