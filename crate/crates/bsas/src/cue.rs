use teamtrace_core::states::DaedalusState;

/// Share of cue visits that were relevant; `None` when there were none.
pub fn cue_recognition(relevant: usize, irrelevant: usize) -> Option<f64> {
    let total = relevant + irrelevant;
    (total > 0).then(|| relevant as f64 / total as f64)
}

/// `(relevant, irrelevant)` cue visits in an abstracted sequence.
pub fn cue_counts(states: &[DaedalusState]) -> (usize, usize) {
    states.iter().fold((0, 0), |(r, i), s| match s {
        DaedalusState::RelevantCue => (r + 1, i),
        DaedalusState::IrrelevantCue => (r, i + 1),
        _ => (r, i),
    })
}
