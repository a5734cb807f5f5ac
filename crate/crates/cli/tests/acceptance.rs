//! End-to-end acceptance checks. Runs without the libtest harness so the
//! per-check verdicts always reach the console; exits non-zero on any FAIL.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use teamtrace_bsas::baseline::dummy_baseline_mc;
use teamtrace_bsas::forest::{argmax, ForestParams, RandomForest};
use teamtrace_bsas::infocoll::info_coll;
use teamtrace_bsas::pipeline::{run_pipeline, PipelineConfig};
use teamtrace_bsas::synth::screen_time_cohort;
use teamtrace_cli::commands;
use teamtrace_cli::config::RunConfig;
use teamtrace_cli::simulate::{completion_csv, simulate, SynthSpec};
use teamtrace_core::abstraction::{abstract_daedalus, AbstractionConfig};
use teamtrace_core::adaptscore::{adaptation_scores, ranking, BandCuts, IdealTrace};
use teamtrace_core::catalog::{ScreenCatalog, ScreenCategory};
use teamtrace_core::distance::{daedalus_distance, DaedalusPenalties, DistanceConfig, MetricKind};
use teamtrace_core::model::{to_jsonl, EventKind, RawEvent, Trace, TraceOwner};
use teamtrace_core::perfscore::{
    chat_activity, financial_performance, individual_performance, puzzle_activity, scorecard, team_time_score,
    IndividualMix, JudgmentInputs, PuzzleTiming, QuarterFinancials, SegmentInputs,
};
use teamtrace_core::states::{DaedalusState, MplState, TraceSequence};
use teamtrace_layout::mds::mds_embed;
use teamtrace_stats::agreement::{fleiss_kappa, RatingTable};
use teamtrace_stats::pca::{pca, Rotation};
use teamtrace_stats::rank::mann_whitney;
use teamtrace_stats::reliability::cronbach_alpha;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn timed(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

// ---------------------------------------------------------------- MPL

const IDEAL: &str = "target: increase, non-target: increase";

fn mpl(id: &str, states: &[&str]) -> TraceSequence {
    TraceSequence::mpl(id, states.iter().map(|s| s.parse::<MplState>().unwrap()).collect())
}

fn mpl_reference_distances() -> Check {
    let t = Instant::now();
    let me69 = mpl(
        "me69",
        &[
            IDEAL,
            "target: increase, non-target: increase_unchanged",
            "target: decrease_unchanged, non-target: increase",
            IDEAL,
            "target: decrease_unchanged, non-target: unchanged",
        ],
    );
    let me92 = mpl(
        "me92",
        &[
            IDEAL,
            "target: increase, non-target: increase_unchanged",
            "target: decrease_increase, non-target: increase",
            IDEAL,
            "target: unchanged, non-target: increase",
        ],
    );
    let s = adaptation_scores(&[me92, me69], &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
        .map_err(|e| e.to_string())?;
    ensure!(s[0].raw_distance == 16.0, "ME 92 distance {}", s[0].raw_distance);
    ensure!(s[1].raw_distance == 24.0, "ME 69 distance {}", s[1].raw_distance);
    ensure!(s[0].score > s[1].score, "92 should score above 69");
    Ok(format!("d = 16 and 24 ({:?})", timed(Duration::from_secs(1), t)?))
}

fn failure_to_adapt_ranks_low() -> Check {
    let t = Instant::now();
    let stumbles = [
        mpl(
            "f1",
            &[
                IDEAL,
                "target: decrease, non-target: decrease_increase",
                "target: increase_unchanged, non-target: increase",
                "target: unchanged, non-target: unchanged",
                "target: increase_unchanged, non-target: increase",
            ],
        ),
        mpl(
            "f2",
            &[
                IDEAL,
                "target: decrease, non-target: decrease_increase",
                IDEAL,
                "target: increase_unchanged, non-target: unchanged",
                IDEAL,
            ],
        ),
        mpl(
            "f3",
            &[
                IDEAL,
                "target: decrease, non-target: decrease_increase",
                "target: increase_unchanged, non-target: increase",
                "target: increase_unchanged, non-target: unchanged",
                "target: increase, non-target: decrease",
            ],
        ),
    ];
    // near-ideal: at most one non-target quarter that merely held steady
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cohort: Vec<TraceSequence> = stumbles.to_vec();
    for i in 0..10 {
        let mut states = vec![IDEAL; 5];
        if rng.random_bool(0.6) {
            states[rng.random_range(0..5)] = "target: increase, non-target: increase_unchanged";
        }
        cohort.push(mpl(&format!("n{i}"), &states));
    }
    let s = adaptation_scores(&cohort, &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
        .map_err(|e| e.to_string())?;
    let mut scores: Vec<f64> = s.iter().map(|x| x.score).collect();
    scores.sort_by(f64::total_cmp);
    let median = scores[scores.len() / 2];
    for x in &s[..3] {
        ensure!(x.raw_distance >= 10.0, "{} distance {}", x.trace_id, x.raw_distance);
        ensure!(x.score < median, "{} score {} not below median {median}", x.trace_id, x.score);
    }
    let d: Vec<f64> = s[..3].iter().map(|x| x.raw_distance).collect();
    Ok(format!("distances {d:?}, all below median score {median:.3} ({:?})", timed(Duration::from_secs(1), t)?))
}

// ---------------------------------------------------------- Daedalus

/// Fewest mismatches over every monotone alignment, by exhaustive walk.
fn brute_dtw(a: &[DaedalusState], b: &[DaedalusState]) -> usize {
    if a.is_empty() || b.is_empty() {
        return a.len().max(b.len());
    }
    fn walk(a: &[DaedalusState], b: &[DaedalusState], i: usize, j: usize, acc: usize, best: &mut usize) {
        let acc = acc + usize::from(a[i] != b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = (*best).min(acc);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
    }
    let mut best = usize::MAX;
    walk(a, b, 0, 0, 0, &mut best);
    best
}

fn dae(labels: &[&str]) -> Vec<DaedalusState> {
    labels.iter().map(|l| l.parse().unwrap()).collect()
}

fn penalty_isolation() -> Check {
    let t = Instant::now();
    let p = DaedalusPenalties::default();
    let only = |f: &dyn Fn(&mut DaedalusPenalties)| {
        let mut q = DaedalusPenalties {
            base_mismatch: 1.0,
            solved_mismatch: 0.0,
            final_puzzle_extra: 0.0,
            gave_up_disparity: 0.0,
            gave_up_without_trying: 0.0,
            failed_once: 0.0,
            failed_many_times: 0.0,
            irrelevant_cue: 0.0,
            earliness_weight: 0.0,
            ..p.clone()
        };
        f(&mut q);
        q
    };
    let complete = dae(&["relevant_cue", "solved_glyph", "relevant_cue", "solved_safe"]);
    let cases: [(&str, Vec<DaedalusState>, DaedalusPenalties, f64); 4] = [
        (
            "gave-up disparity",
            dae(&["relevant_cue", "solved_glyph", "relevant_cue", "solved_safe", "gave_up_2"]),
            only(&|q| q.gave_up_disparity = p.gave_up_disparity),
            300.0,
        ),
        ("never tried", dae(&["gave_up_without_trying"]), only(&|q| q.gave_up_without_trying = p.gave_up_without_trying), 400.0),
        (
            "extra failed_many_times",
            dae(&["relevant_cue", "failed_many_times", "solved_glyph", "relevant_cue", "solved_safe"]),
            p.clone(),
            3.0,
        ),
        (
            "extra irrelevant_cue",
            dae(&["relevant_cue", "solved_glyph", "irrelevant_cue", "relevant_cue", "solved_safe"]),
            p.clone(),
            2.0,
        ),
    ];
    let mut seen = Vec::new();
    for (name, other, pen, expect) in cases {
        ensure!(complete.len() <= 8 && other.len() <= 8, "{name}: oracle limited to length 8");
        let d = daedalus_distance(&complete, &other, &pen);
        let net = d - pen.base_mismatch * brute_dtw(&complete, &other) as f64;
        ensure!(net == expect, "{name}: net {net}, expected {expect}");
        seen.push(net);
    }
    Ok(format!("net penalties {seen:?} ({:?})", timed(Duration::from_secs(1), t)?))
}

// -------------------------------------------------------- abstraction

#[derive(Clone, Copy)]
enum Step {
    Cue,
    Hub,
    Fail,
    Solve,
}

fn step_trace(steps: &[Step]) -> Trace {
    let events = steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (kind, payload) = match s {
                Step::Cue => (EventKind::ScreenView, json!({"screen_id": "dots", "duration_s": 1.0})),
                Step::Hub => (EventKind::ScreenView, json!({"screen_id": "hub", "duration_s": 1.0})),
                Step::Fail => (EventKind::ButtonPress, json!({"puzzle_id": "p1", "correct": false})),
                Step::Solve => (EventKind::PuzzleSolved, json!({"puzzle_id": "p1"})),
            };
            let ts = Utc.timestamp_opt(1_700_000_000 + 10 * i as i64, 0).unwrap();
            RawEvent::new(ts, "t", "a", kind, payload.as_object().unwrap().clone()).unwrap()
        })
        .collect();
    Trace::new(TraceOwner::player("t", "a"), events).unwrap()
}

/// Single-puzzle replay: consecutive failures with nothing between them
/// form a run; runs longer than `threshold` collapse; a solve with no
/// relevant cue in the `window` states before it gains `no_relevant`.
fn window_replay(steps: &[Step], threshold: usize, window: usize) -> Vec<DaedalusState> {
    let mut collapsed = Vec::new();
    let mut i = 0;
    let mut solved = false;
    while i < steps.len() {
        match steps[i] {
            Step::Fail => {
                let run = steps[i..].iter().take_while(|s| matches!(s, Step::Fail)).count();
                if run > threshold {
                    collapsed.push(DaedalusState::FailedManyTimes);
                } else {
                    collapsed.extend(std::iter::repeat_n(DaedalusState::FailedOnce, run));
                }
                i += run;
                continue;
            }
            Step::Cue => collapsed.push(if solved { DaedalusState::IrrelevantCue } else { DaedalusState::RelevantCue }),
            Step::Hub => collapsed.push(DaedalusState::Navigation),
            Step::Solve => {
                solved = true;
                collapsed.push(DaedalusState::solved("p1"));
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    for (k, s) in collapsed.iter().enumerate() {
        if matches!(s, DaedalusState::Solved(_)) && !collapsed[k.saturating_sub(window)..k].contains(&DaedalusState::RelevantCue) {
            out.push(DaedalusState::NoRelevant);
        }
        out.push(s.clone());
    }
    out
}

fn abstraction_fixtures() -> Check {
    let mut catalog = ScreenCatalog::default();
    catalog.insert("hub", ScreenCategory::Navigation, &[]);
    catalog.insert("dots", ScreenCategory::Cue, &["p1"]);
    let cfg = AbstractionConfig {
        failure_collapse_threshold: 3,
        no_relevant_window: 8,
        puzzle_order: vec!["p1".into()],
        ..Default::default()
    };
    use Step::*;
    let hubs = |n: usize| std::iter::repeat_n(Hub, n);
    let fixtures: Vec<(&str, Vec<Step>)> = vec![
        ("3 failures", vec![Cue, Fail, Fail, Fail, Solve]),
        ("4 failures", vec![Cue, Fail, Fail, Fail, Fail, Solve]),
        ("cue 8 back", std::iter::once(Cue).chain(hubs(7)).chain([Solve]).collect()),
        ("cue 9 back", std::iter::once(Cue).chain(hubs(8)).chain([Solve]).collect()),
    ];
    let mut marks = Vec::new();
    for (name, steps) in &fixtures {
        let got = abstract_daedalus(&step_trace(steps), &catalog, &cfg, None).map_err(|e| e.to_string())?;
        let want = window_replay(steps, 3, 8);
        ensure!(got == want, "{name}: {got:?} vs {want:?}");
        marks.push(got.contains(&DaedalusState::FailedManyTimes) || got.contains(&DaedalusState::NoRelevant));
    }
    ensure!(marks == [false, true, false, true], "off-by-one boundaries wrong: {marks:?}");
    Ok("3 vs 4 failures and cue 8 vs 9 back match the replay".into())
}

// -------------------------------------------------------- performance

fn performance_formulas() -> Check {
    let fp = financial_performance(&QuarterFinancials { revenue: 30e6, expenses: 20e6 });
    ensure!(fp == 50.0, "FP {fp}");
    // one target segment with brand 65 and ad 65 gives ME 65
    let seg = SegmentInputs { segment: "a".into(), brand_judgment: Some(65.0), ad_judgment: Some(65.0), market_share: Some(30.0) };
    let card = scorecard(1, &QuarterFinancials { revenue: 30e6, expenses: 20e6 }, &JudgmentInputs { targets: vec![seg] }, 0.0)
        .map_err(|e| e.to_string())?;
    ensure!((card.bs - 145.0 / 3.0).abs() < 1e-9, "BS {}", card.bs);
    let adj = team_time_score(120.0, 5).map_err(|e| e.to_string())?.adjusted;
    ensure!(adj == 110.0, "120 h with 5 eggs -> {adj}");

    let pa = |t: &[PuzzleTiming], n| puzzle_activity(t, n).unwrap();
    let timing = |q: f64, s: f64, p: Option<f64>| PuzzleTiming { quickest: q, slowest: s, player: p };
    ensure!(pa(&[timing(1.0, 2.0, None)], 1) == 0.0, "PA of nothing solved");
    ensure!((pa(&[timing(1.0, 5.0, Some(1.0)), timing(2.0, 9.0, Some(2.0))], 2) - 1.0).abs() < 1e-9, "PA quickest");
    ensure!(pa(&[timing(1.0, 5.0, Some(5.0))], 1).abs() < 1e-9, "PA slowest");
    let counts: BTreeMap<String, u64> = [("a", 10), ("b", 5)].map(|(k, v)| (k.to_string(), v)).into();
    ensure!((chat_activity(&counts, "b").unwrap() - 0.5).abs() < 1e-9, "CA half");
    let mix = IndividualMix::default();
    ensure!((individual_performance(0.6, 0.3, 0.5, &mix) - 0.25).abs() < 1e-9, "IPS fixture");

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..10_000 {
        let n = rng.random_range(1..8);
        let timings: Vec<PuzzleTiming> = (0..rng.random_range(0..=n))
            .map(|_| {
                let q = rng.random_range(0.0..100.0);
                let s = q + rng.random_range(0.0..100.0);
                timing(q, s, rng.random_bool(0.7).then(|| rng.random_range(q..=s)))
            })
            .collect();
        let pa = puzzle_activity(&timings, n).map_err(|e| e.to_string())?;
        let counts: BTreeMap<String, u64> = (0..4).map(|i| (format!("p{i}"), rng.random_range(1..50))).collect();
        let ca = chat_activity(&counts, "p0").map_err(|e| e.to_string())?;
        let ips = individual_performance(pa, ca, rng.random_range(0.0..=1.0), &mix);
        for v in [pa, ca, ips] {
            ensure!((0.0..=1.0).contains(&v), "trial {trial}: {v} outside [0, 1]");
        }
    }
    Ok("FP 50, BS 48.333, 110 h, fixtures exact; PA/CA/IPS in [0, 1] over 10000 draws".into())
}

// --------------------------------------------------------------- bsas

fn bsas_synthetic() -> Check {
    let t = Instant::now();
    let c = screen_time_cohort(200, 12, 5, 0.3, 1);
    let report = run_pipeline(&c.features.rows, &c.labels, 5, &PipelineConfig { seed: 1, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let took = timed(Duration::from_secs(60), t)?;
    let gain = report.test.macro_f1 - report.baseline_macro_f1;
    ensure!(gain >= 0.3, "macro-F1 {:.3} vs baseline {:.3}", report.test.macro_f1, report.baseline_macro_f1);

    let mut wins = 0;
    for seed in 0..10 {
        let c = screen_time_cohort(200, 12, 5, 0.3, seed);
        let f = RandomForest::fit(&c.features.rows, &c.labels, 5, &ForestParams::default(), seed).map_err(|e| e.to_string())?;
        wins += usize::from(argmax(&f.importances()) == 0);
    }
    ensure!(wins >= 9, "informative feature ranked first in {wins}/10 seeds");

    let balanced: Vec<usize> = (0..200).map(|i| i % 5).collect();
    let base = dummy_baseline_mc(&balanced, 5, 100_000, 3);
    ensure!((base - 0.2).abs() <= 0.01, "baseline {base}");
    Ok(format!(
        "F1 {:.3} vs baseline {:.3}, feature A first in {wins}/10, MC baseline {base:.4}, full grid {took:?}",
        report.test.macro_f1, report.baseline_macro_f1
    ))
}

fn info_coll_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let n = rng.random_range(1..12);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..5.0)).collect();
        let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..500.0)).collect();
        let v = info_coll(&w, &mu, &mu, None).map_err(|e| e.to_string())?;
        ensure!(v == 0.5, "at the mean: {v}");
    }
    let n = 12;
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..5.0)).collect();
    let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
    for trial in 0..1000 {
        let y: Vec<f64> = mu.iter().map(|m| m + rng.random_range(-20.0..20.0)).collect();
        let v = info_coll(&w, &y, &mu, None).map_err(|e| e.to_string())?;
        ensure!(v > 0.0 && v < 1.0, "trial {trial}: {v} not strictly inside (0, 1)");
        let i = rng.random_range(0..n);
        let mut up = y.clone();
        up[i] += rng.random_range(0.001..10.0);
        let v2 = info_coll(&w, &up, &mu, None).map_err(|e| e.to_string())?;
        ensure!(v2 >= v, "trial {trial}: raising feature {i} lowered {v} -> {v2}");
    }
    Ok("0.5 at the mean, monotone over 1000 perturbations, strictly inside (0, 1)".into())
}

// -------------------------------------------------------------- stats

fn u_pairs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().flat_map(|x| b.iter().map(move |y| if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 })).sum()
}

fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let half = (a.len() * b.len()) as f64 / 2.0;
    let observed = (u_pairs(a, b) - half).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << pooled.len()) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (x, y): (Vec<(usize, f64)>, Vec<(usize, f64)>) = pooled.iter().copied().enumerate().partition(|(i, _)| mask >> i & 1 == 1);
        let x: Vec<f64> = x.into_iter().map(|p| p.1).collect();
        let y: Vec<f64> = y.into_iter().map(|p| p.1).collect();
        total += 1;
        hits += u64::from((u_pairs(&x, &y) - half).abs() >= observed - 1e-9);
    }
    hits as f64 / total as f64
}

fn stats_kernel() -> Check {
    let same: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 4.0, 5.0, 3.0].iter().map(|&x| vec![x, x, x]).collect();
    let a = cronbach_alpha(&same, 0.95).map_err(|e| e.to_string())?;
    ensure!((a.alpha - 1.0).abs() < 1e-12, "alpha {}", a.alpha);

    let table = |rows: &[[u32; 2]]| RatingTable::new(vec!["x".into(), "y".into()], rows.iter().map(|r| r.to_vec()).collect()).unwrap();
    let perfect = fleiss_kappa(&table(&[[3, 0], [0, 3], [3, 0]])).map_err(|e| e.to_string())?;
    ensure!(perfect == Some(1.0), "perfect agreement kappa {perfect:?}");
    // agreement 1, 1, 1/3, 1/3 (mean 2/3); chance 1/2
    let k = fleiss_kappa(&table(&[[3, 0], [0, 3], [2, 1], [1, 2]])).map_err(|e| e.to_string())?.unwrap();
    ensure!((k - 1.0 / 3.0).abs() < 1e-9, "3-rater kappa {k}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let a: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(0..6) as f64).collect();
        let b: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(0..6) as f64).collect();
        let r = mann_whitney(&a, &b).map_err(|e| e.to_string())?;
        let e = enumerate_p(&a, &b);
        ensure!((r.p_value - e).abs() < 1e-12, "{a:?} vs {b:?}: {} vs {e}", r.p_value);
    }

    let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = (0..3000)
        .map(|_| {
            let f: Vec<f64> = (0..3).map(|_| rng.sample(normal)).collect();
            (0..12).map(|i| 0.8 * f[i / 4] + 0.6 * rng.sample(normal)).collect()
        })
        .collect();
    let p = pca(&rows, 3, Rotation::Varimax).map_err(|e| e.to_string())?;
    let trace: f64 = p.eigenvalues.iter().sum();
    ensure!((trace - 12.0).abs() < 1e-9, "eigenvalue sum {trace}");
    let mut worst: f64 = 0.0;
    for f in 0..3 {
        let col: Vec<f64> = p.loadings.iter().map(|r| r[f]).collect();
        let top = (0..12).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs())).unwrap();
        let sign = col[top].signum();
        for (i, l) in col.iter().enumerate() {
            let truth = if i / 4 == top / 4 { 0.8 } else { 0.0 };
            worst = worst.max((sign * l - truth).abs());
        }
    }
    ensure!(worst <= 0.1, "loading error {worst}");
    Ok(format!("alpha 1, kappa 1 and 1/3, exact p over 200 samples, trace 12, loading error {worst:.3}"))
}

// ---------------------------------------------------- rank invariance

fn random_cohort(rng: &mut ChaCha8Rng, mpl_kind: bool) -> Vec<TraceSequence> {
    const DELTAS: [&str; 6] = ["increase", "decrease", "unchanged", "increase_unchanged", "decrease_unchanged", "decrease_increase"];
    let n = rng.random_range(2..15);
    (0..n)
        .map(|i| {
            if mpl_kind {
                let states = (0..5)
                    .map(|_| {
                        let (t, o) = (DELTAS[rng.random_range(0..6)], DELTAS[rng.random_range(0..6)]);
                        format!("target: {t}, non-target: {o}").parse().unwrap()
                    })
                    .collect();
                TraceSequence::mpl(format!("m{i}"), states)
            } else {
                let pool = ["relevant_cue", "irrelevant_cue", "failed_once", "failed_many_times", "navigation", "no_relevant", "solved_glyph", "solved_safe"];
                let mut s: Vec<DaedalusState> = (0..rng.random_range(0..8)).map(|_| pool[rng.random_range(0..pool.len())].parse().unwrap()).collect();
                if s.is_empty() {
                    s.push(DaedalusState::GaveUpWithoutTrying);
                } else if rng.random_bool(0.4) {
                    let k = s.iter().filter(|x| matches!(x, DaedalusState::Solved(_))).count() as u32;
                    s.push(DaedalusState::GaveUp(k));
                }
                TraceSequence::daedalus(format!("d{i}"), s)
            }
        })
        .collect()
}

fn rank_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let puzzles = vec!["glyph".to_string(), "safe".to_string()];
    for c in 0..100 {
        let mpl_kind = c % 2 == 0;
        let cohort = random_cohort(&mut rng, mpl_kind);
        let (cfg, ideal) = if mpl_kind {
            (DistanceConfig::mpl(), IdealTrace::mpl_default())
        } else {
            (DistanceConfig::daedalus(), IdealTrace::daedalus_default(&puzzles))
        };
        let base = ranking(&adaptation_scores(&cohort, &ideal, &cfg, &BandCuts::Quartiles).map_err(|e| e.to_string())?);
        for _ in 0..10 {
            let k = 10f64.powf(rng.random_range(-3.0..3.0));
            let scaled = adaptation_scores(&cohort, &ideal, &cfg.scaled(k), &BandCuts::Quartiles).map_err(|e| e.to_string())?;
            ensure!(ranking(&scaled) == base, "cohort {c}, factor {k}");
        }
    }
    Ok("argsort unchanged over 100 cohorts x 10 factors".into())
}

// -------------------------------------------------------- determinism

fn pipeline_config(data: &Path, out: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.seed = Some(42);
    cfg.metric = MetricKind::Daedalus;
    cfg.paths.log = Some(data.join("events.jsonl"));
    cfg.paths.catalog = Some(data.join("catalog.toml"));
    cfg.paths.completion = Some(data.join("completion.csv"));
    cfg.paths.performance = Some(data.join("performance.csv"));
    cfg.paths.out = out.to_path_buf();
    cfg.bsas.classes = 3;
    cfg.bsas.folds = 3;
    cfg.bsas.n_trees = vec![30];
    cfg.bsas.max_depth = vec![0, 3];
    cfg.bsas.min_samples_leaf = vec![1];
    cfg.bsas.baseline_draws = 5_000;
    cfg
}

fn artifacts(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                if p.file_name().is_some_and(|n| n != "manifests") {
                    stack.push(p);
                }
            } else if p.extension().is_some_and(|x| x == "csv" || x == "json") {
                out.insert(p.strip_prefix(root).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn byte_identical_runs() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    let cohort = simulate(&SynthSpec { teams: 24, seed: 42, ..Default::default() }).map_err(|e| e.to_string())?;
    std::fs::write(data.join("events.jsonl"), to_jsonl(&cohort.events)).unwrap();
    std::fs::write(data.join("catalog.toml"), cohort.catalog.to_toml_string()).unwrap();
    std::fs::write(data.join("completion.csv"), completion_csv(&cohort.completion)).unwrap();
    let perf: String = std::iter::once("team_id,performance".to_string())
        .chain(cohort.completion.iter().map(|c| format!("{},{}", c.team_id, -c.raw_hours)))
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(data.join("performance.csv"), perf + "\n").unwrap();

    let (a, b) = (tmp.path().join("run_a"), tmp.path().join("run_b"));
    for out in [&a, &b] {
        commands::pipeline(&pipeline_config(&data, out)).map_err(|e| e.to_string())?;
    }
    let (fa, fb) = (artifacts(&a), artifacts(&b));
    ensure!(fa.keys().eq(fb.keys()), "different artifact sets");
    for (name, bytes) in &fa {
        ensure!(&fb[name] == bytes, "{name} differs between runs");
    }
    for needed in ["scores.csv", "distances.csv", "layout.json", "bsas_report.json", "info_coll.csv", "individual_scores.csv"] {
        ensure!(fa.contains_key(needed), "{needed} not produced");
    }
    Ok(format!("{} artifacts byte-identical", fa.len()))
}

// ---------------------------------------------------------------- MDS

fn mds_round_trip() -> Check {
    let tri = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
    let e = mds_embed(&tri, 2).map_err(|e| e.to_string())?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    for i in 0..3 {
        for j in 0..3 {
            ensure!((dist(&e.coords[i], &e.coords[j]) - tri[i][j]).abs() < 1e-6, "triangle edge {i}-{j}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..30);
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0)]).collect();
        let d: Vec<Vec<f64>> = pts.iter().map(|p| pts.iter().map(|q| dist(p, q)).collect()).collect();
        let e = mds_embed(&d, 2).map_err(|e| e.to_string())?;
        worst = worst.max(e.stress);
    }
    ensure!(worst < 1e-9, "stress {worst}");
    Ok(format!("triangle preserved, worst planar stress {worst:.2e} over 200 sets"))
}

fn main() {
    let checks: [(&str, fn() -> Check); 11] = [
        ("MPL reference sequences", mpl_reference_distances),
        ("failure-to-adapt sequences rank low", failure_to_adapt_ranks_low),
        ("Daedalus penalties in isolation", penalty_isolation),
        ("abstraction boundaries", abstraction_fixtures),
        ("performance formulas", performance_formulas),
        ("situation-assessment classifier", bsas_synthetic),
        ("information collection score", info_coll_properties),
        ("statistics kernel", stats_kernel),
        ("ranking under weight scaling", rank_invariance),
        ("determinism", byte_identical_runs),
        ("MDS embedding", mds_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {:>2} {name}: panicked", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
