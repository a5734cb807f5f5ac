use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use teamtrace_stats::agreement::{fleiss_kappa, RatingTable};
use teamtrace_stats::correlation::pearson;
use teamtrace_stats::pca::{eigenvalues, pca, Rotation};
use teamtrace_stats::rank::{mann_whitney, PMethod};
use teamtrace_stats::reliability::cronbach_alpha;

fn u_of(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided permutation p over every way to split the pooled sample.
fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let half = (a.len() * b.len()) as f64 / 2.0;
    let observed = (u_of(a, b) - half).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (i, v) in pooled.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x.push(*v)
            } else {
                y.push(*v)
            }
        }
        total += 1;
        if (u_of(&x, &y) - half).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn exact_p_fixtures() {
    let cases: [(&[f64], &[f64]); 3] = [
        (&[1.1, 2.4, 3.0, 3.0], &[2.0, 3.0, 5.5, 6.1, 7.0]),
        (&[4.0, 4.0, 4.0], &[4.0, 4.0, 5.0]),
        (&[9.0, 1.0, 7.0, 3.0, 2.0, 8.0], &[5.0, 6.0, 10.0, 11.0]),
    ];
    for (a, b) in cases {
        let r = mann_whitney(a, b).unwrap();
        assert_eq!(r.method, PMethod::Exact);
        assert!((r.p_value - enumerate_p(a, b)).abs() < 1e-12);
    }
}

#[test]
fn independent_items_have_alpha_near_zero() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> =
            (0..2000).map(|_| vec![rng.random_range(1..=5) as f64, rng.random_range(1..=5) as f64]).collect();
        let a = cronbach_alpha(&rows, 0.95).unwrap();
        assert!(a.alpha.abs() <= 0.15, "seed {seed}: {}", a.alpha);
        assert!(a.ci_low <= a.alpha && a.alpha <= a.ci_high);
    }
}

#[test]
fn independent_variables_have_small_r() {
    let mut small = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..1000).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..1000).map(|_| rng.random()).collect();
        small += usize::from(pearson(&x, &y).unwrap().r.abs() < 0.1);
    }
    assert!(small >= 95, "{small}/100");
}

#[test]
fn uncorrelated_items_have_unit_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = Normal::new(0.0, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = (0..20_000).map(|_| (0..5).map(|_| z.sample(&mut rng)).collect()).collect();
    for e in eigenvalues(&rows).unwrap() {
        assert!((e - 1.0).abs() < 0.05, "{e}");
    }
}

#[test]
fn three_factor_structure_is_recovered() {
    const PER: usize = 4;
    const LOADING: f64 = 0.8;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = Normal::new(0.0, 1.0).unwrap();
    let unique = (1.0 - LOADING * LOADING).sqrt();
    let rows: Vec<Vec<f64>> = (0..3000)
        .map(|_| {
            let f: Vec<f64> = (0..3).map(|_| z.sample(&mut rng)).collect();
            (0..3 * PER).map(|i| LOADING * f[i / PER] + unique * z.sample(&mut rng)).collect()
        })
        .collect();
    let p = pca(&rows, 3, Rotation::Varimax).unwrap();
    assert!((p.eigenvalues.iter().sum::<f64>() - 12.0).abs() < 1e-9);
    let kmo = p.kmo.as_ref().unwrap();
    assert!(kmo.overall > 0.7);
    assert!(p.bartlett.as_ref().unwrap().p_value < 1e-10);

    // match recovered factors to generating blocks by their heaviest item
    let mut used = [false; 3];
    for f in 0..3 {
        let col: Vec<f64> = p.loadings.iter().map(|r| r[f]).collect();
        let top = (0..col.len()).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs())).unwrap();
        let block = top / PER;
        assert!(!used[block], "two factors matched block {block}");
        used[block] = true;
        let sign = col[top].signum();
        for (i, l) in col.iter().enumerate() {
            let truth = if i / PER == block { LOADING } else { 0.0 };
            assert!((sign * l - truth).abs() < 0.1, "factor {f} item {i}: {l}");
        }
    }
    assert!(p.flags.iter().all(|f| !f.low_loading && !f.low_communality));
}

fn likert_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..6).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(1u8..=5, k), 4..30))
        .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect())
}

fn rating_tables() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (2usize..6, 2usize..5).prop_flat_map(|(raters, cats)| {
        (Just(cats), prop::collection::vec(prop::collection::vec(0..cats, raters), 1..12))
    })
}

fn table(cats: usize, labels: &[Vec<usize>], relabel: &[usize]) -> RatingTable {
    let counts = labels
        .iter()
        .map(|item| {
            let mut row = vec![0u32; cats];
            for &l in item {
                row[relabel[l]] += 1;
            }
            row
        })
        .collect();
    RatingTable::new((0..cats).map(|c| c.to_string()).collect(), counts).unwrap()
}

proptest! {
    #[test]
    fn exact_p_matches_enumeration(
        a in prop::collection::vec(0u8..6, 1..8),
        b in prop::collection::vec(0u8..6, 1..8),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let r = mann_whitney(&a, &b).unwrap();
        prop_assert!((r.p_value - enumerate_p(&a, &b)).abs() < 1e-12);
        prop_assert!((r.u - u_of(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn u_statistics_partition_pairs(
        a in prop::collection::vec(-50i32..50, 1..40),
        b in prop::collection::vec(-50i32..50, 1..40),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let r = mann_whitney(&a, &b).unwrap();
        prop_assert_eq!(r.u + r.u_other, (a.len() * b.len()) as f64);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        let swapped = mann_whitney(&b, &a).unwrap();
        prop_assert_eq!(swapped.u, r.u_other);
    }

    #[test]
    fn alpha_ignores_item_shifts(rows in likert_rows(), item in any::<prop::sample::Index>(), shift in -10.0f64..10.0) {
        let Ok(base) = cronbach_alpha(&rows, 0.95) else { return Ok(()) };
        let j = item.index(rows[0].len());
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| { let mut r = r.clone(); r[j] += shift; r }).collect();
        let moved = cronbach_alpha(&shifted, 0.95).unwrap();
        prop_assert!((base.alpha - moved.alpha).abs() < 1e-9);
    }

    #[test]
    fn kappa_matches_rater_pairs_and_ignores_labels(
        (cats, labels) in rating_tables(),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let identity: Vec<usize> = (0..cats).collect();
        let t = table(cats, &labels, &identity);
        let Some(k) = fleiss_kappa(&t).unwrap() else { return Ok(()) };
        let mut perm = identity.clone();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let relabelled = fleiss_kappa(&table(cats, &labels, &perm)).unwrap().unwrap();
        prop_assert!((k - relabelled).abs() < 1e-9);

        // agreement as the share of agreeing ordered rater pairs
        let n = labels[0].len();
        let observed = labels.iter().map(|item| {
            let mut agree = 0;
            for i in 0..n { for j in 0..n { if i != j && item[i] == item[j] { agree += 1; } } }
            agree as f64 / (n * (n - 1)) as f64
        }).sum::<f64>() / labels.len() as f64;
        let all: Vec<usize> = labels.iter().flatten().copied().collect();
        let chance: f64 = (0..cats).map(|c| {
            let p = all.iter().filter(|&&l| l == c).count() as f64 / all.len() as f64;
            p * p
        }).sum();
        prop_assert!((k - (observed - chance) / (1.0 - chance)).abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_preserve_trace(rows in likert_rows()) {
        if let Ok(ev) = eigenvalues(&rows) {
            prop_assert!((ev.iter().sum::<f64>() - rows[0].len() as f64).abs() < 1e-9);
            prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn pearson_p_in_unit_interval(
        xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..50),
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let Ok(p) = pearson(&x, &y) {
            prop_assert!((0.0..=1.0).contains(&p.p_value));
            prop_assert!((-1.0..=1.0).contains(&p.r));
        }
    }
}
