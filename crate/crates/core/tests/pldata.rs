#![allow(clippy::needless_range_loop)]

use mgpll_core::numkit::Matrix;
use mgpll_core::pldata::{
    coupling_map, kfold_split, normalize_features, synthesize, Coupling, PlDataset, SynthConfig,
};
use proptest::prelude::*;

fn clean(n: usize, l: usize) -> PlDataset {
    let labels: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % l).collect();
    let features = Matrix::from_vec(n, 2, (0..2 * n).map(|i| (i % 13) as f64).collect()).unwrap();
    PlDataset::supervised("clean", features, labels, l).unwrap()
}

#[test]
fn random_mode_counts_and_uniform_noise_selection() {
    let (n, l, r) = (1000, 5, 2);
    let base = clean(n, l);
    let truth = base.true_labels().unwrap().to_vec();
    // pair_counts[t][c]: how often c was a false positive on a corrupted row of class t
    let mut pair_counts = vec![vec![0u64; l]; l];
    let mut corrupted_of_class = vec![0u64; l];
    for seed in 0..50 {
        let out = synthesize(&base, &SynthConfig::random(0.5, r, seed)).unwrap();
        let mut corrupted = 0;
        for i in 0..n {
            let set = out.candidate_set(i);
            assert!(set.contains(&truth[i]));
            match set.len() {
                1 => {}
                3 => {
                    corrupted += 1;
                    corrupted_of_class[truth[i]] += 1;
                    for c in set.into_iter().filter(|&c| c != truth[i]) {
                        pair_counts[truth[i]][c] += 1;
                    }
                }
                other => panic!("row with {other} candidates"),
            }
        }
        assert_eq!(corrupted, 500);
        assert_eq!(out.true_labels().unwrap(), &truth[..]);
    }
    let q = r as f64 / (l - 1) as f64;
    for t in 0..l {
        let trials = corrupted_of_class[t] as f64;
        for c in (0..l).filter(|&c| c != t) {
            let expected = trials * q;
            let sd = (trials * q * (1.0 - q)).sqrt();
            let got = pair_counts[t][c] as f64;
            assert!(
                (got - expected).abs() <= 3.0 * sd,
                "class {t} noise {c}: {got} vs {expected}±{sd}"
            );
        }
    }
}

#[test]
fn coupled_mode_frequency_on_segment_sized_data() {
    let (n, l) = (2310, 7);
    let base = clean(n, l);
    let truth = base.true_labels().unwrap();
    let out = synthesize(&base, &SynthConfig::coupled(0.7, 17)).unwrap();
    let map = coupling_map(l, Coupling::Successor, 17);
    let mut hits = 0;
    for i in 0..n {
        let set = out.candidate_set(i);
        assert_eq!(set.len(), 2);
        let noise = set.into_iter().find(|&c| c != truth[i]).unwrap();
        if noise == map[truth[i]] {
            hits += 1;
        }
    }
    let freq = hits as f64 / n as f64;
    let bound = 3.0 * (0.7f64 * 0.3 / n as f64).sqrt();
    assert!((freq - 0.7).abs() <= bound, "{freq}");
}

#[test]
fn synthesis_is_deterministic_per_seed() {
    let base = clean(200, 4);
    let a = synthesize(&base, &SynthConfig::random(0.3, 2, 5)).unwrap();
    let b = synthesize(&base, &SynthConfig::random(0.3, 2, 5)).unwrap();
    let c = synthesize(&base, &SynthConfig::random(0.3, 2, 6)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.candidates(), c.candidates());
}

#[test]
fn uncorrupted_rows_keep_one_candidate() {
    let out = synthesize(&clean(100, 4), &SynthConfig::random(0.0, 1, 1)).unwrap();
    assert!((0..100).all(|i| out.candidate_set(i).len() == 1));
}

proptest! {
    #[test]
    fn normalization_is_idempotent(values in proptest::collection::vec(-1e3f64..1e3, 3..40)) {
        let n = values.len();
        let f = Matrix::from_vec(n, 1, values).unwrap();
        let ds = PlDataset::supervised("p", f, vec![0; n], 1).unwrap();
        let (once, _) = normalize_features(&ds).unwrap();
        let (twice, _) = normalize_features(&once).unwrap();
        prop_assert!(once.is_normalized());
        prop_assert_eq!(once.features(), twice.features());
    }

    #[test]
    fn kfold_balanced_and_complete(n in 2usize..200, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let plan = kfold_split(n, k, seed).unwrap();
        let sizes = plan.fold_sizes();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert_eq!(plan.assignments.len(), n);
    }

    #[test]
    fn synthesis_keeps_true_label(seed in any::<u64>(), p in 0.0f64..=1.0, r in 1usize..4) {
        let base = clean(40, 4);
        let out = synthesize(&base, &SynthConfig::random(p, r, seed)).unwrap();
        let truth = base.true_labels().unwrap();
        for i in 0..40 {
            let size = out.candidate_set(i).len();
            prop_assert!(out.candidates()[(i, truth[i])] == 1.0);
            prop_assert!(size == 1 || size == r + 1);
        }
    }
}
