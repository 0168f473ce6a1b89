use mgpll_core::baseline::{
    plknn_fit, plknn_fit_weighted, plknn_predict, plknn_predict_batch, Weighting,
};
use mgpll_core::eval::{
    accuracy, cross_validate, mae_within, paired_t_test, CvConfig, Method, Metric, Verdict,
};
use mgpll_core::numkit::Matrix;
use mgpll_core::pldata::PlDataset;
use mgpll_core::rng::{rng_for, stream};
use mgpll_core::train::AblationVariant;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

// Student's sleep data: extra hours of sleep under two drugs, ten patients.
const SLEEP_A: [f64; 10] = [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0];
const SLEEP_B: [f64; 10] = [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4];

#[test]
fn sleep_data_is_significant_at_df_9() {
    let r = paired_t_test(&SLEEP_B, &SLEEP_A, 0.05).unwrap();
    assert_eq!(r.df, 9);
    assert_eq!(r.critical, 2.262157);
    assert!((r.t.unwrap() - 4.062127683382037).abs() < 1e-12);
    assert_eq!(r.verdict, Verdict::Win);
    assert_eq!(
        paired_t_test(&SLEEP_A, &SLEEP_B, 0.05).unwrap().verdict,
        Verdict::Loss
    );
}

#[test]
fn small_fold_differences_tie() {
    let a = [0.82, 0.79, 0.85, 0.80, 0.81, 0.84, 0.78, 0.83, 0.80, 0.82];
    let b = [0.80, 0.81, 0.83, 0.82, 0.80, 0.83, 0.79, 0.81, 0.82, 0.80];
    let r = paired_t_test(&a, &b, 0.05).unwrap();
    assert!((r.t.unwrap() - 0.5187513759338114).abs() < 1e-12);
    assert_eq!(r.verdict, Verdict::Tie);
}

#[test]
fn t_test_input_errors() {
    assert!(paired_t_test(&[1.0, 2.0], &[1.0], 0.05).is_err());
    assert!(paired_t_test(&[1.0], &[1.0], 0.05).is_err());
    assert!(paired_t_test(&[1.0, 2.0], &[1.0, 3.0], 0.01).is_err());
}

#[test]
fn mae_counts_strictly_within_the_window() {
    let names: Vec<String> = ["25", "27", "28"].iter().map(|s| s.to_string()).collect();
    assert_eq!(mae_within(&[0], &[1], &names, 3).unwrap(), 1.0);
    assert_eq!(mae_within(&[0], &[2], &names, 3).unwrap(), 0.0);
    let bad: Vec<String> = ["young", "old"].iter().map(|s| s.to_string()).collect();
    assert!(mae_within(&[0], &[1], &bad, 3).is_err());
    assert_eq!(Metric::parse("mae5"), Some(Metric::MaeWithin(5)));
    assert_eq!(Metric::MaeWithin(3).name(), "mae3");
}

#[test]
fn accuracy_examples() {
    assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
    assert_eq!(accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
    assert_eq!(accuracy(&[0, 1, 2, 3], &[0, 1, 2, 0]).unwrap(), 0.75);
    assert!(accuracy(&[], &[]).is_err());
    assert!(accuracy(&[0], &[0, 1]).is_err());
}

/// `n` points, 40% class 0, the rest split over classes 1 and 2, random
/// extra candidates.
fn forty_percent(n: usize, seed: u64) -> PlDataset {
    let mut rng = rng_for(seed, stream::SYNTH);
    let mut labels: Vec<usize> = (0..n)
        .map(|i| if i * 5 < n * 2 { 0 } else { 1 + i % 2 })
        .collect();
    labels.shuffle(&mut rng);
    let mut f = Vec::new();
    let mut c = vec![0.0; n * 3];
    for (i, &t) in labels.iter().enumerate() {
        f.push(t as f64 + rng.gen_range(-0.3..0.3));
        f.push(rng.gen_range(-1.0..1.0));
        c[i * 3 + t] = 1.0;
        if rng.gen_bool(0.5) {
            c[i * 3 + (t + 1) % 3] = 1.0;
        }
    }
    PlDataset::new(
        "forty",
        Matrix::from_vec(n, 2, f).unwrap(),
        Matrix::from_vec(n, 3, c).unwrap(),
        Some(labels),
        None,
    )
    .unwrap()
}

#[test]
fn constant_class_zero_scores_its_frequency() {
    let ds = forty_percent(100, 1);
    let scores = cross_validate(&ds, &Method::Constant(0), &CvConfig::default()).unwrap();
    assert_eq!(scores.len(), 10);
    assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)));
    let mean = scores.iter().sum::<f64>() / 10.0;
    // folds of exactly 10 partition the instances, so the mean is exact
    assert!((mean - 0.40).abs() < 1e-12, "{mean}");
}

#[test]
fn cross_validation_is_seed_deterministic() {
    let ds = forty_percent(40, 2);
    let knn = Method::PlKnn {
        k: 3,
        weighting: Weighting::InverseDistance,
    };
    let cv = CvConfig {
        folds: 4,
        seed: 5,
        metric: Metric::Accuracy,
    };
    assert_eq!(
        cross_validate(&ds, &knn, &cv).unwrap(),
        cross_validate(&ds, &knn, &cv).unwrap()
    );
    let mgpll = Method::Mgpll {
        variant: AblationVariant::Full,
        train: mgpll_core::train::TrainConfig {
            epochs: 2,
            batch_size: 8,
            ..Default::default()
        },
        model: mgpll_core::mgpll::MgpllConfig {
            gen_width: 6,
            critic_width: 4,
            noise_dim: 3,
            ..Default::default()
        },
        select: false,
    };
    let a = cross_validate(&ds, &mgpll, &cv).unwrap();
    assert_eq!(a, cross_validate(&ds, &mgpll, &cv).unwrap());
    assert_eq!(a.len(), 4);
}

#[test]
fn cross_validation_needs_ground_truth() {
    let ds = forty_percent(20, 3);
    let blind = PlDataset::new(
        "blind",
        ds.features().clone(),
        ds.candidates().clone(),
        None,
        None,
    )
    .unwrap();
    assert!(cross_validate(&blind, &Method::Constant(0), &CvConfig::default()).is_err());
}

#[test]
fn knn_follows_clusters() {
    let ds = forty_percent(60, 4);
    let m = plknn_fit(&ds, 5).unwrap();
    assert_eq!(plknn_predict(&m, &[0.0, 0.0]).unwrap(), 0);
    assert_eq!(plknn_predict(&m, &[2.0, 0.0]).unwrap(), 2);
}

fn permuted(ds: &PlDataset, perm: &[usize]) -> PlDataset {
    ds.subset(perm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t_test_mirrors(a in proptest::collection::vec(0.0f64..1.0, 2..15), shift in -0.2f64..0.2, seed: u64) {
        let mut rng = rng_for(seed, 50);
        let b: Vec<f64> = a.iter().map(|v| v + shift + rng.gen_range(-0.05..0.05)).collect();
        let ab = paired_t_test(&a, &b, 0.05).unwrap();
        let ba = paired_t_test(&b, &a, 0.05).unwrap();
        prop_assert_eq!(ab.verdict.mirrored(), ba.verdict);
        prop_assert_eq!(ab.t.map(|t| -t), ba.t);
    }

    #[test]
    fn accuracy_ignores_instance_order(pairs in proptest::collection::vec((0usize..4, 0usize..4), 1..40), seed: u64) {
        let (p, t): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.shuffle(&mut rng_for(seed, 51));
        let p2: Vec<usize> = idx.iter().map(|&i| p[i]).collect();
        let t2: Vec<usize> = idx.iter().map(|&i| t[i]).collect();
        prop_assert_eq!(accuracy(&p, &t).unwrap(), accuracy(&p2, &t2).unwrap());
    }

    #[test]
    fn knn_vote_ignores_storage_order(seed: u64, k in 1usize..8, weighting in prop_oneof![Just(Weighting::InverseDistance), Just(Weighting::Uniform)]) {
        // continuous random features make distance ties have probability zero
        let ds = forty_percent(20, seed);
        let mut idx: Vec<usize> = (0..20).collect();
        idx.shuffle(&mut rng_for(seed, 52));
        let q = Matrix::from_vec(3, 2, vec![0.1, 0.2, 1.1, -0.4, 2.3, 0.9]).unwrap();
        let a = plknn_fit_weighted(&ds, k, weighting).unwrap();
        let b = plknn_fit_weighted(&permuted(&ds, &idx), k, weighting).unwrap();
        prop_assert_eq!(plknn_predict_batch(&a, &q).unwrap(), plknn_predict_batch(&b, &q).unwrap());
        for r in q.iter_rows() {
            let (sa, sb) = (a.scores(r).unwrap(), b.scores(r).unwrap());
            for (x, y) in sa.iter().zip(&sb) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}
