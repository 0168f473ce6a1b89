//! Acceptance suite: one PASS, FAIL or SKIP line per criterion.
//!
//! Failures are reported but do not fail `cargo test` unless
//! `MGPLL_ACCEPTANCE_STRICT=1` is set. `MGPLL_LOST_PATH` points criterion 7
//! at a Lost dataset in PlCsv format with true labels.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mgpll_cli::format::{read_dataset, write_dataset, DatasetFormat};
use mgpll_core::baseline::Weighting;
use mgpll_core::eval::{cross_validate, paired_t_test, CvConfig, Method, Metric, Verdict};
use mgpll_core::mgpll::gradcheck::{check_all, CheckBatch, Term};
use mgpll_core::mgpll::{
    augment, denoise, CandidateLabelVector, Draws, MgpllConfig, MgpllModel, PriorSampler,
};
use mgpll_core::numkit::{Matrix, RmsProp};
use mgpll_core::pldata::{
    coupling_map, gaussian_blobs, normalize_features, synthesize, BlobConfig, Coupling, PlDataset,
    SynthConfig,
};
use mgpll_core::rng::{rng_for, stream};
use mgpll_core::train::{
    train, train_with, training_accuracy, AblationVariant, Observer, TrainConfig,
};
use mgpll_core::Result;
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// 1. gradient fidelity

fn gradient_fidelity() -> Outcome {
    let mut worst = 0.0f64;
    let mut checks = 0;
    let mut terms = std::collections::BTreeSet::new();
    // seeds keep every leaky-relu pre-activation away from its kink
    for (seed, conditioned) in [(1u64, true), (2, true), (4, false), (5, false)] {
        let cfg = MgpllConfig {
            gen_width: 4,
            critic_width: 4,
            noise_dim: 3,
            label_conditioned_noise: conditioned,
            ..Default::default()
        };
        let model = MgpllModel::new(3, 2, cfg, &mut rng_for(seed, stream::INIT)).unwrap();
        let mut rng = rng_for(seed, 40);
        let x =
            Matrix::from_vec(4, 3, (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let mut y = Matrix::zeros(4, 2);
        for i in 0..4 {
            y[(i, i % 2)] = 1.0;
            if i % 2 == 0 {
                y[(i, (i + 1) % 2)] = 1.0;
            }
        }
        let mut sampler = PriorSampler::new(3, 2, seed, 41);
        let Draws { z, eps, eps_bar } = Draws::sample(&mut sampler, 4);
        let batch = CheckBatch {
            x,
            y,
            z,
            eps,
            eps_bar,
        };
        for r in check_all(&model, &batch, 1e-5, 1e-6).unwrap() {
            worst = worst.max(r.max_rel_err);
            checks += r.params;
            terms.insert(r.term.name());
        }
    }
    verdict(
        worst < 1e-4 && terms.len() == Term::ALL.len(),
        format!(
            "max relative error {worst:.2e} over {checks} parameter checks, {} terms (< 1e-4)",
            terms.len()
        ),
    )
}

// 2. label algebra

fn label_algebra() -> Outcome {
    let mut rng = rng_for(2024, 60);
    let mut violations = 0;
    let trials = 10_000;
    for _ in 0..trials {
        let l = rng.gen_range(1..12);
        let y =
            CandidateLabelVector::new((0..l).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap();
        let n =
            CandidateLabelVector::new((0..l).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap();
        let d = denoise(&y, &n).unwrap();
        let a = augment(&y, &n).unwrap();
        for j in 0..l {
            let (dv, av, yv, nv) = (d.values()[j], a.values()[j], y.values()[j], n.values()[j]);
            if !(0.0..=1.0).contains(&dv)
                || !(0.0..=1.0).contains(&av)
                || dv > yv
                || av < yv
                || av < nv
            {
                violations += 1;
            }
        }
        // one-hot z and noise disjoint from it
        let hot = rng.gen_range(0..l);
        let z = CandidateLabelVector::one_hot(l, hot);
        let noise = CandidateLabelVector::new(
            (0..l)
                .map(|j| {
                    if j == hot {
                        0.0
                    } else {
                        f64::from(rng.gen_bool(0.5) as u8)
                    }
                })
                .collect(),
        )
        .unwrap();
        if denoise(&augment(&z, &noise).unwrap(), &noise).unwrap() != z {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations in {trials} trials"),
    )
}

// 3. synthesis statistics

fn clean_three_class(n: usize) -> PlDataset {
    let mut rng = rng_for(11, 61);
    let f = Matrix::from_vec(n, 2, (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    PlDataset::supervised("clean", f, (0..n).map(|i| i % 3).collect(), 3).unwrap()
}

fn synthesis_statistics() -> Outcome {
    let clean = clean_three_class(2000);
    let ds = synthesize(&clean, &SynthConfig::random(0.5, 2, 1)).unwrap();
    let sizes: Vec<usize> = (0..ds.len()).map(|i| ds.candidate_set(i).len()).collect();
    let three = sizes.iter().filter(|&&s| s == 3).count();
    let one = sizes.iter().filter(|&&s| s == 1).count();
    let a_ok = three == 1000 && one == 1000;

    let truth = clean.true_labels().unwrap();
    let sd = (0.7f64 * 0.3 / 2000.0).sqrt();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let ds = synthesize(&clean, &SynthConfig::coupled(0.7, seed)).unwrap();
        let map = coupling_map(3, Coupling::Successor, seed);
        let hits = (0..ds.len())
            .filter(|&i| ds.candidates()[(i, map[truth[i]])] == 1.0)
            .count();
        let freq = hits as f64 / 2000.0;
        worst = worst.max((freq - 0.7).abs() / sd);
    }
    verdict(
        a_ok && worst <= 3.0,
        format!("p=0.5 r=2: {three} rows with 3 candidates, {one} with 1; coupled ε=0.7 worst deviation {worst:.2} sd over 20 seeds (≤ 3)"),
    )
}

// 4. critic clipping

struct ClipAssert {
    clip: f64,
    worst: f64,
    iterations: usize,
}

impl Observer for ClipAssert {
    fn after_iteration(&mut self, epoch: usize, it: usize, model: &MgpllModel) -> Result<()> {
        let w = model.critics_max_abs();
        assert!(
            w <= self.clip,
            "critic weight {w} > {} after epoch {epoch} iteration {it}",
            self.clip
        );
        self.worst = self.worst.max(w);
        self.iterations += 1;
        Ok(())
    }
}

fn critic_clipping(ecoli: &PlDataset) -> Outcome {
    let ds = normalize_features(ecoli).unwrap().0;
    let mcfg = MgpllConfig {
        gen_width: 16,
        critic_width: 8,
        ..Default::default()
    };
    let cfg = TrainConfig {
        epochs: 50,
        early_stop: None,
        generator_opt: RmsProp::with_lr(1e-3),
        critic_opt: RmsProp::with_lr(1e-3),
        ..Default::default()
    };
    let mut obs = ClipAssert {
        clip: mcfg.clip_c,
        worst: 0.0,
        iterations: 0,
    };
    train_with(&ds, AblationVariant::Full, &cfg, &mcfg, &mut obs).unwrap();
    verdict(
        obs.iterations == 50 * 336usize.div_ceil(32),
        format!(
            "max |critic weight| {:.4} ≤ c = {} after each of {} iterations",
            obs.worst, mcfg.clip_c, obs.iterations
        ),
    )
}

// 5 and 6. learning and ablation ordering

fn separable(n: usize) -> PlDataset {
    let mut rng = rng_for(5, 62);
    let mut f = Vec::new();
    for i in 0..n {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        f.push(sign * rng.gen_range(0.2..1.0));
        f.push(rng.gen_range(-1.0..1.0));
    }
    let ds = PlDataset::supervised(
        "separable",
        Matrix::from_vec(n, 2, f).unwrap(),
        (0..n).map(|i| i % 2).collect(),
        2,
    )
    .unwrap();
    normalize_features(&ds).unwrap().0
}

const SEEDS: [u64; 3] = [0, 1, 2];

fn ecoli_like(seed: u64) -> PlDataset {
    let clean = gaussian_blobs("ecoli-like", &BlobConfig::ecoli_like(seed)).unwrap();
    synthesize(&clean, &SynthConfig::coupled(0.7, seed)).unwrap()
}

fn mgpll_method(variant: AblationVariant) -> Method {
    Method::Mgpll {
        variant,
        train: TrainConfig {
            epochs: 200,
            generator_opt: RmsProp::with_lr(1e-3),
            critic_opt: RmsProp::with_lr(1e-3),
            ..Default::default()
        },
        model: MgpllConfig {
            gen_width: 32,
            critic_width: 16,
            alpha: 0.01,
            beta: 0.01,
            gamma: 0.01,
            ..Default::default()
        },
        select: false,
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

struct Means {
    knn: Vec<f64>,
    full: Vec<f64>,
    cls: Vec<f64>,
}

fn ecoli_means() -> Means {
    let mut m = Means {
        knn: vec![],
        full: vec![],
        cls: vec![],
    };
    for seed in SEEDS {
        let ds = ecoli_like(seed);
        let cv = CvConfig {
            folds: 10,
            seed,
            metric: Metric::Accuracy,
        };
        let knn = Method::PlKnn {
            k: 10,
            weighting: Weighting::InverseDistance,
        };
        m.knn.push(mean(&cross_validate(&ds, &knn, &cv).unwrap()));
        m.full.push(mean(
            &cross_validate(&ds, &mgpll_method(AblationVariant::Full), &cv).unwrap(),
        ));
        m.cls.push(mean(
            &cross_validate(&ds, &mgpll_method(AblationVariant::ClsOnly), &cv).unwrap(),
        ));
    }
    m
}

fn fmt(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join("/")
}

fn desk_scale_learning(m: &Means) -> Outcome {
    let ds = separable(60);
    let (model, log) = train(
        &ds,
        AblationVariant::ClsOnly,
        &TrainConfig::default(),
        &MgpllConfig::default(),
    )
    .unwrap();
    let acc = training_accuracy(&model, &ds).unwrap();
    let wins = m.full.iter().zip(&m.knn).filter(|(f, k)| f > k).count();
    verdict(
        acc >= 0.99 && wins * 2 > SEEDS.len(),
        format!(
            "cls-only training accuracy {acc:.4} after {} epochs (≥ 0.99); ecoli-like 10-fold mean accuracy full {} vs pl-knn {}, full ahead on {wins}/3 seeds (majority)",
            log.records.len(),
            fmt(&m.full),
            fmt(&m.knn)
        ),
    )
}

fn ablation_ordering(m: &Means) -> Outcome {
    let wins = m.full.iter().zip(&m.cls).filter(|(f, c)| f >= c).count();
    verdict(
        wins * 2 > SEEDS.len(),
        format!("ecoli-like mean accuracy full {} vs cls-only {}, full ≥ cls-only on {wins}/3 seeds (majority)", fmt(&m.full), fmt(&m.cls)),
    )
}

// 7. Lost fixture

fn lost_fixture() -> Outcome {
    let Ok(path) = std::env::var("MGPLL_LOST_PATH") else {
        return Outcome::Skip("MGPLL_LOST_PATH not set".into());
    };
    let ds = match read_dataset(Path::new(&path), DatasetFormat::PlCsv) {
        Ok(ds) => ds,
        Err(e) => return Outcome::Fail(format!("cannot load {path}: {e}")),
    };
    let knn = Method::PlKnn {
        k: 10,
        weighting: Weighting::InverseDistance,
    };
    match cross_validate(&ds, &knn, &CvConfig::default()) {
        Ok(s) => {
            let acc = mean(&s);
            verdict(
                (acc - 0.424).abs() <= 0.05,
                format!("pl-knn 10-fold accuracy {acc:.4} (0.424 ± 0.05)"),
            )
        }
        Err(e) => Outcome::Fail(format!("cross-validation failed: {e}")),
    }
}

// 8. CLI determinism

fn run_cli(args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mgpll"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    let clean = gaussian_blobs(
        "small",
        &BlobConfig {
            class_counts: vec![20, 15, 10],
            ..BlobConfig::ecoli_like(3)
        },
    )
    .unwrap();
    write_dataset(Path::new(&p("clean.plcsv")), &clean, DatasetFormat::PlCsv).unwrap();
    let small = [
        "--epochs",
        "5",
        "--gen-width",
        "8",
        "--critic-width",
        "6",
        "--noise-dim",
        "4",
        "--seed",
        "9",
    ];
    let mut outputs = Vec::new();
    for run in 0..2 {
        let tag = |s: &str| p(&format!("{s}{run}"));
        let steps: Vec<Vec<String>> = vec![
            vec![
                "synth",
                "--input",
                &p("clean.plcsv"),
                "--output",
                &tag("pl.plcsv"),
                "--mode",
                "coupled",
                "--epsilon",
                "0.5",
                "--seed",
                "9",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            [
                "train",
                "--data",
                &tag("pl.plcsv"),
                "--checkpoint",
                &tag("ck.json"),
                "--log",
                &tag("log.csv"),
            ]
            .iter()
            .chain(small.iter())
            .map(|s| s.to_string())
            .collect(),
            [
                "eval",
                "--data",
                &tag("pl.plcsv"),
                "--folds",
                "3",
                "--report",
                &tag("report.txt"),
                "--csv",
                &tag("report.csv"),
            ]
            .iter()
            .chain(small.iter())
            .map(|s| s.to_string())
            .collect(),
        ];
        for step in steps {
            let args: Vec<&str> = step.iter().map(|s| s.as_str()).collect();
            if let Err(e) = run_cli(&args) {
                return Outcome::Fail(format!("`mgpll {}` failed: {e}", args[0]));
            }
        }
        let files: Vec<Vec<u8>> = ["pl.plcsv", "ck.json", "log.csv", "report.txt", "report.csv"]
            .iter()
            .map(|f| std::fs::read(tag(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(|f| f.len()).sum();
    verdict(
        same,
        format!("synth, train and eval outputs byte-identical across two runs ({bytes} bytes)"),
    )
}

// 9. t-test oracle

fn t_test_oracle() -> Outcome {
    // Student's sleep data, ten paired differences
    let a = [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4];
    let b = [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0];
    let sig = paired_t_test(&a, &b, 0.05).unwrap();
    let c = [0.82, 0.79, 0.85, 0.80, 0.81, 0.84, 0.78, 0.83, 0.80, 0.82];
    let d = [0.80, 0.81, 0.83, 0.82, 0.80, 0.83, 0.79, 0.81, 0.82, 0.80];
    let tie = paired_t_test(&c, &d, 0.05).unwrap();
    let ok = sig.critical == 2.262157
        && sig.df == 9
        && (sig.t.unwrap() - 4.062127683382037).abs() < 1e-12
        && sig.verdict == Verdict::Win
        && paired_t_test(&b, &a, 0.05).unwrap().verdict == Verdict::Loss
        && (tie.t.unwrap() - 0.5187513759338114).abs() < 1e-12
        && tie.verdict == Verdict::Tie;
    verdict(
        ok,
        format!(
            "df=9 critical {}; sleep data t = {:.6} ({}), small differences t = {:.6} ({})",
            sig.critical,
            sig.t.unwrap(),
            sig.verdict.name(),
            tie.t.unwrap(),
            tie.verdict.name()
        ),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let strict = std::env::var("MGPLL_ACCEPTANCE_STRICT").as_deref() == Ok("1");
    let start = Instant::now();
    let ecoli = ecoli_like(0);
    let means = ecoli_means();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 gradient fidelity", Box::new(gradient_fidelity)),
        ("2 label algebra", Box::new(label_algebra)),
        ("3 synthesis statistics", Box::new(synthesis_statistics)),
        ("4 critic clipping", Box::new(|| critic_clipping(&ecoli))),
        (
            "5 desk-scale learning",
            Box::new(|| desk_scale_learning(&means)),
        ),
        (
            "6 ablation ordering",
            Box::new(|| ablation_ordering(&means)),
        ),
        ("7 lost baseline", Box::new(lost_fixture)),
        ("8 determinism", Box::new(determinism)),
        ("9 t-test oracle", Box::new(t_test_oracle)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Outcome::Pass(d) => println!("PASS {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
            Outcome::Skip(d) => println!("SKIP {name}: {d}"),
        }
    }
    println!(
        "acceptance: {failed} failed ({:.0}s)",
        start.elapsed().as_secs_f64()
    );
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
