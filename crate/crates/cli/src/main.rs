use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mgpll_cli::checkpoint::Checkpoint;
use mgpll_cli::config::ConfigFile;
use mgpll_cli::error::{CliError, Result};
use mgpll_cli::experiment::{run_experiment, run_sweep};
use mgpll_cli::format::{read_dataset, write_dataset, DatasetFormat};
use mgpll_cli::hash::content_hash;
use mgpll_cli::report::{render_csv, render_sweep_csv, render_text};
use mgpll_cli::trainlog::render_train_log;
use mgpll_core::baseline::{Weighting, DEFAULT_K};
use mgpll_core::eval::{CvConfig, ExperimentReport, Method, Metric};
use mgpll_core::mgpll::MgpllConfig;
use mgpll_core::numkit::RmsProp;
use mgpll_core::pldata::{
    gaussian_blobs, normalize_features, synthesize, BlobConfig, Coupling, NoiseMode, PlDataset,
    SynthConfig,
};
use mgpll_core::train::{
    select_hyperparameters, train_with, training_accuracy, AblationVariant, EarlyStop, LabelPrior,
    Observer, SearchStrategy, TrainConfig,
};

#[derive(Parser)]
#[command(name = "mgpll", version, about = "Partial-label learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corrupt a clean dataset into a partial-label dataset.
    Synth(SynthArgs),
    /// Train one model on a whole dataset and save a checkpoint.
    Train(TrainArgs),
    /// Cross-validate one or more methods and write a report.
    Eval(EvalArgs),
    /// Cross-validate every ablation variant.
    Ablate(AblateArgs),
    /// Cross-validate methods across coupled-noise levels.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    EcoliLike,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    /// Clean dataset with true labels.
    #[arg(
        long,
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    input: Option<PathBuf>,
    /// Generate the clean dataset instead of reading one.
    #[arg(long, value_enum)]
    generate: Option<Generator>,
    #[arg(long)]
    output: PathBuf,
    /// random or coupled.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// successor or derangement.
    #[arg(long)]
    coupling: Option<String>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Generator-side learning rate.
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    critic_learning_rate: Option<f64>,
    #[arg(long)]
    critic_steps: Option<usize>,
    #[arg(long)]
    gen_width: Option<usize>,
    #[arg(long)]
    critic_width: Option<usize>,
    #[arg(long)]
    noise_dim: Option<usize>,
    #[arg(long)]
    clip: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Choose alpha, beta, gamma from the grid on each training split.
    #[arg(long)]
    select: Option<bool>,
    /// Comma-separated candidate values for alpha, beta, gamma.
    #[arg(long)]
    grid: Option<String>,
    /// coordinate or full.
    #[arg(long)]
    search: Option<String>,
    #[arg(long)]
    early_stop: Option<bool>,
    /// uniform or empirical.
    #[arg(long)]
    label_prior: Option<String>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    folds: Option<usize>,
    /// accuracy, or maeN for age within N years.
    #[arg(long)]
    metric: Option<String>,
    /// PL-KNN neighbors.
    #[arg(long)]
    k: Option<usize>,
    /// Text report path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-fold CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    log: Option<PathBuf>,
    /// Add a wall-clock column to the log (makes it nondeterministic).
    #[arg(long)]
    wall_time: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated: mgpll, mgpll-<variant>, pl-knn, pl-knn-uniform,
    /// constant-<class>. The first is the reference.
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    cv: CvArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    cv: CvArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Clean dataset with true labels.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated coupled-label probabilities.
    #[arg(long)]
    epsilons: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    cv: CvArgs,
    #[command(flatten)]
    model: ModelArgs,
}

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "mode",
    "p",
    "r",
    "epsilon",
    "coupling",
    "variant",
    "epochs",
    "batch-size",
    "learning-rate",
    "critic-learning-rate",
    "critic-steps",
    "gen-width",
    "critic-width",
    "noise-dim",
    "clip",
    "alpha",
    "beta",
    "gamma",
    "select",
    "grid",
    "search",
    "early-stop",
    "label-prior",
    "folds",
    "metric",
    "k",
    "methods",
    "epsilons",
];

/// Flag, else config file, else default.
struct Resolver {
    file: ConfigFile,
}

impl Resolver {
    fn new(common: &Common) -> Result<Self> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        file.check_keys(KNOWN_KEYS)?;
        Ok(Resolver { file })
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.file.get(key)?.unwrap_or(default)),
        }
    }

    fn string(&self, flag: &Option<String>, key: &str, default: &str) -> String {
        flag.clone()
            .or_else(|| self.file.get_str(key).map(String::from))
            .unwrap_or_else(|| default.to_string())
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad {what} value {:?}", t.trim())))
        })
        .collect()
}

fn parse_variant(s: &str) -> Result<AblationVariant> {
    AblationVariant::parse(s).ok_or_else(|| CliError::Config(format!("unknown variant {s:?}")))
}

fn model_configs(
    res: &Resolver,
    a: &ModelArgs,
    seed: u64,
) -> Result<(TrainConfig, MgpllConfig, bool)> {
    let d = TrainConfig::default();
    let md = MgpllConfig::default();
    let lr = res.get(a.learning_rate, "learning-rate", d.generator_opt.lr)?;
    let search = match res.string(&a.search, "search", "coordinate").as_str() {
        "coordinate" => SearchStrategy::CoordinateDescent,
        "full" => SearchStrategy::FullGrid,
        other => return Err(CliError::Config(format!("unknown search {other:?}"))),
    };
    let label_prior = match res
        .string(&a.label_prior, "label-prior", "empirical")
        .as_str()
    {
        "empirical" => LabelPrior::Empirical,
        "uniform" => LabelPrior::Uniform,
        other => return Err(CliError::Config(format!("unknown label prior {other:?}"))),
    };
    let grid = match a
        .grid
        .clone()
        .or_else(|| res.file.get_str("grid").map(String::from))
    {
        Some(g) => parse_list(&g, "grid")?,
        None => d.grid.clone(),
    };
    let tcfg = TrainConfig {
        batch_size: res.get(a.batch_size, "batch-size", d.batch_size)?,
        epochs: res.get(a.epochs, "epochs", d.epochs)?,
        generator_opt: RmsProp::with_lr(lr),
        critic_opt: RmsProp::with_lr(res.get(
            a.critic_learning_rate,
            "critic-learning-rate",
            d.critic_opt.lr,
        )?),
        critic_steps: res.get(a.critic_steps, "critic-steps", d.critic_steps)?,
        grid,
        search,
        early_stop: if res.get(a.early_stop, "early-stop", true)? {
            Some(EarlyStop::default())
        } else {
            None
        },
        label_prior,
        seed,
    };
    let mcfg = MgpllConfig {
        alpha: res.get(a.alpha, "alpha", md.alpha)?,
        beta: res.get(a.beta, "beta", md.beta)?,
        gamma: res.get(a.gamma, "gamma", md.gamma)?,
        clip_c: res.get(a.clip, "clip", md.clip_c)?,
        noise_dim: res.get(a.noise_dim, "noise-dim", md.noise_dim)?,
        gen_width: res.get(a.gen_width, "gen-width", md.gen_width)?,
        critic_width: res.get(a.critic_width, "critic-width", md.critic_width)?,
        ..md
    };
    tcfg.validate()?;
    mcfg.validate()?;
    let select = res.get(a.select, "select", false)?;
    Ok((tcfg, mcfg, select))
}

fn parse_methods(
    spec: &str,
    k: usize,
    tcfg: &TrainConfig,
    mcfg: &MgpllConfig,
    select: bool,
) -> Result<Vec<Method>> {
    spec.split(',')
        .map(|s| {
            let s = s.trim();
            let mgpll = |variant| Method::Mgpll {
                variant,
                train: tcfg.clone(),
                model: mcfg.clone(),
                select,
            };
            if s == "mgpll" {
                Ok(mgpll(AblationVariant::Full))
            } else if let Some(v) = s.strip_prefix("mgpll-") {
                Ok(mgpll(parse_variant(v)?))
            } else if s == "pl-knn" {
                Ok(Method::PlKnn {
                    k,
                    weighting: Weighting::InverseDistance,
                })
            } else if s == "pl-knn-uniform" {
                Ok(Method::PlKnn {
                    k,
                    weighting: Weighting::Uniform,
                })
            } else if let Some(c) = s.strip_prefix("constant-") {
                c.parse()
                    .map(Method::Constant)
                    .map_err(|_| CliError::Config(format!("bad constant class {c:?}")))
            } else {
                Err(CliError::Config(format!("unknown method {s:?}")))
            }
        })
        .collect()
}

fn cv_config(res: &Resolver, a: &CvArgs, seed: u64) -> Result<CvConfig> {
    let metric = res.string(&a.metric, "metric", "accuracy");
    Ok(CvConfig {
        folds: res.get(a.folds, "folds", 10)?,
        seed,
        metric: Metric::parse(&metric)
            .ok_or_else(|| CliError::Config(format!("unknown metric {metric:?}")))?,
    })
}

fn load(path: &Path) -> Result<(PlDataset, String)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok((
        read_dataset(path, DatasetFormat::from_path(path))?,
        content_hash(&bytes),
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn describe(tcfg: &TrainConfig, mcfg: &MgpllConfig, select: bool) -> String {
    format!(
        "epochs={} batch={} lr={} critic_lr={} critic_steps={} gen_width={} critic_width={} noise_dim={} clip={} alpha={} beta={} gamma={} select={} early_stop={} prior={:?}",
        tcfg.epochs,
        tcfg.batch_size,
        tcfg.generator_opt.lr,
        tcfg.critic_opt.lr,
        tcfg.critic_steps,
        mcfg.gen_width,
        mcfg.critic_width,
        mcfg.noise_dim,
        mcfg.clip_c,
        mcfg.alpha,
        mcfg.beta,
        mcfg.gamma,
        select,
        tcfg.early_stop.is_some(),
        tcfg.label_prior,
    )
}

fn emit_report(report: &ExperimentReport, cv: &CvArgs) -> Result<()> {
    let text = render_text(report);
    match &cv.report {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &cv.csv {
        write_text(p, &render_csv(report)?)?;
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let res = Resolver::new(&a.common)?;
    let seed = res.get(a.common.seed, "seed", 0)?;
    println!("seed: {seed}");
    let clean = match (&a.input, a.generate) {
        (Some(p), _) => load(p)?.0,
        (None, Some(Generator::EcoliLike)) => {
            gaussian_blobs("ecoli-like", &BlobConfig::ecoli_like(seed))?
        }
        (None, None) => unreachable!("clap requires one of --input/--generate"),
    };
    let coupling = match res.string(&a.coupling, "coupling", "successor").as_str() {
        "successor" => Coupling::Successor,
        "derangement" => Coupling::Derangement,
        other => return Err(CliError::Config(format!("unknown coupling {other:?}"))),
    };
    let cfg = match res.string(&a.mode, "mode", "random").as_str() {
        "random" => SynthConfig {
            coupling,
            ..SynthConfig::random(res.get(a.p, "p", 1.0)?, res.get(a.r, "r", 1)?, seed)
        },
        "coupled" => SynthConfig {
            p: res.get(a.p, "p", 1.0)?,
            r: res.get(a.r, "r", 1)?,
            mode: NoiseMode::Coupled,
            coupling,
            ..SynthConfig::coupled(res.get(a.epsilon, "epsilon", 0.5)?, seed)
        },
        other => return Err(CliError::Config(format!("unknown mode {other:?}"))),
    };
    let ds = synthesize(&clean, &cfg)?;
    write_dataset(&a.output, &ds, DatasetFormat::from_path(&a.output))?;
    println!(
        "wrote {} instances, mean candidate-set size {:.4}",
        ds.len(),
        ds.mean_candidate_size()
    );
    Ok(())
}

struct Clock(std::time::Instant);

impl Observer for Clock {
    fn now_secs(&mut self) -> Option<f64> {
        Some(self.0.elapsed().as_secs_f64())
    }
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let res = Resolver::new(&a.common)?;
    let seed = res.get(a.common.seed, "seed", 0)?;
    println!("seed: {seed}");
    let (tcfg, mut mcfg, select) = model_configs(&res, &a.model, seed)?;
    let variant = parse_variant(&res.string(&a.variant, "variant", "full"))?;
    let (raw, _) = load(&a.data)?;
    let (ds, normalizer) = normalize_features(&raw)?;
    if select {
        let s = select_hyperparameters(&ds, variant, &tcfg, &mcfg)?;
        mcfg.alpha = s.alpha;
        mcfg.beta = s.beta;
        mcfg.gamma = s.gamma;
        println!(
            "selected alpha={} beta={} gamma={} ({} trainings)",
            s.alpha,
            s.beta,
            s.gamma,
            s.trainings()
        );
    }
    let (model, log) = if a.wall_time {
        train_with(
            &ds,
            variant,
            &tcfg,
            &mcfg,
            &mut Clock(std::time::Instant::now()),
        )?
    } else {
        train_with(&ds, variant, &tcfg, &mcfg, &mut mgpll_core::train::Silent)?
    };
    if let Some(p) = &a.log {
        write_text(p, &render_train_log(&log, a.wall_time)?)?;
    }
    let acc = if ds.true_labels().is_some() {
        Some(training_accuracy(&model, &ds)?)
    } else {
        None
    };
    Checkpoint::new(
        ds.name(),
        variant,
        tcfg,
        normalizer,
        ds.class_names().to_vec(),
        model,
    )
    .save(&a.checkpoint)?;
    println!(
        "trained {} epochs{}",
        log.records.len(),
        if log.stopped_early {
            " (stopped early)"
        } else {
            ""
        }
    );
    if let Some(acc) = acc {
        println!("training accuracy: {acc:.4}");
    }
    Ok(())
}

fn metadata(report: &mut ExperimentReport, seed: u64, hash: &str, cv: &CvConfig, desc: String) {
    report.metadata.push(("seed".into(), seed.to_string()));
    report
        .metadata
        .push(("input sha256".into(), hash.to_string()));
    report.metadata.push(("folds".into(), cv.folds.to_string()));
    report.metadata.push(("mgpll config".into(), desc));
}

fn eval_cmd(a: EvalArgs) -> Result<()> {
    let res = Resolver::new(&a.common)?;
    let seed = res.get(a.common.seed, "seed", 0)?;
    println!("seed: {seed}");
    let (tcfg, mcfg, select) = model_configs(&res, &a.model, seed)?;
    let cv = cv_config(&res, &a.cv, seed)?;
    let k = res.get(a.cv.k, "k", DEFAULT_K)?;
    let methods = parse_methods(
        &res.string(&a.methods, "methods", "mgpll,pl-knn"),
        k,
        &tcfg,
        &mcfg,
        select,
    )?;
    let (ds, hash) = load(&a.data)?;
    let mut report = run_experiment(&ds, &methods, &cv)?;
    metadata(
        &mut report,
        seed,
        &hash,
        &cv,
        describe(&tcfg, &mcfg, select),
    );
    emit_report(&report, &a.cv)
}

fn ablate_cmd(a: AblateArgs) -> Result<()> {
    let res = Resolver::new(&a.common)?;
    let seed = res.get(a.common.seed, "seed", 0)?;
    println!("seed: {seed}");
    let (tcfg, mcfg, select) = model_configs(&res, &a.model, seed)?;
    let cv = cv_config(&res, &a.cv, seed)?;
    let methods: Vec<Method> = AblationVariant::ALL
        .into_iter()
        .map(|variant| Method::Mgpll {
            variant,
            train: tcfg.clone(),
            model: mcfg.clone(),
            select,
        })
        .collect();
    let (ds, hash) = load(&a.data)?;
    let mut report = run_experiment(&ds, &methods, &cv)?;
    metadata(
        &mut report,
        seed,
        &hash,
        &cv,
        describe(&tcfg, &mcfg, select),
    );
    emit_report(&report, &a.cv)
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    let res = Resolver::new(&a.common)?;
    let seed = res.get(a.common.seed, "seed", 0)?;
    println!("seed: {seed}");
    let (tcfg, mcfg, select) = model_configs(&res, &a.model, seed)?;
    let cv = cv_config(&res, &a.cv, seed)?;
    let k = res.get(a.cv.k, "k", DEFAULT_K)?;
    let methods = parse_methods(
        &res.string(&a.methods, "methods", "mgpll,pl-knn"),
        k,
        &tcfg,
        &mcfg,
        select,
    )?;
    let epsilons = parse_list(
        &res.string(&a.epsilons, "epsilons", "0.1,0.2,0.3,0.4,0.5,0.6,0.7"),
        "epsilon",
    )?;
    let (clean, _) = load(&a.data)?;
    let rows = run_sweep(&clean, &epsilons, seed, &methods, &cv)?;
    write_text(&a.output, &render_sweep_csv(&rows)?)?;
    println!("wrote {} rows", rows.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Ablate(a) => ablate_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error:{}: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
