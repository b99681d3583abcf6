//! Command-line front end for the protocols, generators and campaigns.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ediscovery::cal::{run_cal, CalConfig};
use ediscovery::critical::critical_points_fast;
use ediscovery::datagen::{
    enforce_realizable, format_instance, gaussian_mixture, load_instance, lower_bound_family, save_instance,
    threshold_instance, GaussianConfig, ThresholdInstanceConfig,
};
use ediscovery::harness::figures::{self, summary_csv};
use ediscovery::harness::verify::lower_bound_exhaustive;
use ediscovery::harness::{
    run_figure_campaign, verify_bounds, Campaign, CampaignConfig, ExperimentConfig, Figure, FigureConfig, ResultRow,
};
use ediscovery::highdim::run_highdim_sampling;
use ediscovery::model::optimal_threshold_true;
use ediscovery::rng::rng_from_seed;
use ediscovery::{
    AliceStrategy, Bob, ClassifierReportConfig, Court, Document, GroundTruth, Instance, LabelReportConfig, OneDimInstance,
    Subprotocol,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ediscovery", version, about = "Accountable e-discovery protocols and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

/// Flags shared by every subcommand. Each has a config-file key of the same
/// name.
#[derive(Debug, clap::Args)]
struct Options {
    /// Flat key = value file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true)]
    batch: Option<usize>,
    /// Output file, or directory for `figures`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the multi-dimensional sampling protocol.
    #[arg(long, global = true)]
    highdim: bool,
    /// reveal-all, label or classifier.
    #[arg(long, global = true)]
    protocol: Option<String>,
    /// Alice's strategy: truthful, hide-near-threshold:J, hide-outliers,
    /// report-threshold:T.
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// Instance file in the `dim= count=` text format.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    ratio: Option<f64>,
    #[arg(long, global = true)]
    separation: Option<f64>,
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Record wall time in figure CSVs (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

impl Options {
    fn to_config(&self) -> anyhow::Result<ExperimentConfig> {
        let cli = ExperimentConfig {
            seed: self.seed,
            trials: self.trials,
            delta: self.delta,
            k: self.k,
            iterations: self.iterations,
            batch: self.batch,
            out: self.out.clone(),
            highdim: self.highdim.then_some(true),
            protocol: self.protocol.clone(),
            strategy: self.strategy.clone(),
            instance: self.instance.clone(),
            n: self.n,
            d: self.d,
            ratio: self.ratio,
            separation: self.separation,
            repeats: self.repeats,
            timing: self.timing.then_some(true),
        };
        let file = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let merged = cli.over(&file);
        merged.validate()?;
        Ok(merged)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    /// Two Gaussian classes.
    Gaussian,
    /// Two Gaussian classes shifted to be linearly separable.
    Realizable,
    /// One-dimensional threshold instance with label flips.
    Threshold,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(value_enum, default_value = "gaussian")]
        kind: GenKind,
        /// Label flips for threshold instances.
        #[arg(long, default_value_t = 0)]
        flips: usize,
    },
    /// Run one Label-Verification protocol on an instance and print the outcome.
    RunProtocol,
    /// Run continuous active learning and write one CSV row per iteration.
    RunCal,
    /// Compute the critical points of a realizable instance.
    Crit,
    /// Exhaustively check the lower-bound family for N = --n.
    LowerBound,
    /// Run bound-verification campaigns.
    Verify {
        /// Campaign names, or `all`.
        #[arg(default_value = "all")]
        campaigns: Vec<String>,
    },
    /// Run figure campaigns and write `<fig>.csv` and `<fig>_summary.csv`.
    Figures {
        /// fig1..fig4, or `all`.
        #[arg(default_value = "all")]
        figures: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Returns whether every verdict passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = cli.options.to_config()?;
    match cli.command {
        Command::Gen { kind, flips } => gen(&cfg, kind, flips),
        Command::RunProtocol => run_protocol(&cfg),
        Command::RunCal => run_cal_command(&cfg),
        Command::Crit => crit(&cfg),
        Command::LowerBound => lower_bound(&cfg),
        Command::Verify { campaigns } => verify(&cfg, &campaigns),
        Command::Figures { figures } => figures_command(&cfg, &figures),
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gaussian_config(cfg: &ExperimentConfig) -> GaussianConfig {
    GaussianConfig::new(cfg.n.unwrap_or(1000), cfg.d.unwrap_or(2), cfg.ratio.unwrap_or(0.05), cfg.seed_or_default())
        .with_separation(cfg.separation.unwrap_or(GaussianConfig::DEFAULT_SEPARATION))
}

/// The configured instance file, or a generated Gaussian corpus.
fn corpus(cfg: &ExperimentConfig, realizable: bool) -> anyhow::Result<Instance> {
    let inst: Instance = match &cfg.instance {
        Some(path) => load_instance(path)?,
        None => gaussian_mixture(&gaussian_config(cfg))?,
    };
    Ok(if realizable { enforce_realizable(&inst, 1e-2)? } else { inst })
}

fn gen(cfg: &ExperimentConfig, kind: GenKind, flips: usize) -> anyhow::Result<bool> {
    let inst: Instance = match kind {
        GenKind::Gaussian => gaussian_mixture(&gaussian_config(cfg))?,
        GenKind::Realizable => enforce_realizable(&gaussian_mixture(&gaussian_config(cfg))?, 1e-2)?,
        GenKind::Threshold => {
            let line: OneDimInstance = threshold_instance(&ThresholdInstanceConfig {
                n: cfg.n.unwrap_or(200),
                positive_fraction: cfg.ratio.unwrap_or(0.3),
                flips,
                seed: cfg.seed_or_default(),
            })?;
            let docs = line.points().iter().map(|p| Document { id: p.id, features: vec![p.position] }).collect();
            Instance::new(docs, line.points().iter().map(|p| p.label).collect())?
        }
    };
    match &cfg.out {
        Some(path) => save_instance(&inst, path)?,
        None => print!("{}", format_instance(&inst)),
    }
    Ok(true)
}

fn strategy(cfg: &ExperimentConfig) -> anyhow::Result<AliceStrategy> {
    Ok(cfg.strategy.as_deref().unwrap_or("truthful").parse()?)
}

fn subprotocol(cfg: &ExperimentConfig, default: &str) -> anyhow::Result<Subprotocol> {
    let delta = cfg.delta.unwrap_or(0.01);
    Ok(match cfg.protocol.as_deref().unwrap_or(default) {
        "reveal-all" | "reveal_all" => Subprotocol::RevealAll,
        "label" | "protocol_label" => Subprotocol::LabelReport(LabelReportConfig::new(cfg.k.unwrap_or(1), delta)?),
        "classifier" | "protocol_classifier" => Subprotocol::ClassifierReport(ClassifierReportConfig::new(delta)?),
        other => bail!("unknown protocol '{other}' (expected reveal-all, label or classifier)"),
    })
}

fn run_protocol(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let path = cfg.instance.as_ref().ok_or_else(|| anyhow!("run-protocol needs --instance"))?;
    let inst: Instance = load_instance(path)?;
    let mut rng = rng_from_seed(cfg.seed_or_default());
    let alice = strategy(cfg)?;
    let outcome = if cfg.highdim == Some(true) {
        if alice != AliceStrategy::Truthful {
            bail!("--highdim supports only the truthful strategy");
        }
        let lr = LabelReportConfig::new(cfg.k.unwrap_or(1), cfg.delta.unwrap_or(0.01))?;
        run_highdim_sampling(&inst, &inst.truth_report(), &Bob::perfect(), &Court, lr, None, &mut rng)?.outcome
    } else {
        let line = OneDimInstance::try_from(&inst)?;
        subprotocol(cfg, "label")?.run(&line, &alice, &Bob::perfect(), &Court, &mut rng)?
    };
    let summary = serde_json::json!({
        "recall": outcome.recall(&inst)?,
        "nrd": outcome.nrd(&inst),
        "full_reveal": outcome.full_reveal_triggered,
        "revealed": outcome.revealed.len(),
        "outcome": outcome,
    });
    emit(cfg.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&summary)?))?;
    Ok(true)
}

fn run_cal_command(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let inst = corpus(cfg, false)?;
    let sub = subprotocol(cfg, "classifier")?;
    let cal = CalConfig {
        force_seed_positive: true,
        ..CalConfig::new(cfg.iterations.unwrap_or(10), cfg.batch.unwrap_or(100), sub)?
    };
    let seed = cfg.seed_or_default();
    let record = run_cal(&inst, &cal, &strategy(cfg)?, &Bob::perfect(), &Court, &mut rng_from_seed(seed))?;
    let rows: Vec<ResultRow> = record
        .iterations
        .iter()
        .map(|it| ResultRow {
            experiment: "run-cal".into(),
            protocol: sub.name().into(),
            iteration: it.iteration,
            seed,
            recall: it.recall,
            nrd: it.nrd,
            full_reveal: it.outcome.full_reveal_triggered,
            ms: 0.0,
        })
        .collect();
    emit(cfg.out.as_deref(), &figures::to_csv(&rows))?;
    Ok(true)
}

fn crit(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let inst = corpus(cfg, cfg.instance.is_none())?;
    let crit = critical_points_fast(&inst)?;
    let negatives = inst.n_minus();
    let mut text = format!(
        "critical {} of {} negatives (ratio {}), {} LP solves\n",
        crit.ids.len(),
        negatives,
        ediscovery::harness::format_sig(crit.ids.len() as f64 / negatives.max(1) as f64),
        crit.lp_solves
    );
    for id in &crit.ids {
        text.push_str(&format!("{id}\n"));
    }
    emit(cfg.out.as_deref(), &text)?;
    Ok(true)
}

fn lower_bound(cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    let n = cfg.n.unwrap_or(16);
    let family = lower_bound_family::<f64>(n)?;
    let mut text = format!("family N = {n}: {} buckets, {} members\n", family.buckets.len(), family.members.len());
    for (j, m) in family.members.iter().enumerate() {
        let (t, err) = optimal_threshold_true(&m.instance)?;
        text.push_str(&format!("  member {}: N+ = {}, t* = {t}, err* = {err}\n", j + 1, m.instance.n_plus()));
    }
    let (missing, worst) = lower_bound_exhaustive(n)?;
    let ok = missing == 0 && worst as f64 >= (n as f64).log2();
    text.push_str(&format!(
        "qualifying sets missing a bucket: {missing}; min worst-case NRD: {worst} (log2 N = {})\n{}\n",
        (n as f64).log2(),
        if ok { "pass" } else { "fail" }
    ));
    emit(cfg.out.as_deref(), &text)?;
    Ok(ok)
}

fn verify(cfg: &ExperimentConfig, names: &[String]) -> anyhow::Result<bool> {
    let campaigns: Vec<Campaign> = if names.iter().any(|n| n == "all") {
        Campaign::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?
    };
    let base = CampaignConfig {
        trials: cfg.trials,
        root_seed: cfg.seed_or_default(),
        delta: cfg.delta,
        k: cfg.k.unwrap_or(1),
        instances: cfg.n.unwrap_or(20),
    };
    let mut all_pass = true;
    let mut csv = String::new();
    for c in campaigns {
        let report = verify_bounds(c, &base);
        eprintln!("{report}");
        all_pass &= report.all_pass();
        let body = report.to_csv();
        csv.push_str(if csv.is_empty() { &body } else { body.split_once('\n').map_or("", |(_, rest)| rest) });
    }
    emit(cfg.out.as_deref(), &csv)?;
    Ok(all_pass)
}

fn figures_command(cfg: &ExperimentConfig, names: &[String]) -> anyhow::Result<bool> {
    let selected: Vec<Figure> = if names.iter().any(|n| n == "all") {
        Figure::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?
    };
    let defaults = FigureConfig::default();
    let fig_cfg = FigureConfig {
        root_seed: cfg.seed_or_default(),
        n: cfg.n.unwrap_or(defaults.n),
        d: cfg.d.unwrap_or(defaults.d),
        positive_ratio: cfg.ratio.unwrap_or(defaults.positive_ratio),
        mean_separation: cfg.separation.unwrap_or(defaults.mean_separation),
        iterations: cfg.iterations.unwrap_or(defaults.iterations),
        batch: cfg.batch.unwrap_or(defaults.batch),
        repeats: cfg.repeats.unwrap_or(defaults.repeats),
        delta: cfg.delta.unwrap_or(defaults.delta),
        k: cfg.k.unwrap_or(defaults.k),
        timing: cfg.timing.unwrap_or(false),
        ..defaults
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for figure in selected {
        let out = run_figure_campaign(figure, &fig_cfg)?;
        let path = dir.join(format!("{figure}.csv"));
        std::fs::write(&path, out.csv()).with_context(|| format!("writing {}", path.display()))?;
        let summary = dir.join(format!("{figure}_summary.csv"));
        std::fs::write(&summary, summary_csv(&out.summary()))
            .with_context(|| format!("writing {}", summary.display()))?;
        eprintln!("{figure}: {} rows -> {}", out.rows.len(), path.display());
    }
    Ok(true)
}
