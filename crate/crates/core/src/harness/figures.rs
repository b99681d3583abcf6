//! Figure campaigns on synthetic corpora, emitted as one CSV row per
//! (trial, iteration).
//!
//! - `fig1`: Reveal_All and Protocol_Classifier on corpus `a`.
//! - `fig2`, `fig3`: all three protocols on corpora `a` and `b`; `fig2` is
//!   read for recall, `fig3` for disclosure. Corpus `b` has four times the
//!   prevalence of `a`.
//! - `fig4`: disclosure ratios of Protocol_Classifier and of the critical
//!   points of realizable samples. Ratio denominators are emitted as their
//!   own rows so every aggregate recomputes from the CSV.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::format_sig;
use super::stats::Summary;
use crate::cal::{run_cal, CalConfig};
use crate::critical::critical_points_fast;
use crate::datagen::{enforce_realizable, gaussian_mixture, GaussianConfig};
use crate::error::{Error, Result};
use crate::model::{GroundTruth, Instance, Label};
use crate::parties::{AliceStrategy, Bob, Court};
use crate::protocols::{ClassifierReportConfig, LabelReportConfig, Subprotocol};
use crate::rng::{rng_from_seed, split_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure '{s}' (expected fig1..fig4)")))
    }
}

pub const CRITICAL_POINTS: &str = "critical_points";
/// Suffix of rows that carry a ratio denominator in the `nrd` column.
pub const DENOMINATOR_SUFFIX: &str = "/reviewed_negatives";

#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    pub root_seed: u64,
    pub n: usize,
    pub d: usize,
    pub positive_ratio: f64,
    pub mean_separation: f64,
    pub iterations: usize,
    pub batch: usize,
    pub repeats: usize,
    pub delta: f64,
    pub k: usize,
    /// Sample sizes of the critical-points series.
    pub crit_sizes: Vec<usize>,
    pub crit_repeats: usize,
    /// Record wall time per iteration. Off by default so reruns are
    /// byte-identical.
    pub timing: bool,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            root_seed: 0,
            n: 5000,
            d: 20,
            positive_ratio: 0.05,
            mean_separation: GaussianConfig::DEFAULT_SEPARATION,
            iterations: 10,
            batch: 100,
            repeats: 10,
            delta: 0.01,
            k: 1,
            crit_sizes: vec![250, 500, 1000],
            crit_repeats: 3,
            timing: false,
        }
    }
}

impl FigureConfig {
    fn validate(&self) -> Result<()> {
        if self.repeats == 0 || self.crit_repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be >= 1".into()));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidParameter("corpus size and dimension must be >= 1".into()));
        }
        LabelReportConfig::new(self.k, self.delta)?;
        CalConfig::new(self.iterations, self.batch, Subprotocol::RevealAll)?;
        Ok(())
    }

    fn corpus(&self, tag: u64, positive_ratio: f64) -> GaussianConfig {
        GaussianConfig::new(self.n, self.d, positive_ratio, split_seed(self.root_seed, 1_000 + tag))
            .with_separation(self.mean_separation)
    }

    /// Corpus `a` uses the configured prevalence, corpus `b` four times it.
    pub fn corpora(&self) -> [(&'static str, GaussianConfig); 2] {
        [("a", self.corpus(0, self.positive_ratio)), ("b", self.corpus(1, (4.0 * self.positive_ratio).min(0.5)))]
    }

    pub fn subprotocols(&self) -> Result<[Subprotocol; 3]> {
        Ok([
            Subprotocol::RevealAll,
            Subprotocol::LabelReport(LabelReportConfig::new(self.k, self.delta)?),
            Subprotocol::ClassifierReport(ClassifierReportConfig::new(self.delta)?),
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub protocol: String,
    pub iteration: usize,
    pub seed: u64,
    pub recall: f64,
    pub nrd: usize,
    pub full_reveal: bool,
    pub ms: f64,
}

pub const RESULT_HEADER: &str = "experiment,protocol,iteration,seed,recall,nrd,full_reveal,ms";

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.experiment,
            self.protocol,
            self.iteration,
            self.seed,
            format_sig(self.recall),
            self.nrd,
            self.full_reveal,
            format_sig(self.ms)
        )
    }

    fn sort_key(&self) -> (&str, &str, u64, usize) {
        (&self.experiment, &self.protocol, self.seed, self.iteration)
    }
}

/// Header plus the rows in sorted order.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(RESULT_HEADER);
    out.push('\n');
    for r in sorted {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RESULT_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected header '{RESULT_HEADER}'") }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            let bad = |what: &str| Error::Parse { line, message: format!("invalid {what}") };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Parse { line, message: format!("expected 8 fields, found {}", f.len()) });
            }
            Ok(ResultRow {
                experiment: f[0].to_string(),
                protocol: f[1].to_string(),
                iteration: f[2].parse().map_err(|_| bad("iteration"))?,
                seed: f[3].parse().map_err(|_| bad("seed"))?,
                recall: f[4].parse().map_err(|_| bad("recall"))?,
                nrd: f[5].parse().map_err(|_| bad("nrd"))?,
                full_reveal: f[6].parse().map_err(|_| bad("full_reveal"))?,
                ms: f[7].parse().map_err(|_| bad("ms"))?,
            })
        })
        .collect()
}

/// Mean and range per (experiment, protocol, iteration).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub experiment: String,
    pub protocol: String,
    pub iteration: usize,
    pub recall: Summary,
    pub nrd: Summary,
}

/// Recall and NRD samples of one (experiment, protocol, iteration) cell.
type Cell = (Vec<f64>, Vec<f64>);

pub fn summarize(rows: &[ResultRow]) -> Vec<SeriesPoint> {
    let mut groups: BTreeMap<(&str, &str, usize), Cell> = BTreeMap::new();
    for r in rows {
        let g = groups.entry((&r.experiment, &r.protocol, r.iteration)).or_default();
        g.0.push(r.recall);
        g.1.push(r.nrd as f64);
    }
    groups
        .into_iter()
        .map(|((e, p, t), (rec, nrd))| SeriesPoint {
            experiment: e.to_string(),
            protocol: p.to_string(),
            iteration: t,
            recall: Summary::of(&rec),
            nrd: Summary::of(&nrd),
        })
        .collect()
}

pub const SUMMARY_HEADER: &str =
    "experiment,protocol,iteration,repeats,recall_mean,recall_min,recall_max,recall_se,nrd_mean,nrd_min,nrd_max,nrd_se";

pub fn summary_csv(points: &[SeriesPoint]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for p in points {
        let s = |x: &Summary| {
            format!("{},{},{},{}", format_sig(x.mean), format_sig(x.min), format_sig(x.max), format_sig(x.sem))
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.experiment,
            p.protocol,
            p.iteration,
            p.recall.n,
            s(&p.recall),
            s(&p.nrd)
        ));
    }
    out
}

/// Per-iteration mean of `nrd / denominator`, pairing each `protocol` row
/// with the denominator row of the same seed and iteration.
pub fn nrd_ratio_series(rows: &[ResultRow], experiment: &str, protocol: &str) -> Vec<(usize, f64)> {
    let denominator = format!("{protocol}{DENOMINATOR_SUFFIX}");
    let den: BTreeMap<(u64, usize), usize> = rows
        .iter()
        .filter(|r| r.experiment == experiment && r.protocol == denominator)
        .map(|r| ((r.seed, r.iteration), r.nrd))
        .collect();
    let mut by_iter: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.experiment == experiment && r.protocol == protocol) {
        if let Some(&d) = den.get(&(r.seed, r.iteration)) {
            if d > 0 {
                by_iter.entry(r.iteration).or_default().push(r.nrd as f64 / d as f64);
            }
        }
    }
    by_iter.into_iter().map(|(t, v)| (t, Summary::of(&v).mean)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutput {
    pub figure: Figure,
    pub rows: Vec<ResultRow>,
}

impl FigureOutput {
    pub fn csv(&self) -> String {
        to_csv(&self.rows)
    }

    pub fn summary(&self) -> Vec<SeriesPoint> {
        summarize(&self.rows)
    }
}

/// Seed of CAL repeat `repeat` on corpus `tag`. Every protocol of a repeat
/// uses it, so protocols share their random seed batch.
pub fn repeat_seed(root: u64, tag: u64, repeat: usize) -> u64 {
    split_seed(split_seed(root, tag), repeat as u64)
}

/// One CAL run per (repeat, protocol) on `corpus`, with truthful Alice.
/// With `denominators` set, every iteration also yields a row counting the
/// negatives reviewed so far.
pub fn cal_series(
    experiment: &str,
    corpus: &Instance,
    subprotocols: &[Subprotocol],
    cfg: &FigureConfig,
    tag: u64,
    denominators: bool,
) -> Result<Vec<ResultRow>> {
    let jobs: Vec<(usize, Subprotocol)> =
        (0..cfg.repeats).flat_map(|r| subprotocols.iter().map(move |s| (r, *s))).collect();
    let per_job = jobs
        .par_iter()
        .map(|&(repeat, sub)| -> Result<Vec<ResultRow>> {
            let seed = repeat_seed(cfg.root_seed, tag, repeat);
            let cal = CalConfig { force_seed_positive: true, ..CalConfig::new(cfg.iterations, cfg.batch, sub)? };
            let mut rng = rng_from_seed(seed);
            let started = Instant::now();
            let record = run_cal(corpus, &cal, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng)?;
            let elapsed = started.elapsed().as_secs_f64() * 1e3 / record.iterations.len().max(1) as f64;
            let mut rows = Vec::new();
            let mut reviewed_negatives = 0;
            for it in &record.iterations {
                reviewed_negatives +=
                    it.requested.iter().filter(|id| corpus.truth(**id) == Some(Label::Negative)).count();
                let row = ResultRow {
                    experiment: experiment.to_string(),
                    protocol: sub.name().to_string(),
                    iteration: it.iteration,
                    seed,
                    recall: it.recall,
                    nrd: it.nrd,
                    full_reveal: it.outcome.full_reveal_triggered,
                    ms: if cfg.timing { elapsed } else { 0.0 },
                };
                if denominators {
                    rows.push(ResultRow {
                        protocol: format!("{}{DENOMINATOR_SUFFIX}", sub.name()),
                        nrd: reviewed_negatives,
                        full_reveal: false,
                        ms: 0.0,
                        ..row.clone()
                    });
                }
                rows.push(row);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

/// Critical points of realizable samples, one row per (size, repeat) with
/// the sample's negatives as denominator row. The iteration column indexes
/// the size.
pub fn critical_points_series(experiment: &str, cfg: &FigureConfig) -> Result<Vec<ResultRow>> {
    let jobs: Vec<(usize, usize)> =
        (0..cfg.crit_sizes.len()).flat_map(|j| (0..cfg.crit_repeats).map(move |r| (j, r))).collect();
    let per_job = jobs
        .par_iter()
        .map(|&(j, repeat)| -> Result<Vec<ResultRow>> {
            let seed = repeat_seed(cfg.root_seed, 2_000 + j as u64, repeat);
            let gen = GaussianConfig::new(cfg.crit_sizes[j], cfg.d, cfg.positive_ratio, seed)
                .with_separation(cfg.mean_separation);
            let sample = enforce_realizable(&gaussian_mixture::<f64>(&gen)?, 1e-2)?;
            let started = Instant::now();
            let crit = critical_points_fast(&sample)?;
            let ms = if cfg.timing { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let row = ResultRow {
                experiment: experiment.to_string(),
                protocol: CRITICAL_POINTS.to_string(),
                iteration: j,
                seed,
                recall: 1.0,
                nrd: crit.ids.len(),
                full_reveal: false,
                ms,
            };
            let den = ResultRow {
                protocol: format!("{CRITICAL_POINTS}{DENOMINATOR_SUFFIX}"),
                nrd: sample.n_minus(),
                ms: 0.0,
                ..row.clone()
            };
            Ok(vec![row, den])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

pub fn run_figure_campaign(figure: Figure, cfg: &FigureConfig) -> Result<FigureOutput> {
    cfg.validate()?;
    let [reveal_all, label, classifier] = cfg.subprotocols()?;
    let rows = match figure {
        Figure::Fig1 => {
            let (_, gen) = &cfg.corpora()[0];
            let corpus = gaussian_mixture::<f64>(gen)?;
            cal_series("fig1", &corpus, &[reveal_all, classifier], cfg, 0, false)?
        }
        Figure::Fig2 | Figure::Fig3 => {
            let mut rows = Vec::new();
            for (tag, (name, gen)) in cfg.corpora().iter().enumerate() {
                let corpus = gaussian_mixture::<f64>(gen)?;
                let experiment = format!("{figure}-{name}");
                rows.extend(cal_series(&experiment, &corpus, &[reveal_all, label, classifier], cfg, tag as u64, false)?);
            }
            rows
        }
        Figure::Fig4 => {
            let (_, gen) = &cfg.corpora()[0];
            let corpus = enforce_realizable(&gaussian_mixture::<f64>(gen)?, 1e-2)?;
            let mut rows = cal_series("fig4", &corpus, &[classifier], cfg, 3, true)?;
            rows.extend(critical_points_series("fig4", cfg)?);
            rows
        }
    };
    let mut rows = rows;
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(FigureOutput { figure, rows })
}
