//! Monte Carlo campaigns that check the protocol guarantees empirically.
//!
//! Every row reports the empirical quantity, the theoretical bound, the slack
//! allowed for sampling noise and a verdict. Rates get three binomial standard
//! errors, expectations two standard errors of the mean. Rows whose instance
//! does not meet the guarantee's preconditions are skipped, not failed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::stats::{binomial_se, Summary};
use crate::datagen::{lower_bound_family, threshold_instance, ThresholdInstanceConfig};
use crate::error::{Error, Result};
use crate::highdim::{check_consistency, execute_sampling_plan, sampling_plan};
use crate::model::{
    optimal_threshold_report, optimal_threshold_true, threshold_error, DocId, GroundTruth, Instance, Label,
    LabelReport, LinearModel, OneDimInstance, ProtocolOutcome, Threshold,
};
use crate::parties::{best_response_search, AliceLoss, AliceStrategy, Bob, Court};
use crate::protocols::{
    run_classifier_report, run_label_report, sampling_constant_label, ClassifierReportConfig, LabelReportConfig,
};
use crate::rng::{rng_from_seed, split_seed, ProtocolRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

/// Which side of the bound the empirical value must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AtMost,
    AtLeast,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        })
    }
}

/// One claim checked on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub claim: String,
    pub instance: String,
    pub empirical: f64,
    pub bound: f64,
    pub slack: f64,
    pub trials: usize,
    pub direction: Direction,
    pub verdict: Verdict,
    pub note: String,
}

impl BoundCheck {
    fn judged(
        claim: &str,
        instance: String,
        empirical: f64,
        bound: f64,
        slack: f64,
        trials: usize,
        direction: Direction,
    ) -> Self {
        let ok = match direction {
            Direction::AtMost => empirical <= bound + slack,
            Direction::AtLeast => empirical >= bound - slack,
        };
        BoundCheck {
            claim: claim.to_string(),
            instance,
            empirical,
            bound,
            slack,
            trials,
            direction,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: String::new(),
        }
    }

    fn skipped(claim: &str, instance: String, note: impl Into<String>) -> Self {
        BoundCheck {
            claim: claim.to_string(),
            instance,
            empirical: f64::NAN,
            bound: f64::NAN,
            slack: f64::NAN,
            trials: 0,
            direction: Direction::AtMost,
            verdict: Verdict::Skipped,
            note: note.into(),
        }
    }

    fn errored(claim: &str, instance: String, err: Error) -> Self {
        BoundCheck { verdict: Verdict::Fail, note: format!("error: {err}"), ..BoundCheck::skipped(claim, instance, "") }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Campaign {
    LabelRecall,
    LabelNrd,
    LabelDetection,
    ClassifierDetection,
    ClassifierNrd,
    BestResponse,
    HighDimDetection,
    LowerBound,
}

impl Campaign {
    pub const ALL: [Campaign; 8] = [
        Campaign::LabelRecall,
        Campaign::LabelNrd,
        Campaign::LabelDetection,
        Campaign::ClassifierDetection,
        Campaign::ClassifierNrd,
        Campaign::BestResponse,
        Campaign::HighDimDetection,
        Campaign::LowerBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Campaign::LabelRecall => "label-recall",
            Campaign::LabelNrd => "label-nrd",
            Campaign::LabelDetection => "label-detection",
            Campaign::ClassifierDetection => "classifier-detection",
            Campaign::ClassifierNrd => "classifier-nrd",
            Campaign::BestResponse => "best-response",
            Campaign::HighDimDetection => "highdim-detection",
            Campaign::LowerBound => "lower-bound",
        }
    }

    /// Trials per row when none are configured.
    pub fn default_trials(&self) -> usize {
        match self {
            Campaign::BestResponse => 2_000,
            Campaign::LowerBound => 1,
            _ => 10_000,
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Campaign::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown campaign '{s}'")))
    }
}

/// Campaign parameters. Unset fields fall back to each campaign's defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignConfig {
    pub trials: Option<usize>,
    pub root_seed: u64,
    pub delta: Option<f64>,
    pub k: usize,
    /// Number of random instances in the grids that use them.
    pub instances: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig { trials: None, root_seed: 0, delta: None, k: 1, instances: 20 }
    }
}

impl CampaignConfig {
    fn trials_for(&self, campaign: Campaign) -> usize {
        self.trials.unwrap_or_else(|| campaign.default_trials()).max(1)
    }

    fn deltas_or(&self, defaults: &[f64]) -> Vec<f64> {
        self.delta.map_or_else(|| defaults.to_vec(), |d| vec![d])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub campaign: Campaign,
    pub root_seed: u64,
    pub rows: Vec<BoundCheck>,
}

impl VerificationReport {
    /// No row failed. Skipped rows do not count against the campaign.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == verdict).count()
    }

    pub const CSV_HEADER: &'static str = "campaign,claim,instance,empirical,bound,slack,trials,direction,verdict,note";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.campaign,
                csv_field(&r.claim),
                csv_field(&r.instance),
                super::format_sig(r.empirical),
                super::format_sig(r.bound),
                super::format_sig(r.slack),
                r.trials,
                r.direction,
                r.verdict,
                csv_field(&r.note)
            ));
        }
        out
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "campaign {} (root seed {})", self.campaign, self.root_seed)?;
        for r in &self.rows {
            write!(f, "  [{}] {} on {}", r.verdict, r.claim, r.instance)?;
            if r.verdict != Verdict::Skipped || r.trials > 0 {
                write!(
                    f,
                    ": {} {} {} (slack {}, {} trials)",
                    super::format_sig(r.empirical),
                    r.direction,
                    super::format_sig(r.bound),
                    super::format_sig(r.slack),
                    r.trials
                )?;
            }
            if !r.note.is_empty() {
                write!(f, " [{}]", r.note)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "  {} pass, {} fail, {} skipped",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Skipped)
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs a campaign. Failures are verdicts; this never returns an error.
pub fn verify_bounds(campaign: Campaign, cfg: &CampaignConfig) -> VerificationReport {
    let rows = match campaign {
        Campaign::LabelRecall => label_recall(cfg),
        Campaign::LabelNrd => label_nrd(cfg),
        Campaign::LabelDetection => label_detection(cfg),
        Campaign::ClassifierDetection => classifier_detection(cfg),
        Campaign::ClassifierNrd => classifier_nrd(cfg),
        Campaign::BestResponse => best_response(cfg),
        Campaign::HighDimDetection => highdim_detection(cfg),
        Campaign::LowerBound => lower_bound(),
    };
    VerificationReport { campaign, root_seed: cfg.root_seed, rows }
}

/// Seed of trial `trial` in row `row`.
pub fn trial_seed(root: u64, row: u64, trial: u64) -> u64 {
    split_seed(split_seed(root, row), trial)
}

fn monte_carlo<F>(trials: usize, row_seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ProtocolRng) -> Result<f64> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut rng_from_seed(split_seed(row_seed, t as u64))))
        .collect()
}

fn rate_check(claim: &str, instance: String, hits: &[f64], bound: f64, direction: Direction) -> BoundCheck {
    let n = hits.len();
    let rate = hits.iter().sum::<f64>() / n as f64;
    BoundCheck::judged(claim, instance, rate, bound, 3.0 * binomial_se(bound, n), n, direction)
}

fn mean_check(claim: &str, instance: String, values: &[f64], bound: f64) -> BoundCheck {
    let s = Summary::of(values);
    BoundCheck::judged(claim, instance, s.mean, bound, 2.0 * s.sem, s.n, Direction::AtMost)
}

/// The random one-dimensional grid: `N = 200`, 30% positives and
/// `i mod 11` label flips on instance `i`, so `err*` ranges over `0..=10`.
pub fn random_threshold_grid(count: usize, root_seed: u64) -> Result<Vec<OneDimInstance>> {
    (0..count)
        .map(|i| {
            threshold_instance(&ThresholdInstanceConfig {
                n: 200,
                positive_fraction: 0.3,
                flips: i % 11,
                seed: split_seed(root_seed, i as u64),
            })
        })
        .collect()
}

fn describe(inst: &OneDimInstance, index: usize) -> Result<String> {
    let (_, err) = optimal_threshold_true(inst)?;
    Ok(format!("random#{index}(N={},N+={},err*={err})", inst.len(), inst.n_plus()))
}

/// Reports that hide true positives, to be tried against the recall floor.
fn adversarial_strategies(inst: &OneDimInstance, seed: u64) -> Vec<(String, AliceStrategy)> {
    let mut strategies = vec![
        ("truthful".to_string(), AliceStrategy::Truthful),
        ("hide-near-threshold:1".to_string(), AliceStrategy::HideNearThreshold(1)),
        ("hide-near-threshold:5".to_string(), AliceStrategy::HideNearThreshold(5)),
        ("hide-outliers".to_string(), AliceStrategy::HideOutlierFalsePositives),
    ];
    let mut positives: Vec<DocId> = inst.points().iter().filter(|p| p.label.is_positive()).map(|p| p.id).collect();
    positives.shuffle(&mut rng_from_seed(seed));
    let mut report = inst.truth_report();
    for id in positives.iter().take(3) {
        report.insert(*id, Label::Negative);
    }
    strategies.push(("hide-random:3".to_string(), AliceStrategy::Scripted(report)));
    strategies
}

/// Replaces a derived strategy by the report it produces so trials do not
/// recompute it.
fn frozen(inst: &OneDimInstance, alice: &AliceStrategy) -> Result<AliceStrategy> {
    use crate::parties::AliceOracle;
    Ok(AliceStrategy::Scripted(alice.label_report(inst)?))
}

fn label_recall(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "P(recall < 1-(err*+k-1)/N+) <= delta";
    let delta = cfg.delta.unwrap_or(0.1);
    let trials = cfg.trials_for(Campaign::LabelRecall);
    let grid = match random_threshold_grid(cfg.instances, cfg.root_seed) {
        Ok(g) => g,
        Err(e) => return vec![BoundCheck::errored(CLAIM, "grid".into(), e)],
    };
    let mut rows = Vec::new();
    let mut row_index = 0u64;
    for (i, inst) in grid.iter().enumerate() {
        for (name, strategy) in adversarial_strategies(inst, split_seed(cfg.root_seed ^ 0x5eed, i as u64)) {
            let row_seed = split_seed(cfg.root_seed, row_index);
            row_index += 1;
            let label = describe(inst, i).map(|d| format!("{d}/{name}")).unwrap_or_else(|_| name.clone());
            let row = (|| -> Result<BoundCheck> {
                let lr = LabelReportConfig::new(cfg.k, delta)?;
                let (_, err_star) = optimal_threshold_true(inst)?;
                let floor = 1.0 - (err_star + cfg.k - 1) as f64 / inst.n_plus() as f64;
                let alice = frozen(inst, &strategy)?;
                let hits = monte_carlo(trials, row_seed, |rng| {
                    let out = run_label_report(inst, &alice, &Bob::perfect(), &Court, lr, rng)?;
                    Ok(if out.recall(inst)? < floor - 1e-12 { 1.0 } else { 0.0 })
                })?;
                Ok(rate_check(CLAIM, label.clone(), &hits, delta, Direction::AtMost))
            })();
            rows.push(row.unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e)));
        }
    }
    rows
}

/// `(2 + 2 err*/k) ln N- ln(1/delta) + err*`
pub fn label_nrd_bound(err_star: usize, k: usize, n_minus: usize, delta: f64) -> f64 {
    (2.0 + 2.0 * err_star as f64 / k as f64) * (n_minus.max(1) as f64).ln() * (1.0 / delta).ln() + err_star as f64
}

fn label_nrd(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "E[NRD] truthful <= (2+2err*/k) ln N- ln(1/delta) + err*";
    let delta = cfg.delta.unwrap_or(0.1);
    let trials = cfg.trials_for(Campaign::LabelNrd);
    let grid = match random_threshold_grid(cfg.instances, cfg.root_seed) {
        Ok(g) => g,
        Err(e) => return vec![BoundCheck::errored(CLAIM, "grid".into(), e)],
    };
    grid.iter()
        .enumerate()
        .map(|(i, inst)| {
            let label = describe(inst, i).unwrap_or_else(|_| format!("random#{i}"));
            (|| -> Result<BoundCheck> {
                let lr = LabelReportConfig::new(cfg.k, delta)?;
                let (_, err_star) = optimal_threshold_true(inst)?;
                let bound = label_nrd_bound(err_star, cfg.k, inst.n_minus(), delta);
                let alice = frozen(inst, &AliceStrategy::Truthful)?;
                let values = monte_carlo(trials, split_seed(cfg.root_seed, i as u64), |rng| {
                    Ok(run_label_report(inst, &alice, &Bob::perfect(), &Court, lr, rng)?.nrd(inst) as f64)
                })?;
                Ok(mean_check(CLAIM, label.clone(), &values, bound))
            })()
            .unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e))
        })
        .collect()
}

/// Positions `N, N-1, ..., 1` for labels given top to bottom.
fn descending(labels: &[Label]) -> Result<OneDimInstance> {
    let n = labels.len();
    let positions: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    OneDimInstance::from_positions(&positions, labels)
}

/// A hidden-positive instance for the label-report protocol.
///
/// Top to bottom: `top` positives, `buffer` negatives, a region of `m`
/// repetitions of (+, +, -) and `tail` negatives. Alice reports every region
/// positive as negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiddenRegionLayout {
    pub top: usize,
    pub buffer: usize,
    pub region: usize,
    pub tail: usize,
}

impl HiddenRegionLayout {
    pub fn labels(&self) -> Vec<Label> {
        use Label::{Negative as N, Positive as P};
        let mut labels = vec![P; self.top];
        labels.extend(std::iter::repeat_n(N, self.buffer));
        for _ in 0..self.region {
            labels.extend([P, P, N]);
        }
        labels.extend(std::iter::repeat_n(N, self.tail));
        labels
    }

    pub fn build(&self) -> Result<(OneDimInstance, LabelReport)> {
        let inst = descending(&self.labels())?;
        let mut report = inst.truth_report();
        let hidden_from = self.top + self.buffer;
        for p in &inst.points()[hidden_from..hidden_from + 3 * self.region] {
            report.insert(p.id, Label::Negative);
        }
        Ok((inst, report))
    }
}

impl fmt::Display for HiddenRegionLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hidden(top={},buffer={},region={}x(++-),tail={})", self.top, self.buffer, self.region, self.tail)
    }
}

pub const LABEL_DETECTION_LAYOUTS: [HiddenRegionLayout; 3] = [
    HiddenRegionLayout { top: 20, buffer: 12, region: 15, tail: 100 },
    HiddenRegionLayout { top: 10, buffer: 10, region: 12, tail: 40 },
    HiddenRegionLayout { top: 30, buffer: 20, region: 25, tail: 150 },
];

/// Walk index (1-based) of the first hidden positive, and whether every
/// hidden positive has sampling probability below one.
fn first_hidden_rank(inst: &OneDimInstance, report: &LabelReport, t_a: Threshold<f64>) -> Option<usize> {
    inst.points()
        .iter()
        .filter(|p| !report[&p.id].is_positive() && !t_a.classify(p.position).is_positive())
        .position(|p| p.label.is_positive())
        .map(|i| i + 1)
}

fn label_detection(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "P(detect hidden positive) >= 1-delta";
    let trials = cfg.trials_for(Campaign::LabelDetection);
    let mut rows = Vec::new();
    let mut row_index = 0u64;
    for delta in cfg.deltas_or(&[0.1, 0.01]) {
        for layout in LABEL_DETECTION_LAYOUTS {
            let label = format!("{layout}/delta={delta}");
            let row_seed = split_seed(cfg.root_seed, row_index);
            row_index += 1;
            let row = (|| -> Result<BoundCheck> {
                let lr = LabelReportConfig::new(cfg.k, delta)?;
                let (inst, report) = layout.build()?;
                let (_, err_star) = optimal_threshold_true(&inst)?;
                let (t_a, err_a) = optimal_threshold_report(&inst, &report)?;
                let err_at_t_a = threshold_error(&inst, t_a);
                if err_at_t_a < err_star + cfg.k {
                    return Ok(BoundCheck::skipped(
                        CLAIM,
                        label.clone(),
                        format!("err(t*_A) = {err_at_t_a} < err* + k = {}", err_star + cfg.k),
                    ));
                }
                let c = sampling_constant_label(err_a, cfg.k, delta)?;
                match first_hidden_rank(&inst, &report, t_a) {
                    Some(rank) if (rank as f64) > c => {}
                    _ => return Ok(BoundCheck::skipped(CLAIM, label.clone(), "a hidden positive is sampled surely")),
                }
                let alice = AliceStrategy::Scripted(report);
                let hits = monte_carlo(trials, row_seed, |rng| {
                    let out = run_label_report(&inst, &alice, &Bob::perfect(), &Court, lr, rng)?;
                    Ok(if out.full_reveal_triggered { 1.0 } else { 0.0 })
                })?;
                Ok(rate_check(CLAIM, label.clone(), &hits, 1.0 - delta, Direction::AtLeast)
                    .with_note(format!("err*={err_star}, err(t*_A)={err_at_t_a}")))
            })();
            rows.push(row.unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e)));
        }
    }
    rows
}

/// A classifier-report instance where Alice's threshold sits below the top
/// block and above a block of positives.
///
/// Top to bottom: `top_negatives` negatives, `top` positives, `buffer`
/// negatives, `block` positives, `tail` negatives, `tail_positives`
/// positives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftedThresholdLayout {
    pub top_negatives: usize,
    pub top: usize,
    pub buffer: usize,
    pub block: usize,
    pub tail: usize,
    pub tail_positives: usize,
}

impl ShiftedThresholdLayout {
    pub fn labels(&self) -> Vec<Label> {
        use Label::{Negative as N, Positive as P};
        let mut labels = vec![N; self.top_negatives];
        labels.extend(std::iter::repeat_n(P, self.top));
        labels.extend(std::iter::repeat_n(N, self.buffer));
        labels.extend(std::iter::repeat_n(P, self.block));
        labels.extend(std::iter::repeat_n(N, self.tail));
        labels.extend(std::iter::repeat_n(P, self.tail_positives));
        labels
    }

    /// The instance and Alice's threshold, halfway between the top block
    /// and the next document.
    pub fn build(&self) -> Result<(OneDimInstance, f64)> {
        let inst = descending(&self.labels())?;
        let cut = self.top_negatives + self.top;
        let t = inst.points()[cut - 1].position - 0.5;
        Ok((inst, t))
    }
}

impl fmt::Display for ShiftedThresholdLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "shifted(top-={},top+={},buffer={},block+={},tail-={},tail+={})",
            self.top_negatives, self.top, self.buffer, self.block, self.tail, self.tail_positives
        )
    }
}

pub const CLASSIFIER_DETECTION_LAYOUTS: [ShiftedThresholdLayout; 4] = [
    ShiftedThresholdLayout { top_negatives: 0, top: 20, buffer: 0, block: 20, tail: 100, tail_positives: 0 },
    ShiftedThresholdLayout { top_negatives: 0, top: 20, buffer: 15, block: 60, tail: 100, tail_positives: 0 },
    ShiftedThresholdLayout { top_negatives: 2, top: 20, buffer: 0, block: 30, tail: 100, tail_positives: 3 },
    ShiftedThresholdLayout { top_negatives: 4, top: 20, buffer: 5, block: 40, tail: 100, tail_positives: 4 },
];

fn classifier_detection(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "P(detect non-optimal classifier) >= 1-delta";
    let trials = cfg.trials_for(Campaign::ClassifierDetection);
    let mut rows = Vec::new();
    let mut row_index = 0u64;
    for delta in cfg.deltas_or(&[0.1, 0.01]) {
        for layout in CLASSIFIER_DETECTION_LAYOUTS {
            let label = format!("{layout}/delta={delta}");
            let row_seed = split_seed(cfg.root_seed, row_index);
            row_index += 1;
            let row = (|| -> Result<BoundCheck> {
                let cc = ClassifierReportConfig::new(delta)?;
                let (inst, t) = layout.build()?;
                let (_, err_star) = optimal_threshold_true(&inst)?;
                let err_t_a = threshold_error(&inst, Threshold::Finite(t));
                if err_t_a <= 3 * err_star {
                    return Ok(BoundCheck::skipped(
                        CLAIM,
                        label.clone(),
                        format!("err(t_A) = {err_t_a} <= 3 err* = {}", 3 * err_star),
                    ));
                }
                let alice = AliceStrategy::ReportThreshold(t);
                let hits = monte_carlo(trials, row_seed, |rng| {
                    let out = run_classifier_report(&inst, &alice, &Bob::perfect(), &Court, cc, rng)?;
                    Ok(if out.full_reveal_triggered { 1.0 } else { 0.0 })
                })?;
                Ok(rate_check(CLAIM, label.clone(), &hits, 1.0 - delta, Direction::AtLeast)
                    .with_note(format!("err*={err_star}, err(t_A)={err_t_a}")))
            })();
            rows.push(row.unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e)));
        }
    }
    rows
}

/// `2 err* ln N ln(N/delta) + err*`
pub fn classifier_nrd_bound(err_star: usize, n: usize, delta: f64) -> f64 {
    let n = n as f64;
    2.0 * err_star as f64 * n.ln() * (n / delta).ln() + err_star as f64
}

/// At `err* = 0` the disclosure bound is zero while the walk below the
/// threshold still samples its first documents with probability one, so
/// those rows are skipped.
fn classifier_nrd(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "E[NRD] truthful-optimal <= 2err* ln N ln(N/delta) + err*";
    let delta = cfg.delta.unwrap_or(0.01);
    let trials = cfg.trials_for(Campaign::ClassifierNrd);
    let grid = match random_threshold_grid(cfg.instances, cfg.root_seed) {
        Ok(g) => g,
        Err(e) => return vec![BoundCheck::errored(CLAIM, "grid".into(), e)],
    };
    grid.iter()
        .enumerate()
        .map(|(i, inst)| {
            let label = describe(inst, i).unwrap_or_else(|_| format!("random#{i}"));
            (|| -> Result<BoundCheck> {
                let cc = ClassifierReportConfig::new(delta)?;
                let (_, err_star) = optimal_threshold_true(inst)?;
                if err_star == 0 {
                    return Ok(BoundCheck::skipped(CLAIM, label.clone(), "bound is 0 at err* = 0"));
                }
                let bound = classifier_nrd_bound(err_star, inst.len(), delta);
                let values = monte_carlo(trials, split_seed(cfg.root_seed, i as u64), |rng| {
                    Ok(run_classifier_report(inst, &AliceStrategy::Truthful, &Bob::perfect(), &Court, cc, rng)?
                        .nrd(inst) as f64)
                })?;
                Ok(mean_check(CLAIM, label.clone(), &values, bound))
            })()
            .unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e))
        })
        .collect()
}

/// Realizable instances with `n_plus` positives above `n_minus` negatives,
/// small enough for the exhaustive best-response search.
pub const BEST_RESPONSE_SIZES: [(usize, usize); 6] = [(5, 25), (4, 26), (3, 27), (5, 24), (4, 25), (3, 26)];

/// Whether `N- > max{3(2 + 2 err*/k) ln(1/delta) ln N- + 3 err*, lambda N+}`
/// and `delta < 1/3`.
pub fn best_response_precondition(inst: &OneDimInstance, err_star: usize, k: usize, delta: f64, lambda: f64) -> bool {
    let n_minus = inst.n_minus() as f64;
    let disclosure = 3.0 * (2.0 + 2.0 * err_star as f64 / k as f64) * (1.0 / delta).ln() * n_minus.ln()
        + 3.0 * err_star as f64;
    delta > 0.0 && delta < 1.0 / 3.0 && n_minus > disclosure.max(lambda * inst.n_plus() as f64)
}

fn best_response(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "best response has err(t*_A) <= err* (truthful on the positive side)";
    const LAMBDA: f64 = 1.0;
    let delta = cfg.delta.unwrap_or(0.3);
    let trials = cfg.trials_for(Campaign::BestResponse);
    BEST_RESPONSE_SIZES
        .iter()
        .enumerate()
        .map(|(i, &(n_plus, n_minus))| {
            let label = format!("sorted(N+={n_plus},N-={n_minus})/delta={delta}");
            (|| -> Result<BoundCheck> {
                let mut labels = vec![Label::Positive; n_plus];
                labels.extend(std::iter::repeat_n(Label::Negative, n_minus));
                let inst = descending(&labels)?;
                let (_, err_star) = optimal_threshold_true(&inst)?;
                if !best_response_precondition(&inst, err_star, cfg.k, delta, LAMBDA) {
                    return Ok(BoundCheck::skipped(CLAIM, label.clone(), "N- precondition fails"));
                }
                let flips = n_plus.min(crate::parties::MAX_SEARCH_FLIPS);
                let br = best_response_search(
                    &inst,
                    LabelReportConfig::new(cfg.k, delta)?,
                    AliceLoss::new(LAMBDA)?,
                    flips,
                    trials,
                    split_seed(cfg.root_seed, i as u64),
                )?;
                Ok(BoundCheck::judged(
                    CLAIM,
                    label.clone(),
                    br.best.err_at_t_star_a as f64,
                    err_star as f64,
                    0.0,
                    trials,
                    Direction::AtMost,
                )
                .with_note(format!(
                    "best loss {:.4} vs truthful {:.4}, {} strategies",
                    br.best.expected_loss,
                    br.truthful.expected_loss,
                    br.candidates.len()
                )))
            })()
            .unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e))
        })
        .collect()
}

/// The hidden-region layout placed on the line `y = x / 2` in the plane.
/// All points are collinear, so every hyperplane acts on them as a threshold
/// along the line and the optimal error equals the one-dimensional optimum.
pub fn collinear_hidden_instance(layout: HiddenRegionLayout) -> Result<(Instance, LabelReport, OneDimInstance)> {
    let labels = layout.labels();
    let n = labels.len();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (n - i) as f64).map(|s| vec![s, s / 2.0]).collect();
    let inst = Instance::from_rows(rows, labels.clone())?;
    let line = descending(&labels)?;
    let mut report = inst.truth_report();
    let hidden_from = layout.top + layout.buffer;
    for i in hidden_from..hidden_from + 3 * layout.region {
        report.insert(DocId(i as u64), Label::Negative);
    }
    Ok((inst, report, line))
}

pub const HIGHDIM_DETECTION_LAYOUT: HiddenRegionLayout = HiddenRegionLayout { top: 4, buffer: 6, region: 8, tail: 4 };

fn highdim_detection(cfg: &CampaignConfig) -> Vec<BoundCheck> {
    const CLAIM: &str = "P(detect hidden positive, 2-D) >= 1-delta";
    let delta = cfg.delta.unwrap_or(0.1);
    let trials = cfg.trials_for(Campaign::HighDimDetection);
    let label = format!("collinear {HIGHDIM_DETECTION_LAYOUT}/delta={delta}");
    let row = (|| -> Result<BoundCheck> {
        let lr = LabelReportConfig::new(cfg.k, delta)?;
        let (inst, report, line) = collinear_hidden_instance(HIGHDIM_DETECTION_LAYOUT)?;
        let (t_star, err_star) = optimal_threshold_true(&line)?;
        let plan = sampling_plan(&inst, &report, lr)?;
        let err_h_a = crate::model::classifier_error(&plan.optima.classifiers[0], &inst)?;
        if err_h_a < err_star + cfg.k {
            return Ok(BoundCheck::skipped(CLAIM, label.clone(), "err(h*_A) < err* + k"));
        }
        let t = t_star.finite().ok_or_else(|| Error::NumericalDegeneracy("infinite optimal threshold".into()))?;
        // The threshold `s >= t` on the line is the halfspace x + y/2 >= 1.25 t.
        let h_star = LinearModel::new(vec![1.0, 0.5], -1.25 * t)?;
        if !check_consistency(&h_star, &plan.optima, &inst)? {
            return Ok(BoundCheck::skipped(CLAIM, label.clone(), "consistency condition fails"));
        }
        if plan.walk.iter().any(|&(id, _, p)| p >= 1.0 && inst.truth(id) == Some(Label::Positive)) {
            return Ok(BoundCheck::skipped(CLAIM, label.clone(), "a hidden positive is sampled surely"));
        }
        let hits = monte_carlo(trials, split_seed(cfg.root_seed, 0), |rng| {
            let out: ProtocolOutcome = execute_sampling_plan(&inst, &report, &plan, &Bob::perfect(), &Court, rng)?;
            Ok(if out.full_reveal_triggered { 1.0 } else { 0.0 })
        })?;
        Ok(rate_check(CLAIM, label.clone(), &hits, 1.0 - delta, Direction::AtLeast)
            .with_note(format!("err*={err_star}, err(h*_A)={err_h_a}")))
    })();
    vec![row.unwrap_or_else(|e| BoundCheck::errored(CLAIM, label, e))]
}

/// Exhaustive check over every revealed set of the lower-bound family of
/// size `n`: the number of sets that reach the optimal recall on every
/// member while missing a bucket, and the smallest worst-case disclosure
/// among the sets that reach it.
pub fn lower_bound_exhaustive(n: usize) -> Result<(usize, usize)> {
    if n > 20 {
        return Err(Error::TooLarge(format!("exhaustive lower-bound check needs N <= 20 (got {n})")));
    }
    let family = lower_bound_family::<f64>(n)?;
    let mask_of = |ids: &mut dyn Iterator<Item = DocId>| ids.fold(0u32, |m, id| m | 1 << id.0);
    let bucket_masks: Vec<u32> = family.buckets.iter().map(|b| mask_of(&mut b.iter().copied())).collect();
    let members: Vec<(u32, usize, usize)> = family
        .members
        .iter()
        .map(|m| {
            let inst = &m.instance;
            let positives = mask_of(&mut inst.points().iter().filter(|p| p.label.is_positive()).map(|p| p.id));
            let false_negatives = inst
                .points()
                .iter()
                .filter(|p| p.label.is_positive() && !m.t_star.classify(p.position).is_positive())
                .count();
            // recall >= 1 - FN*/N+  <=>  revealed positives >= N+ - FN*
            (positives, inst.n_plus() - false_negatives, inst.n_plus())
        })
        .collect();
    let mut missing = 0;
    let mut best_worst = usize::MAX;
    for set in 0u32..(1u32 << n) {
        let qualifies = members.iter().all(|&(pos, need, _)| (set & pos).count_ones() as usize >= need);
        if !qualifies {
            continue;
        }
        if bucket_masks.iter().any(|b| set & b == 0) {
            missing += 1;
        }
        let worst = members.iter().map(|&(pos, _, _)| (set & !pos).count_ones() as usize).max().unwrap_or(0);
        best_worst = best_worst.min(worst);
    }
    Ok((missing, best_worst))
}

fn lower_bound() -> Vec<BoundCheck> {
    let mut rows = Vec::new();
    for n in [4usize, 8, 16] {
        let label = format!("family(N={n})");
        match lower_bound_exhaustive(n) {
            Ok((missing, best_worst)) => {
                rows.push(BoundCheck::judged(
                    "qualifying revealed sets missing a bucket = 0",
                    label.clone(),
                    missing as f64,
                    0.0,
                    0.0,
                    1,
                    Direction::AtMost,
                ));
                rows.push(BoundCheck::judged(
                    "min worst-case NRD of qualifying sets >= log2 N",
                    label,
                    best_worst as f64,
                    (n as f64).log2(),
                    0.0,
                    1,
                    Direction::AtLeast,
                ));
            }
            Err(e) => rows.push(BoundCheck::errored("lower-bound family", label, e)),
        }
    }
    rows
}
