//! The parties around Trent: Alice's reporting strategies, Bob, the court,
//! Alice's loss, and an exhaustive best-response search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    nrd, optimal_threshold_report, optimal_threshold_true, recall, threshold_error, DocId, GroundTruth, Label,
    LabelReport, OneDimInstance, ProtocolOutcome, Threshold,
};
use crate::protocols::{run_label_report, LabelReportConfig};
use crate::rng::{keyed_uniform, rng_from_seed, split_seed};
use crate::scalar::Scalar;

/// Alice's answer in the classifier-report setting: a threshold plus labels
/// for every document on its positive side.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierReport<T = f64> {
    pub threshold: Threshold<T>,
    pub labels: LabelReport,
}

/// The defendant.
pub trait AliceOracle<T: Scalar> {
    fn label_report(&self, inst: &OneDimInstance<T>) -> Result<LabelReport>;
    fn classifier_report(&self, inst: &OneDimInstance<T>) -> Result<ClassifierReport<T>>;
}

/// The plaintiff's reviewer.
pub trait BobOracle {
    fn review(&self, id: DocId, truth: Label) -> Label;
}

/// Settles disagreements.
pub trait CourtOracle {
    fn settle(&self, id: DocId, truth: Label) -> Label;
}

#[derive(Debug, Clone, PartialEq)]
pub enum AliceStrategy<T = f64> {
    Truthful,
    /// Flip the `j` true positives at or above t* that sit closest to it.
    HideNearThreshold(usize),
    /// Flip every true positive that t* classifies negative.
    HideOutlierFalsePositives,
    /// Report the threshold `t` with truthful labels above it.
    ReportThreshold(T),
    Scripted(LabelReport),
}

impl<T: Scalar> AliceStrategy<T> {
    fn derived_label_report(&self, inst: &OneDimInstance<T>) -> Result<LabelReport> {
        if let AliceStrategy::Scripted(script) = self {
            if let Some(p) = inst.points().iter().find(|p| !script.contains_key(&p.id)) {
                return Err(Error::IncompleteReport(p.id));
            }
            if script.len() == inst.len() {
                return Ok(script.clone());
            }
        }
        let mut report = inst.truth_report();
        match self {
            AliceStrategy::Truthful => {}
            AliceStrategy::HideNearThreshold(j) => {
                let (t_star, _) = optimal_threshold_true(inst)?;
                inst.points()
                    .iter()
                    .rev()
                    .filter(|p| p.label.is_positive() && t_star.classify(p.position).is_positive())
                    .take(*j)
                    .for_each(|p| {
                        report.insert(p.id, Label::Negative);
                    });
            }
            AliceStrategy::HideOutlierFalsePositives => {
                let (t_star, _) = optimal_threshold_true(inst)?;
                for p in inst.points() {
                    if p.label.is_positive() && !t_star.classify(p.position).is_positive() {
                        report.insert(p.id, Label::Negative);
                    }
                }
            }
            AliceStrategy::ReportThreshold(t) => {
                let t = Threshold::Finite(*t);
                for p in inst.points() {
                    if !t.classify(p.position).is_positive() {
                        report.insert(p.id, Label::Negative);
                    }
                }
            }
            AliceStrategy::Scripted(script) => {
                for p in inst.points() {
                    let label = script.get(&p.id).ok_or(Error::IncompleteReport(p.id))?;
                    report.insert(p.id, *label);
                }
            }
        }
        Ok(report)
    }
}

impl<T: Scalar> AliceOracle<T> for AliceStrategy<T> {
    fn label_report(&self, inst: &OneDimInstance<T>) -> Result<LabelReport> {
        self.derived_label_report(inst)
    }

    fn classifier_report(&self, inst: &OneDimInstance<T>) -> Result<ClassifierReport<T>> {
        let (threshold, labels) = match self {
            AliceStrategy::Truthful => {
                if inst.is_empty() {
                    return Err(Error::EmptyInstance);
                }
                (optimal_threshold_true(inst)?.0, inst.truth_report())
            }
            AliceStrategy::ReportThreshold(t) => (Threshold::Finite(*t), inst.truth_report()),
            _ => {
                let report = self.derived_label_report(inst)?;
                (optimal_threshold_report(inst, &report)?.0, report)
            }
        };
        let labels = inst
            .points()
            .iter()
            .filter(|p| threshold.classify(p.position).is_positive())
            .map(|p| (p.id, labels[&p.id]))
            .collect();
        Ok(ClassifierReport { threshold, labels })
    }
}

impl<T: Scalar> fmt::Display for AliceStrategy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AliceStrategy::Truthful => write!(f, "truthful"),
            AliceStrategy::HideNearThreshold(j) => write!(f, "hide-near-threshold:{j}"),
            AliceStrategy::HideOutlierFalsePositives => write!(f, "hide-outliers"),
            AliceStrategy::ReportThreshold(t) => write!(f, "report-threshold:{t}"),
            AliceStrategy::Scripted(r) => write!(f, "scripted({} labels)", r.len()),
        }
    }
}

impl<T: Scalar> FromStr for AliceStrategy<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown Alice strategy '{s}'"));
        match s.split_once(':') {
            None if s == "truthful" => Ok(AliceStrategy::Truthful),
            None if s == "hide-outliers" => Ok(AliceStrategy::HideOutlierFalsePositives),
            Some(("hide-near-threshold", j)) => Ok(AliceStrategy::HideNearThreshold(j.parse().map_err(|_| bad())?)),
            Some(("report-threshold", t)) => Ok(AliceStrategy::ReportThreshold(t.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Bob labels correctly unless a symmetric error rate is configured. Noise is
/// a keyed hash of (seed, id) so it never consumes the protocol's generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bob {
    error_rate: f64,
    noise_seed: u64,
}

impl Bob {
    pub fn perfect() -> Self {
        Bob { error_rate: 0.0, noise_seed: 0 }
    }

    pub fn noisy(error_rate: f64, noise_seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&error_rate) {
            return Err(Error::InvalidParameter(format!("Bob error rate {error_rate} not in [0,1)")));
        }
        Ok(Bob { error_rate, noise_seed })
    }

    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }
}

impl Default for Bob {
    fn default() -> Self {
        Bob::perfect()
    }
}

impl BobOracle for Bob {
    fn review(&self, id: DocId, truth: Label) -> Label {
        if self.error_rate > 0.0 && keyed_uniform(self.noise_seed, id.0) < self.error_rate {
            truth.flipped()
        } else {
            truth
        }
    }
}

/// The court always rules with the ground truth.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Court;

impl CourtOracle for Court {
    fn settle(&self, _id: DocId, truth: Label) -> Label {
        truth
    }
}

/// `L_A(B) = NRD(B) + lambda * N+ * (REC(B) - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliceLoss {
    lambda: f64,
}

impl AliceLoss {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss weight {lambda} must be >= 0")));
        }
        Ok(AliceLoss { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn alice_loss(outcome: &ProtocolOutcome, truth: &impl GroundTruth, loss: AliceLoss) -> Result<f64> {
    let rec = recall(outcome, truth)?;
    Ok(nrd(outcome, truth) as f64 + loss.lambda * truth.n_plus() as f64 * (rec - 1.0))
}

pub const MAX_SEARCH_DOCUMENTS: usize = 30;
pub const MAX_SEARCH_FLIPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyEstimate {
    /// True positives reported as negative.
    pub flipped: Vec<DocId>,
    pub expected_loss: f64,
    /// True error of the smallest optimal threshold of the report.
    pub err_at_t_star_a: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub best: StrategyEstimate,
    pub truthful: StrategyEstimate,
    pub candidates: Vec<StrategyEstimate>,
    pub err_star: usize,
}

impl BestResponse {
    pub fn strategy<T: Scalar>(&self, inst: &OneDimInstance<T>) -> AliceStrategy<T> {
        if self.best.flipped.is_empty() {
            return AliceStrategy::Truthful;
        }
        let mut report = inst.truth_report();
        for id in &self.best.flipped {
            report.insert(*id, Label::Negative);
        }
        AliceStrategy::Scripted(report)
    }
}

fn subsets_up_to(items: &[DocId], max: usize) -> Vec<Vec<DocId>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<(Vec<DocId>, usize)> = vec![(vec![], 0)];
    for _ in 0..max {
        let mut next = Vec::new();
        for (set, start) in &frontier {
            for (i, id) in items.iter().enumerate().skip(*start) {
                let mut s = set.clone();
                s.push(*id);
                out.push(s.clone());
                next.push((s, i + 1));
            }
        }
        frontier = next;
    }
    out
}

/// Exhaustive search over "flip at most `max_flips` true positives to
/// negative", each strategy scored by `trials` runs of the label-report
/// protocol on common random numbers. Ties keep the earlier (smaller) subset.
pub fn best_response_search<T: Scalar>(
    inst: &OneDimInstance<T>,
    cfg: LabelReportConfig,
    loss: AliceLoss,
    max_flips: usize,
    trials: usize,
    root_seed: u64,
) -> Result<BestResponse> {
    if inst.len() > MAX_SEARCH_DOCUMENTS || max_flips > MAX_SEARCH_FLIPS {
        return Err(Error::TooLarge(format!(
            "best-response search needs N <= {MAX_SEARCH_DOCUMENTS} and at most {MAX_SEARCH_FLIPS} flips (got N = {}, flips = {max_flips})",
            inst.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if inst.n_plus() == 0 {
        return Err(Error::UndefinedRecall);
    }
    let positives: Vec<DocId> = inst.points().iter().filter(|p| p.label.is_positive()).map(|p| p.id).collect();
    let subsets = subsets_up_to(&positives, max_flips);
    let truth = inst.truth_report();
    let (_, err_star) = optimal_threshold_true(inst)?;

    let candidates = subsets
        .into_par_iter()
        .map(|flipped| -> Result<StrategyEstimate> {
            let mut report = truth.clone();
            for id in &flipped {
                report.insert(*id, Label::Negative);
            }
            let (t_a, _) = optimal_threshold_report(inst, &report)?;
            let alice = AliceStrategy::Scripted(report);
            let mut total = 0.0;
            for i in 0..trials {
                let mut rng = rng_from_seed(split_seed(root_seed, i as u64));
                let out = run_label_report(inst, &alice, &Bob::perfect(), &Court, cfg, &mut rng)?;
                total += alice_loss(&out, inst, loss)?;
            }
            Ok(StrategyEstimate {
                flipped,
                expected_loss: total / trials as f64,
                err_at_t_star_a: threshold_error(inst, t_a),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = &candidates[0];
    for c in &candidates[1..] {
        if c.expected_loss < best.expected_loss {
            best = c;
        }
    }
    Ok(BestResponse { best: best.clone(), truthful: candidates[0].clone(), candidates: candidates.clone(), err_star })
}
