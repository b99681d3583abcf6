//! Continuous Active Learning with every review batch labelled through a
//! Label-Verification subprotocol.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{DocId, GroundTruth, Instance, Label, LabelReport, LinearModel, OneDimInstance, Point, ProtocolOutcome};
use crate::parties::{AliceOracle, BobOracle, CourtOracle};
use crate::protocols::Subprotocol;
use crate::scalar::Scalar;
use crate::svm::{train_linear_svm, SvmConfig};

/// Projection onto the normal vector, without the intercept.
pub fn score<T: Scalar>(model: &LinearModel<T>, x: &[T]) -> Result<T> {
    model.score(x)
}

/// The `n` highest-scoring documents outside `excluded`, embedded on the
/// line at their scores. Ties go to the smaller id.
pub fn select_top_n<T: Scalar>(
    corpus: &Instance<T>,
    excluded: &BTreeSet<DocId>,
    model: &LinearModel<T>,
    n: usize,
) -> Result<OneDimInstance<T>> {
    let mut scored = corpus
        .iter()
        .filter(|(doc, _)| !excluded.contains(&doc.id))
        .map(|(doc, label)| Ok(Point { id: doc.id, position: model.score(&doc.features)?, label }))
        .collect::<Result<Vec<_>>>()?;
    if scored.is_empty() {
        return Err(Error::EmptyInstance);
    }
    scored.sort_by(|a, b| b.position.partial_cmp(&a.position).unwrap_or(std::cmp::Ordering::Equal).then(a.id.cmp(&b.id)));
    scored.truncate(n);
    OneDimInstance::new(scored)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalConfig {
    /// Number of review batches, the seed batch included.
    pub iterations: usize,
    pub batch: usize,
    pub svm: SvmConfig,
    pub subprotocol: Subprotocol,
    /// Guarantees one true positive in the seed batch.
    pub force_seed_positive: bool,
}

impl CalConfig {
    pub fn new(iterations: usize, batch: usize, subprotocol: Subprotocol) -> Result<Self> {
        if iterations == 0 || batch == 0 {
            return Err(Error::InvalidParameter("iterations and batch size must be >= 1".into()));
        }
        Ok(CalConfig { iterations, batch, svm: SvmConfig::default(), subprotocol, force_seed_positive: false })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalIteration {
    pub iteration: usize,
    pub requested: Vec<DocId>,
    /// Recall over the whole corpus with the cumulative revealed set.
    pub recall: f64,
    /// Cumulative non-responsive disclosure.
    pub nrd: usize,
    pub revealed_total: usize,
    pub training_size: usize,
    pub degenerate_fit: bool,
    pub outcome: ProtocolOutcome,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CalRunRecord {
    pub iterations: Vec<CalIteration>,
    pub revealed: BTreeSet<DocId>,
    /// Labels of the reviewed set `S` as the subprotocols returned them.
    pub training_labels: LabelReport,
    /// The corpus ran out before the last iteration.
    pub truncated: bool,
}

impl CalRunRecord {
    pub fn final_recall(&self) -> f64 {
        self.iterations.last().map_or(0.0, |i| i.recall)
    }

    pub fn final_nrd(&self) -> usize {
        self.iterations.last().map_or(0, |i| i.nrd)
    }

    /// Negatives among the reviewed documents.
    pub fn reviewed_negatives(&self, truth: &impl GroundTruth) -> usize {
        self.training_labels.keys().filter(|id| truth.truth(**id) == Some(Label::Negative)).count()
    }
}

/// Runs CAL on `corpus`.
///
/// The first batch is drawn uniformly at random and embedded in draw order.
/// Every later batch is the top of the ranking produced by an SVM trained
/// on the labels collected so far.
pub fn run_cal<T, A, B, C, R>(
    corpus: &Instance<T>,
    cfg: &CalConfig,
    alice: &A,
    bob: &B,
    court: &C,
    rng: &mut R,
) -> Result<CalRunRecord>
where
    T: Scalar,
    A: AliceOracle<T> + ?Sized,
    B: BobOracle + ?Sized,
    C: CourtOracle + ?Sized,
    R: Rng + ?Sized,
{
    if corpus.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if corpus.n_plus() == 0 {
        return Err(Error::UndefinedRecall);
    }
    let mut record = CalRunRecord::default();
    let mut reviewed: BTreeSet<DocId> = BTreeSet::new();

    for t in 0..cfg.iterations {
        if reviewed.len() == corpus.len() {
            record.truncated = true;
            break;
        }
        let (sub, degenerate) = if t == 0 {
            (seed_batch(corpus, cfg, rng)?, false)
        } else {
            let examples: Vec<(&[T], Label)> = record
                .training_labels
                .iter()
                .map(|(id, label)| (corpus.document(*id).expect("reviewed id").features.as_slice(), *label))
                .collect();
            let fit = train_linear_svm(&examples, &cfg.svm)?;
            (select_top_n(corpus, &reviewed, &fit.model, cfg.batch)?, fit.degenerate)
        };
        let outcome = cfg.subprotocol.run(&sub, alice, bob, court, rng)?;
        let requested: Vec<DocId> = sub.points().iter().map(|p| p.id).collect();
        reviewed.extend(requested.iter().copied());
        for id in &requested {
            let label = outcome.output_labels.get(id).copied().unwrap_or(Label::Negative);
            record.training_labels.insert(*id, label);
        }
        record.revealed.extend(outcome.revealed.iter().copied());
        let found = record.revealed.iter().filter(|id| corpus.truth(**id) == Some(Label::Positive)).count();
        let nrd = record.revealed.len() - found;
        record.iterations.push(CalIteration {
            iteration: t,
            requested,
            recall: found as f64 / corpus.n_plus() as f64,
            nrd,
            revealed_total: record.revealed.len(),
            training_size: record.training_labels.len(),
            degenerate_fit: degenerate,
            outcome,
        });
    }
    if record.iterations.len() < cfg.iterations {
        record.truncated = true;
    }
    Ok(record)
}

fn seed_batch<T: Scalar, R: Rng + ?Sized>(corpus: &Instance<T>, cfg: &CalConfig, rng: &mut R) -> Result<OneDimInstance<T>> {
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(rng);
    order.truncate(cfg.batch);
    if cfg.force_seed_positive && !order.iter().any(|&i| corpus.labels()[i].is_positive()) {
        let positives: Vec<usize> = (0..corpus.len()).filter(|&i| corpus.labels()[i].is_positive()).collect();
        let pick = positives[rng.random_range(0..positives.len())];
        *order.last_mut().expect("batch >= 1") = pick;
    }
    let k = order.len();
    let points = order
        .iter()
        .enumerate()
        .map(|(rank, &i)| Point {
            id: corpus.documents()[i].id,
            position: T::of((k - rank) as f64),
            label: corpus.labels()[i],
        })
        .collect();
    OneDimInstance::new(points)
}

/// Per-iteration training labels keyed by id, for comparing runs.
pub fn labels_by_iteration(record: &CalRunRecord) -> Vec<BTreeMap<DocId, Label>> {
    let mut acc = BTreeMap::new();
    record
        .iterations
        .iter()
        .map(|it| {
            for id in &it.requested {
                acc.insert(*id, record.training_labels[id]);
            }
            acc.clone()
        })
        .collect()
}
