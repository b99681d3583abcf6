//! Domain types shared by every protocol: documents, instances, labels,
//! threshold classifiers, linear models, and the two outcome metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DocId(pub u64);

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Responsiveness label, stored as the integers -1 / +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_sign(sign: i64) -> Option<Label> {
        match sign {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// A label per document, as reported by a party.
pub type LabelReport = BTreeMap<DocId, Label>;

/// Read access to the hidden ground truth of a document collection.
pub trait GroundTruth {
    fn truth(&self, id: DocId) -> Option<Label>;
    fn n_plus(&self) -> usize;
    fn n_minus(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document<T: Scalar = f64> {
    pub id: DocId,
    pub features: Vec<T>,
}

/// Embedded documents with their true labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T: Scalar = f64> {
    documents: Vec<Document<T>>,
    labels: Vec<Label>,
    index: HashMap<DocId, usize>,
    dim: usize,
    n_plus: usize,
}

impl<T: Scalar> Instance<T> {
    pub fn new(documents: Vec<Document<T>>, labels: Vec<Label>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if documents.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} documents but {} labels",
                documents.len(),
                labels.len()
            )));
        }
        let dim = documents[0].features.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("feature dimension must be >= 1".into()));
        }
        let mut index = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if doc.features.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: doc.features.len() });
            }
            if doc.features.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("document {} has a non-finite feature", doc.id)));
            }
            if index.insert(doc.id, i).is_some() {
                return Err(Error::DuplicateId(doc.id));
            }
        }
        let n_plus = labels.iter().filter(|l| l.is_positive()).count();
        Ok(Instance { documents, labels, index, dim, n_plus })
    }

    /// Builds an instance from feature rows, assigning ids `0..n`.
    pub fn from_rows(rows: Vec<Vec<T>>, labels: Vec<Label>) -> Result<Self> {
        let documents = rows
            .into_iter()
            .enumerate()
            .map(|(i, features)| Document { id: DocId(i as u64), features })
            .collect();
        Instance::new(documents, labels)
    }

    pub fn documents(&self) -> &[Document<T>] {
        &self.documents
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn index_of(&self, id: DocId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn document(&self, id: DocId) -> Option<&Document<T>> {
        self.index_of(id).map(|i| &self.documents[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Document<T>, Label)> + '_ {
        self.documents.iter().zip(self.labels.iter().copied())
    }

    pub fn ids(&self) -> impl Iterator<Item = DocId> + '_ {
        self.documents.iter().map(|d| d.id)
    }

    /// Same documents under a different labeling.
    pub fn relabeled(&self, labels: Vec<Label>) -> Result<Self> {
        Instance::new(self.documents.clone(), labels)
    }

    pub fn truth_report(&self) -> LabelReport {
        self.iter().map(|(d, l)| (d.id, l)).collect()
    }

    pub fn class_rows(&self, label: Label) -> Vec<&Document<T>> {
        self.iter().filter(|(_, l)| *l == label).map(|(d, _)| d).collect()
    }
}

impl<T: Scalar> GroundTruth for Instance<T> {
    fn truth(&self, id: DocId) -> Option<Label> {
        self.index_of(id).map(|i| self.labels[i])
    }
    fn n_plus(&self) -> usize {
        self.n_plus
    }
    fn n_minus(&self) -> usize {
        self.documents.len() - self.n_plus
    }
}

/// A document embedded on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T: Scalar = f64> {
    pub id: DocId,
    pub position: T,
    pub label: Label,
}

/// Order used for every walk over a one-dimensional instance: position
/// descending, then id ascending.
pub(crate) fn walk_order<T: Scalar>(a: &Point<T>, b: &Point<T>) -> Ordering {
    b.position
        .partial_cmp(&a.position)
        .unwrap_or(Ordering::Equal)
        .then(a.id.cmp(&b.id))
}

/// A one-dimensional sub-instance. Points are stored in walk order.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDimInstance<T: Scalar = f64> {
    points: Vec<Point<T>>,
    index: HashMap<DocId, usize>,
    n_plus: usize,
}

impl<T: Scalar> OneDimInstance<T> {
    pub fn new(mut points: Vec<Point<T>>) -> Result<Self> {
        if points.iter().any(|p| !p.position.is_finite()) {
            return Err(Error::InvalidParameter("positions must be finite".into()));
        }
        points.sort_by(walk_order);
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id, i).is_some() {
                return Err(Error::DuplicateId(p.id));
            }
        }
        let n_plus = points.iter().filter(|p| p.label.is_positive()).count();
        Ok(OneDimInstance { points, index, n_plus })
    }

    /// Convenience constructor assigning ids `0..n` in the given order.
    pub fn from_positions(positions: &[T], labels: &[Label]) -> Result<Self> {
        if positions.len() != labels.len() {
            return Err(Error::InvalidParameter("positions and labels differ in length".into()));
        }
        let points = positions
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&position, &label))| Point { id: DocId(i as u64), position, label })
            .collect();
        OneDimInstance::new(points)
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: DocId) -> Option<&Point<T>> {
        self.index.get(&id).map(|&i| &self.points[i])
    }

    pub fn truth_report(&self) -> LabelReport {
        self.points.iter().map(|p| (p.id, p.label)).collect()
    }

    /// The same positions under another labeling given as a report.
    pub fn relabeled(&self, report: &LabelReport) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| {
                report
                    .get(&p.id)
                    .map(|&label| Point { label, ..*p })
                    .ok_or(Error::IncompleteReport(p.id))
            })
            .collect::<Result<Vec<_>>>()?;
        OneDimInstance::new(points)
    }
}

impl<T: Scalar> GroundTruth for OneDimInstance<T> {
    fn truth(&self, id: DocId) -> Option<Label> {
        self.point(id).map(|p| p.label)
    }
    fn n_plus(&self) -> usize {
        self.n_plus
    }
    fn n_minus(&self) -> usize {
        self.points.len() - self.n_plus
    }
}

impl<T: Scalar> TryFrom<&Instance<T>> for OneDimInstance<T> {
    type Error = Error;

    fn try_from(inst: &Instance<T>) -> Result<Self> {
        if inst.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: inst.dim() });
        }
        let points = inst
            .iter()
            .map(|(doc, label)| Point { id: doc.id, position: doc.features[0], label })
            .collect();
        OneDimInstance::new(points)
    }
}

/// A threshold classifier on the line: positive iff `x >= t`.
/// `Infinite` is the all-negative classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold<T = f64> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Threshold<T> {
    pub fn classify(&self, x: T) -> Label {
        match *self {
            Threshold::Finite(t) if x >= t => Label::Positive,
            _ => Label::Negative,
        }
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Threshold::Finite(t) => Some(t),
            Threshold::Infinite => None,
        }
    }
}

impl<T: Scalar> PartialOrd for Threshold<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Threshold::Infinite, Threshold::Infinite) => Some(Ordering::Equal),
            (Threshold::Infinite, Threshold::Finite(_)) => Some(Ordering::Greater),
            (Threshold::Finite(_), Threshold::Infinite) => Some(Ordering::Less),
            (Threshold::Finite(a), Threshold::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> fmt::Display for Threshold<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(t) => write!(f, "{t}"),
            Threshold::Infinite => write!(f, "inf"),
        }
    }
}

/// err(t) against the true labels.
pub fn threshold_error<T: Scalar>(inst: &OneDimInstance<T>, t: Threshold<T>) -> usize {
    inst.points.iter().filter(|p| t.classify(p.position) != p.label).count()
}

/// err(t) against a reported labeling. Missing ids are an error.
pub fn report_threshold_error<T: Scalar>(
    inst: &OneDimInstance<T>,
    report: &LabelReport,
    t: Threshold<T>,
) -> Result<usize> {
    let mut err = 0;
    for p in &inst.points {
        let label = *report.get(&p.id).ok_or(Error::IncompleteReport(p.id))?;
        if t.classify(p.position) != label {
            err += 1;
        }
    }
    Ok(err)
}

/// Error of every candidate threshold, from `+inf` down to the smallest
/// position. Candidates are the distinct positions plus the sentinel.
fn candidate_errors<T: Scalar>(points: &[Point<T>], label_of: impl Fn(usize) -> Label) -> Vec<(Threshold<T>, usize)> {
    let mut err = (0..points.len()).filter(|&i| label_of(i).is_positive()).count();
    let mut out = Vec::with_capacity(points.len() + 1);
    out.push((Threshold::Infinite, err));
    let mut i = 0;
    while i < points.len() {
        let pos = points[i].position;
        while i < points.len() && points[i].position == pos {
            if label_of(i).is_positive() {
                err -= 1;
            } else {
                err += 1;
            }
            i += 1;
        }
        out.push((Threshold::Finite(pos), err));
    }
    out
}

/// (t*, err*): the largest threshold minimizing the true error.
pub fn optimal_threshold_true<T: Scalar>(inst: &OneDimInstance<T>) -> Result<(Threshold<T>, usize)> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let errs = candidate_errors(&inst.points, |i| inst.points[i].label);
    let min = errs.iter().map(|e| e.1).min().expect("non-empty");
    Ok(*errs.iter().find(|e| e.1 == min).expect("minimum attained"))
}

/// (t*_A, err_A(t*_A)): the smallest threshold minimizing the error on a report.
pub fn optimal_threshold_report<T: Scalar>(
    inst: &OneDimInstance<T>,
    report: &LabelReport,
) -> Result<(Threshold<T>, usize)> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let labels = reported_labels(inst, report)?;
    Ok(smallest_optimal_threshold(inst, &labels))
}

/// Reported labels in walk order.
pub(crate) fn reported_labels<T: Scalar>(inst: &OneDimInstance<T>, report: &LabelReport) -> Result<Vec<Label>> {
    inst.points.iter().map(|p| report.get(&p.id).copied().ok_or(Error::IncompleteReport(p.id))).collect()
}

/// The smallest threshold minimizing the error against `labels`, given in
/// walk order.
pub(crate) fn smallest_optimal_threshold<T: Scalar>(inst: &OneDimInstance<T>, labels: &[Label]) -> (Threshold<T>, usize) {
    let errs = candidate_errors(&inst.points, |i| labels[i]);
    let min = errs.iter().map(|e| e.1).min().expect("non-empty");
    *errs.iter().rev().find(|e| e.1 == min).expect("minimum attained")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdAnalysis<T = f64> {
    pub t_star: Threshold<T>,
    pub t_star_a: Threshold<T>,
    pub err_star: usize,
    pub err_a_at_t_star_a: usize,
}

impl<T: Scalar> ThresholdAnalysis<T> {
    pub fn compute(inst: &OneDimInstance<T>, report: &LabelReport) -> Result<Self> {
        let (t_star, err_star) = optimal_threshold_true(inst)?;
        let (t_star_a, err_a_at_t_star_a) = optimal_threshold_report(inst, report)?;
        Ok(ThresholdAnalysis { t_star, t_star_a, err_star, err_a_at_t_star_a })
    }
}

/// `h(x) = +1` iff `w . x + b >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T = f64> {
    w: Vec<T>,
    b: T,
}

impl<T: Scalar> LinearModel<T> {
    pub fn new(w: Vec<T>, b: T) -> Result<Self> {
        if w.is_empty() || w.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        if w.iter().any(|x| !x.is_finite()) || !b.is_finite() {
            return Err(Error::InvalidParameter("model coefficients must be finite".into()));
        }
        Ok(LinearModel { w, b })
    }

    /// The 1-D threshold classifier `x >= t` as a linear model.
    pub fn threshold(t: T) -> Self {
        LinearModel { w: vec![T::one()], b: -t }
    }

    pub fn w(&self) -> &[T] {
        &self.w
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), found: x.len() });
        }
        Ok(())
    }

    /// `w . x + b`
    pub fn decision(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(dot(&self.w, x) + self.b)
    }

    pub fn classify(&self, x: &[T]) -> Result<Label> {
        Ok(if self.decision(x)? >= T::zero() { Label::Positive } else { Label::Negative })
    }

    /// Projection onto the normal, bias excluded.
    pub fn score(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(dot(&self.w, x))
    }

    /// Euclidean distance from `x` to the hyperplane.
    pub fn distance(&self, x: &[T]) -> Result<T> {
        Ok(self.decision(x)?.abs() / crate::scalar::norm(&self.w))
    }

    pub fn scaled(&self, alpha: T) -> Result<Self> {
        LinearModel::new(self.w.iter().map(|&x| x * alpha).collect(), self.b * alpha)
    }

    pub fn negated(&self) -> Self {
        LinearModel { w: self.w.iter().map(|&x| -x).collect(), b: -self.b }
    }
}

pub fn classify<T: Scalar>(model: &LinearModel<T>, x: &[T]) -> Result<Label> {
    model.classify(x)
}

/// Number of documents the model misclassifies.
pub fn classifier_error<T: Scalar>(model: &LinearModel<T>, instance: &Instance<T>) -> Result<usize> {
    let mut err = 0;
    for (doc, label) in instance.iter() {
        if model.classify(&doc.features)? != label {
            err += 1;
        }
    }
    Ok(err)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FullRevealReason {
    /// A document Alice reported negative was confirmed responsive by the court.
    HiddenPositive(DocId),
    /// More confirmed positives than negatives below the reported threshold.
    ClassifierNotOptimal { confirmed: usize, negatives: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TranscriptEvent {
    ReportReceived,
    Revealed(DocId),
    Sampled { id: DocId, probability: f64 },
    SentToCourt { id: DocId, decision: Label },
    EpochReset,
    FullReveal(FullRevealReason),
    Stopped,
}

/// Everything a protocol run produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub revealed: BTreeSet<DocId>,
    pub court_settled: BTreeMap<DocId, Label>,
    pub output_labels: BTreeMap<DocId, Label>,
    pub transcript: Vec<TranscriptEvent>,
    pub full_reveal_triggered: bool,
}

impl ProtocolOutcome {
    pub fn recall(&self, truth: &impl GroundTruth) -> Result<f64> {
        recall(self, truth)
    }

    pub fn nrd(&self, truth: &impl GroundTruth) -> usize {
        nrd(self, truth)
    }

    /// Every output positive was seen by Bob or settled by the court, and
    /// every court-settled document was revealed.
    pub fn is_sound(&self) -> bool {
        self.court_settled.keys().all(|id| self.revealed.contains(id))
            && self
                .output_labels
                .iter()
                .filter(|(_, l)| l.is_positive())
                .all(|(id, _)| self.revealed.contains(id) || self.court_settled.contains_key(id))
    }

    pub fn sampled_count(&self) -> usize {
        self.transcript.iter().filter(|e| matches!(e, TranscriptEvent::Sampled { .. })).count()
    }
}

/// Fraction of responsive documents in the revealed set.
pub fn recall(outcome: &ProtocolOutcome, truth: &impl GroundTruth) -> Result<f64> {
    let n_plus = truth.n_plus();
    if n_plus == 0 {
        return Err(Error::UndefinedRecall);
    }
    let hit = outcome.revealed.iter().filter(|&&id| truth.truth(id) == Some(Label::Positive)).count();
    Ok(hit as f64 / n_plus as f64)
}

/// Number of non-responsive documents in the revealed set.
pub fn nrd(outcome: &ProtocolOutcome, truth: &impl GroundTruth) -> usize {
    outcome.revealed.iter().filter(|&&id| truth.truth(id) == Some(Label::Negative)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn inst(pos: &[f64], labels: &[Label]) -> OneDimInstance {
        OneDimInstance::from_positions(pos, labels).unwrap()
    }

    fn fin(t: f64) -> Threshold {
        Threshold::Finite(t)
    }

    #[test]
    fn classify_uses_closed_positive_side() {
        let m = LinearModel::new(vec![1.0], 0.0).unwrap();
        assert_eq!(m.classify(&[0.0]).unwrap(), P);
        assert_eq!(m.classify(&[-3.0]).unwrap(), N);
        let m = LinearModel::new(vec![1.0, 0.0], -1.0).unwrap();
        assert_eq!(m.classify(&[2.0, 5.0]).unwrap(), P);
        assert!(matches!(m.classify(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_weight_rejected() {
        assert_eq!(LinearModel::new(vec![0.0, 0.0], 1.0), Err(Error::ZeroVector));
    }

    #[test]
    fn classifier_error_examples() {
        let x = Instance::from_rows(vec![vec![1.0], vec![2.0], vec![3.0]], vec![P, N, P]).unwrap();
        assert_eq!(classifier_error(&LinearModel::threshold(3.0), &x).unwrap(), 1);
        let all_neg = Instance::from_rows(vec![vec![1.0], vec![2.0]], vec![N, N]).unwrap();
        let everything_positive = LinearModel::new(vec![1.0], 100.0).unwrap();
        assert_eq!(classifier_error(&everything_positive, &all_neg).unwrap(), 2);
        let sep = Instance::from_rows(vec![vec![-1.0], vec![1.0]], vec![N, P]).unwrap();
        assert_eq!(classifier_error(&LinearModel::threshold(0.0), &sep).unwrap(), 0);
    }

    #[test]
    fn threshold_error_examples() {
        let a = inst(&[1., 2., 3., 4.], &[N, N, P, P]);
        assert_eq!(threshold_error(&a, fin(3.0)), 0);
        assert_eq!(threshold_error(&a, Threshold::Infinite), 2);
        let b = inst(&[1., 2., 3.], &[P, N, P]);
        assert_eq!(threshold_error(&b, fin(2.0)), 2);
    }

    #[test]
    fn optimal_threshold_examples() {
        assert_eq!(optimal_threshold_true(&inst(&[1., 2., 3., 4.], &[N, N, P, P])).unwrap(), (fin(3.0), 0));
        assert_eq!(optimal_threshold_true(&inst(&[5., 7.], &[P, P])).unwrap(), (fin(5.0), 0));
        assert_eq!(optimal_threshold_true(&inst(&[1., 2., 3.], &[P, N, P])).unwrap(), (fin(3.0), 1));
        let empty = OneDimInstance::<f64>::new(vec![]).unwrap();
        assert_eq!(optimal_threshold_true(&empty), Err(Error::EmptyInstance));
    }

    #[test]
    fn optimal_report_threshold_examples() {
        let a = inst(&[1., 2., 3., 4.], &[N, N, P, P]);
        assert_eq!(optimal_threshold_report(&a, &a.truth_report()).unwrap(), (fin(3.0), 0));
        let b = inst(&[1., 2., 3.], &[P, N, P]);
        assert_eq!(optimal_threshold_report(&b, &b.truth_report()).unwrap(), (fin(1.0), 1));
        let all_neg: LabelReport = b.points().iter().map(|p| (p.id, N)).collect();
        assert_eq!(optimal_threshold_report(&b, &all_neg).unwrap(), (Threshold::Infinite, 0));
        let mut partial = b.truth_report();
        partial.remove(&DocId(1));
        assert_eq!(optimal_threshold_report(&b, &partial), Err(Error::IncompleteReport(DocId(1))));
    }

    #[test]
    fn duplicate_positions_are_distinct_documents() {
        let a = inst(&[2., 2., 1.], &[P, N, N]);
        assert_eq!(a.len(), 3);
        assert_eq!(threshold_error(&a, fin(2.0)), 1);
        assert_eq!(optimal_threshold_true(&a).unwrap(), (Threshold::Infinite, 1));
        // walk order breaks ties by ascending id
        assert_eq!(a.points()[0].id, DocId(0));
        assert_eq!(a.points()[1].id, DocId(1));
    }

    #[test]
    fn recall_and_nrd_examples() {
        let labels: Vec<Label> = (0..14).map(|i| if i < 4 { P } else { N }).collect();
        let rows = (0..14).map(|i| vec![i as f64]).collect();
        let x = Instance::from_rows(rows, labels).unwrap();
        let mut out = ProtocolOutcome::default();
        assert_eq!(out.recall(&x).unwrap(), 0.0);
        out.revealed.extend((0..3).chain(4..11).map(DocId));
        assert_eq!(out.recall(&x).unwrap(), 0.75);
        assert_eq!(out.nrd(&x), 7);
        out.revealed.extend((0..14).map(DocId));
        assert_eq!(out.recall(&x).unwrap(), 1.0);
        assert_eq!(out.nrd(&x), 10);

        let none = Instance::from_rows(vec![vec![0.0]], vec![N]).unwrap();
        assert_eq!(out.recall(&none), Err(Error::UndefinedRecall));
    }

    #[test]
    fn instance_validation() {
        let docs = vec![
            Document { id: DocId(1), features: vec![0.0] },
            Document { id: DocId(1), features: vec![1.0] },
        ];
        assert_eq!(Instance::new(docs, vec![P, N]), Err(Error::DuplicateId(DocId(1))));
        let docs = vec![
            Document { id: DocId(1), features: vec![0.0] },
            Document { id: DocId(2), features: vec![1.0, 2.0] },
        ];
        assert!(matches!(Instance::new(docs, vec![P, N]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(Instance::<f64>::new(vec![], vec![]), Err(Error::EmptyInstance));
    }

    #[test]
    fn generic_over_f32() {
        let a = OneDimInstance::<f32>::from_positions(&[1., 2., 3., 4.], &[N, N, P, P]).unwrap();
        assert_eq!(optimal_threshold_true(&a).unwrap(), (Threshold::Finite(3.0f32), 0));
    }
}
