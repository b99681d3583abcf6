//! Single-dimensional Label-Verification protocols run by Trent.
//!
//! Every run owns one seeded generator and draws exactly one uniform variate
//! per walked document, in walk order, whether or not the document ends up
//! sampled. Transcripts are therefore reproducible across platforms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    reported_labels, smallest_optimal_threshold, FullRevealReason, Label, LabelReport, OneDimInstance, Point, ProtocolOutcome,
    Threshold, TranscriptEvent,
};
use crate::parties::{AliceOracle, BobOracle, CourtOracle};
use crate::scalar::Scalar;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelReportConfig {
    k: usize,
    delta: f64,
}

impl LabelReportConfig {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("error tolerance k must be >= 1".into()));
        }
        check_delta(delta)?;
        Ok(LabelReportConfig { k, delta })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierReportConfig {
    delta: f64,
}

impl ClassifierReportConfig {
    pub fn new(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(ClassifierReportConfig { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `c = (2 + 2 err_A / k) ln(1/delta)`
pub fn sampling_constant_label(err_a: usize, k: usize, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("error tolerance k must be >= 1".into()));
    }
    check_delta(delta)?;
    Ok((2.0 + 2.0 * err_a as f64 / k as f64) * (1.0 / delta).ln())
}

/// `c = 2 ln(N / delta)`
pub fn sampling_constant_classifier(n: usize, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    check_delta(delta)?;
    Ok(2.0 * (n as f64 / delta).ln())
}

/// Epoch bookkeeping of the classifier-report walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierEpochState {
    pub m_plus: usize,
    pub m_minus: usize,
    pub weight: usize,
}

impl Default for ClassifierEpochState {
    fn default() -> Self {
        ClassifierEpochState { m_plus: 0, m_minus: 0, weight: 1 }
    }
}

impl ClassifierEpochState {
    fn count_negative(&mut self) {
        self.m_minus += 1;
        self.weight += 1;
    }

    fn count_confirmed_positive(&mut self) {
        self.m_plus += 1;
        self.weight = 1;
    }

    pub fn detected(&self) -> bool {
        self.m_plus > self.m_minus
    }
}

/// Trent's side of a run: reveals, Bob's answers, court referrals, and the
/// transcript.
pub(crate) struct Session<'a, B: ?Sized, C: ?Sized> {
    bob: &'a B,
    court: &'a C,
    pub(crate) outcome: ProtocolOutcome,
}

impl<'a, B: BobOracle + ?Sized, C: CourtOracle + ?Sized> Session<'a, B, C> {
    pub(crate) fn new(bob: &'a B, court: &'a C) -> Self {
        Session { bob, court, outcome: ProtocolOutcome::default() }
    }

    pub(crate) fn event(&mut self, e: TranscriptEvent) {
        self.outcome.transcript.push(e);
    }

    pub(crate) fn reveal(&mut self, id: crate::model::DocId, truth: Label) -> Label {
        if self.outcome.revealed.insert(id) {
            self.event(TranscriptEvent::Revealed(id));
        }
        self.bob.review(id, truth)
    }

    pub(crate) fn send_to_court(&mut self, id: crate::model::DocId, truth: Label) -> Label {
        let decision = self.court.settle(id, truth);
        self.outcome.court_settled.insert(id, decision);
        self.event(TranscriptEvent::SentToCourt { id, decision });
        decision
    }

    /// Reveal to Bob and settle any disagreement with Alice. Returns the
    /// label the document ends up with.
    pub(crate) fn verify(&mut self, id: crate::model::DocId, truth: Label, alice: Label) -> Label {
        let bob = self.reveal(id, truth);
        if bob != alice {
            self.send_to_court(id, truth)
        } else {
            alice
        }
    }

    pub(crate) fn sample(&mut self, id: crate::model::DocId, probability: f64) {
        self.event(TranscriptEvent::Sampled { id, probability });
    }

    pub(crate) fn finish(mut self, output_labels: LabelReport) -> ProtocolOutcome {
        self.event(TranscriptEvent::Stopped);
        self.outcome.output_labels = output_labels;
        self.outcome
    }
}

fn check_coverage<T: Scalar>(points: impl Iterator<Item = Point<T>>, report: &LabelReport) -> Result<()> {
    for p in points {
        if !report.contains_key(&p.id) {
            return Err(Error::IncompleteReport(p.id));
        }
    }
    Ok(())
}

/// Label-Verification for a full label report.
///
/// Alice-positives and everything at or above t*_A go to Bob. The remaining
/// Alice-negatives are walked downward and the i-th one is sampled with
/// probability `min(1, c / i)`. A court-confirmed hidden positive reveals the
/// whole sub-instance.
pub fn run_label_report<T, A, B, C, R>(
    inst: &OneDimInstance<T>,
    alice: &A,
    bob: &B,
    court: &C,
    cfg: LabelReportConfig,
    rng: &mut R,
) -> Result<ProtocolOutcome>
where
    T: Scalar,
    A: AliceOracle<T> + ?Sized,
    B: BobOracle + ?Sized,
    C: CourtOracle + ?Sized,
    R: Rng + ?Sized,
{
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let report = alice.label_report(inst)?;
    check_coverage(inst.points().iter().copied(), &report)?;
    let mut session = Session::new(bob, court);
    session.event(TranscriptEvent::ReportReceived);

    let labels = reported_labels(inst, &report)?;
    let (t_a, err_a) = smallest_optimal_threshold(inst, &labels);
    let c = sampling_constant_label(err_a, cfg.k, cfg.delta)?;
    let mut output = report.clone();

    let points = inst.points();
    let mut walk = Vec::new();
    for (p, &alice_label) in points.iter().zip(&labels) {
        if alice_label.is_positive() || t_a.classify(p.position).is_positive() {
            let settled = session.verify(p.id, p.label, alice_label);
            output.insert(p.id, settled);
        } else {
            walk.push(p);
        }
    }

    for (i, p) in walk.iter().enumerate() {
        let probability = (c / (i + 1) as f64).min(1.0);
        let u: f64 = rng.random();
        if u >= probability {
            continue;
        }
        session.sample(p.id, probability);
        if session.reveal(p.id, p.label).is_positive() {
            let decision = session.send_to_court(p.id, p.label);
            output.insert(p.id, decision);
            if decision.is_positive() {
                session.event(TranscriptEvent::FullReveal(FullRevealReason::HiddenPositive(p.id)));
                session.outcome.full_reveal_triggered = true;
                for (q, &alice_label) in points.iter().zip(&labels) {
                    if !session.outcome.revealed.contains(&q.id) {
                        let settled = session.verify(q.id, q.label, alice_label);
                        output.insert(q.id, settled);
                    }
                }
                break;
            }
        }
    }
    Ok(session.finish(output))
}

/// Label-Verification for a classifier report.
///
/// Everything at or above Alice's threshold goes to Bob. Below it, documents
/// are walked downward and sampled with probability `min(1, c / W)`, where
/// the weight `W` restarts at 1 after every court-confirmed positive. Once
/// confirmed positives outnumber negatives the whole region below the
/// threshold is revealed.
pub fn run_classifier_report<T, A, B, C, R>(
    inst: &OneDimInstance<T>,
    alice: &A,
    bob: &B,
    court: &C,
    cfg: ClassifierReportConfig,
    rng: &mut R,
) -> Result<ProtocolOutcome>
where
    T: Scalar,
    A: AliceOracle<T> + ?Sized,
    B: BobOracle + ?Sized,
    C: CourtOracle + ?Sized,
    R: Rng + ?Sized,
{
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let report = alice.classifier_report(inst)?;
    let t_a: Threshold<T> = report.threshold;
    let (above, below): (Vec<&Point<T>>, Vec<&Point<T>>) =
        inst.points().iter().partition(|p| t_a.classify(p.position).is_positive());
    check_coverage(above.iter().map(|p| **p), &report.labels)?;

    let mut session = Session::new(bob, court);
    session.event(TranscriptEvent::ReportReceived);
    let mut output = LabelReport::new();
    for p in &above {
        let settled = session.verify(p.id, p.label, report.labels[&p.id]);
        output.insert(p.id, settled);
    }
    for p in &below {
        output.insert(p.id, Label::Negative);
    }

    let c = sampling_constant_classifier(inst.len(), cfg.delta)?;
    let mut state = ClassifierEpochState::default();
    for p in &below {
        let probability = (c / state.weight as f64).min(1.0);
        let u: f64 = rng.random();
        if u >= probability {
            state.count_negative();
        } else {
            session.sample(p.id, probability);
            if session.reveal(p.id, p.label).is_positive() {
                let decision = session.send_to_court(p.id, p.label);
                output.insert(p.id, decision);
                if decision.is_positive() {
                    state.count_confirmed_positive();
                    session.event(TranscriptEvent::EpochReset);
                } else {
                    state.count_negative();
                }
            } else {
                state.count_negative();
            }
        }
        if state.detected() {
            session.event(TranscriptEvent::FullReveal(FullRevealReason::ClassifierNotOptimal {
                confirmed: state.m_plus,
                negatives: state.m_minus,
            }));
            session.outcome.full_reveal_triggered = true;
            for q in &below {
                if !session.outcome.revealed.contains(&q.id) && session.reveal(q.id, q.label).is_positive() {
                    let decision = session.send_to_court(q.id, q.label);
                    output.insert(q.id, decision);
                }
            }
            break;
        }
    }
    Ok(session.finish(output))
}

/// The trivial protocol: every document goes to Bob and his labels are the
/// output.
pub fn run_reveal_all<T, B>(inst: &OneDimInstance<T>, bob: &B) -> ProtocolOutcome
where
    T: Scalar,
    B: BobOracle + ?Sized,
{
    let mut outcome = ProtocolOutcome::default();
    for p in inst.points() {
        outcome.revealed.insert(p.id);
        outcome.transcript.push(TranscriptEvent::Revealed(p.id));
        outcome.output_labels.insert(p.id, bob.review(p.id, p.label));
    }
    outcome.transcript.push(TranscriptEvent::Stopped);
    outcome
}

/// The Label-Verification protocol used inside one CAL iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subprotocol {
    RevealAll,
    LabelReport(LabelReportConfig),
    ClassifierReport(ClassifierReportConfig),
}

impl Subprotocol {
    pub fn name(&self) -> &'static str {
        match self {
            Subprotocol::RevealAll => "reveal_all",
            Subprotocol::LabelReport(_) => "protocol_label",
            Subprotocol::ClassifierReport(_) => "protocol_classifier",
        }
    }

    pub fn run<T, A, B, C, R>(
        &self,
        inst: &OneDimInstance<T>,
        alice: &A,
        bob: &B,
        court: &C,
        rng: &mut R,
    ) -> Result<ProtocolOutcome>
    where
        T: Scalar,
        A: AliceOracle<T> + ?Sized,
        B: BobOracle + ?Sized,
        C: CourtOracle + ?Sized,
        R: Rng + ?Sized,
    {
        match *self {
            Subprotocol::RevealAll => Ok(run_reveal_all(inst, bob)),
            Subprotocol::LabelReport(cfg) => run_label_report(inst, alice, bob, court, cfg, rng),
            Subprotocol::ClassifierReport(cfg) => run_classifier_report(inst, alice, bob, court, cfg, rng),
        }
    }
}
