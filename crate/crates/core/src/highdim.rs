//! Sampling protocol for label reports in more than one dimension, with an
//! exhaustive oracle for all optimal linear classifiers at desk scale.

use rand::Rng;

use crate::critical::max_margin_classifier;
use crate::error::{Error, Result};
use crate::lp::{strict_separator, LinearProgram, LpStatus};
use crate::model::{DocId, FullRevealReason, Instance, Label, LabelReport, LinearModel, ProtocolOutcome, TranscriptEvent};
use crate::parties::{BobOracle, CourtOracle};
use crate::protocols::{sampling_constant_label, LabelReportConfig, Session};
use crate::scalar::Scalar;

pub const MAX_ORACLE_DIM: usize = 3;
pub const MAX_ORACLE_POINTS: usize = 40;

/// All classification-distinct linear classifiers of minimum error.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalClassifierSet<T = f64> {
    /// One max-margin representative per distinct labeling.
    pub classifiers: Vec<LinearModel<T>>,
    /// `labelings[i][k]` is the label `classifiers[i]` gives document `k`.
    pub labelings: Vec<Vec<Label>>,
    pub err_star: usize,
}

impl<T: Scalar> OptimalClassifierSet<T> {
    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }
}

struct Search<'a> {
    points: &'a [Vec<f64>],
    labels: Vec<Label>,
    budget: usize,
    found: Vec<Vec<Label>>,
}

impl Search<'_> {
    fn feasible(&self, assigned: &[Label]) -> Option<(Vec<f64>, f64)> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (x, l) in self.points.iter().zip(assigned) {
            match l {
                Label::Positive => pos.push(x.as_slice()),
                Label::Negative => neg.push(x.as_slice()),
            }
        }
        strict_separator(&pos, &neg).ok().flatten()
    }

    fn dfs(&mut self, assigned: &mut Vec<Label>, errors: usize, witness: &(Vec<f64>, f64)) {
        let k = assigned.len();
        if k == self.points.len() {
            self.found.push(assigned.clone());
            return;
        }
        let truth = self.labels[k];
        for label in [truth, truth.flipped()] {
            let errs = errors + usize::from(label != truth);
            if errs > self.budget {
                continue;
            }
            let (w, b) = witness;
            let margin = f64::from(label.sign()) * (w.iter().zip(&self.points[k]).map(|(a, x)| a * x).sum::<f64>() + b);
            assigned.push(label);
            if margin > 0.0 {
                self.dfs(assigned, errs, witness);
            } else if let Some(next) = self.feasible(assigned) {
                self.dfs(assigned, errs, &next);
            }
            assigned.pop();
        }
    }
}

/// Exhaustive search over linearly realizable labelings.
///
/// Labels are assigned point by point with the instance's own label tried
/// first. A partial labeling is extended only while it stays strictly
/// separable, which a linear program decides unless the parent's separator
/// already classifies the new point correctly. The error budget grows from
/// zero until some complete labeling fits, so every returned labeling is a
/// minimiser and every minimiser is returned.
pub fn enumerate_optimal_classifiers<T: Scalar>(inst: &Instance<T>) -> Result<OptimalClassifierSet<T>> {
    if inst.dim() > MAX_ORACLE_DIM || inst.len() > MAX_ORACLE_POINTS {
        return Err(Error::TooLarge(format!(
            "exhaustive oracle supports d <= {MAX_ORACLE_DIM} and n <= {MAX_ORACLE_POINTS}, got d = {} and n = {}",
            inst.dim(),
            inst.len()
        )));
    }
    let points: Vec<Vec<f64>> = inst.documents().iter().map(|d| d.features.iter().map(|v| v.as_f64()).collect()).collect();
    let mut search = Search { points: &points, labels: inst.labels().to_vec(), budget: 0, found: Vec::new() };
    let start = (vec![0.0; inst.dim()], 0.0);
    loop {
        search.dfs(&mut Vec::with_capacity(points.len()), 0, &start);
        if !search.found.is_empty() {
            break;
        }
        search.budget += 1;
    }
    let err_star = search.budget;
    let labelings = search.found;
    let classifiers = labelings
        .iter()
        .map(|labeling| representative(inst, &points, labeling))
        .collect::<Result<_>>()?;
    Ok(OptimalClassifierSet { classifiers, labelings, err_star })
}

fn representative<T: Scalar>(inst: &Instance<T>, points: &[Vec<f64>], labeling: &[Label]) -> Result<LinearModel<T>> {
    let pos: Vec<&[T]> = inst
        .documents()
        .iter()
        .zip(labeling)
        .filter(|(_, l)| l.is_positive())
        .map(|(d, _)| d.features.as_slice())
        .collect();
    let neg: Vec<&[T]> = inst
        .documents()
        .iter()
        .zip(labeling)
        .filter(|(_, l)| !l.is_positive())
        .map(|(d, _)| d.features.as_slice())
        .collect();
    if !pos.is_empty() && !neg.is_empty() {
        return max_margin_classifier(&pos, &neg);
    }
    let mut w = vec![T::zero(); inst.dim()];
    w[0] = T::one();
    let first = points.iter().map(|x| x[0]);
    if pos.is_empty() {
        let top = first.fold(f64::NEG_INFINITY, f64::max);
        LinearModel::new(w, T::of(-top - 1.0))
    } else {
        let bottom = first.fold(f64::INFINITY, f64::min);
        LinearModel::new(w, T::of(1.0 - bottom))
    }
}

/// Whether the positive side of `h_star` contains the intersection of the
/// positive sides of all `optima`.
///
/// Minimises `h_star` over that intersection with a linear program. An
/// empty intersection is vacuously contained. Documents of `inst` that fall
/// in the intersection are also checked one by one.
pub fn check_consistency<T: Scalar>(h_star: &LinearModel<T>, optima: &OptimalClassifierSet<T>, inst: &Instance<T>) -> Result<bool> {
    let d = h_star.dim();
    if optima.classifiers.iter().any(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: optima.classifiers.iter().map(|m| m.dim()).find(|&k| k != d).unwrap_or(d) });
    }
    for (doc, _) in inst.iter() {
        let inside = optima.classifiers.iter().map(|m| m.classify(&doc.features)).collect::<Result<Vec<_>>>()?;
        if inside.iter().all(|l| l.is_positive()) && !h_star.classify(&doc.features)?.is_positive() {
            return Ok(false);
        }
    }
    // Variables x = x+ - x-; maximise -h·x subject to -w_i·x <= b_i.
    let f = |v: T| v.as_f64();
    let mut c: Vec<f64> = h_star.w().iter().map(|&v| -f(v)).collect();
    c.extend(h_star.w().iter().map(|&v| f(v)));
    let mut lp = LinearProgram::new(2 * d).maximize(c)?;
    for m in &optima.classifiers {
        let mut row: Vec<f64> = m.w().iter().map(|&v| -f(v)).collect();
        row.extend(m.w().iter().map(|&v| f(v)));
        lp.less_eq(row, f(m.b()))?;
    }
    let tol = 1e-9 * (1.0 + f(h_star.b()).abs());
    Ok(match lp.solve()? {
        LpStatus::Infeasible => true,
        LpStatus::Unbounded => false,
        LpStatus::Optimal { objective, .. } => -objective + f(h_star.b()) >= -tol,
    })
}

/// What Trent does before any sampling: the documents revealed outright
/// and the ordered walk with its sampling probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan<T = f64> {
    pub optima: OptimalClassifierSet<T>,
    pub revealed: Vec<DocId>,
    /// Walk order with the distance to the nearest optimal hyperplane and
    /// the sampling probability.
    pub walk: Vec<(DocId, f64, f64)>,
    pub sampling_constant: f64,
}

pub fn sampling_plan<T: Scalar>(inst: &Instance<T>, report: &LabelReport, cfg: LabelReportConfig) -> Result<SamplingPlan<T>> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let reported: Vec<Label> = inst
        .ids()
        .map(|id| report.get(&id).copied().ok_or(Error::IncompleteReport(id)))
        .collect::<Result<_>>()?;
    let as_reported = inst.relabeled(reported.clone())?;
    let optima = enumerate_optimal_classifiers(&as_reported)?;
    let c = sampling_constant_label(optima.err_star, cfg.k(), cfg.delta())?;

    let mut revealed = Vec::new();
    let mut walk = Vec::new();
    for (k, doc) in inst.documents().iter().enumerate() {
        let any_positive = optima.labelings.iter().any(|l| l[k].is_positive());
        if reported[k].is_positive() || any_positive {
            revealed.push(doc.id);
        } else {
            let dist = optima
                .classifiers
                .iter()
                .map(|m| m.distance(&doc.features).map(|v| v.as_f64()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            walk.push((doc.id, dist, 0.0));
        }
    }
    walk.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    for (rank, entry) in walk.iter_mut().enumerate() {
        entry.2 = (c / (rank + 1) as f64).min(1.0);
    }
    Ok(SamplingPlan { optima, revealed, walk, sampling_constant: c })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighDimRun<T = f64> {
    pub outcome: ProtocolOutcome,
    pub plan: SamplingPlan<T>,
    /// Projection direction used for analysis. Defaults to the mean of the
    /// optimal normals.
    pub direction: Vec<T>,
    pub direction_overridden: bool,
}

/// Runs the sampling protocol on Alice's label `report`.
///
/// Alice-positives and every document some optimal classifier calls
/// positive go to Bob. The rest are walked by increasing distance to the
/// nearest optimal hyperplane; the `i`-th is sampled with probability
/// `min(1, c / i)`. A court-confirmed hidden positive reveals everything.
pub fn run_highdim_sampling<T, B, C, R>(
    inst: &Instance<T>,
    report: &LabelReport,
    bob: &B,
    court: &C,
    cfg: LabelReportConfig,
    direction: Option<&[T]>,
    rng: &mut R,
) -> Result<HighDimRun<T>>
where
    T: Scalar,
    B: BobOracle + ?Sized,
    C: CourtOracle + ?Sized,
    R: Rng + ?Sized,
{
    let plan = sampling_plan(inst, report, cfg)?;
    let direction_overridden = direction.is_some();
    let direction = match direction {
        Some(v) => {
            if v.len() != inst.dim() {
                return Err(Error::DimensionMismatch { expected: inst.dim(), found: v.len() });
            }
            if v.iter().all(|x| *x == T::zero()) {
                return Err(Error::ZeroVector);
            }
            v.to_vec()
        }
        None => {
            let k = T::of(plan.optima.len() as f64);
            (0..inst.dim())
                .map(|j| plan.optima.classifiers.iter().fold(T::zero(), |acc, m| acc + m.w()[j]) / k)
                .collect()
        }
    };

    let outcome = execute_sampling_plan(inst, report, &plan, bob, court, rng)?;
    Ok(HighDimRun { outcome, plan, direction, direction_overridden })
}

/// Runs one sampling pass of a precomputed plan. Trials that share an
/// instance and a report can reuse the plan.
pub fn execute_sampling_plan<T, B, C, R>(
    inst: &Instance<T>,
    report: &LabelReport,
    plan: &SamplingPlan<T>,
    bob: &B,
    court: &C,
    rng: &mut R,
) -> Result<ProtocolOutcome>
where
    T: Scalar,
    B: BobOracle + ?Sized,
    C: CourtOracle + ?Sized,
    R: Rng + ?Sized,
{
    let truth = |id: DocId| inst.labels()[inst.index_of(id).expect("known id")];
    for id in inst.ids() {
        if !report.contains_key(&id) {
            return Err(Error::IncompleteReport(id));
        }
    }
    let mut session = Session::new(bob, court);
    session.event(TranscriptEvent::ReportReceived);
    let mut output = report.clone();
    for &id in &plan.revealed {
        let settled = session.verify(id, truth(id), report[&id]);
        output.insert(id, settled);
    }
    for &(id, _, probability) in &plan.walk {
        let u: f64 = rng.random();
        if u >= probability {
            continue;
        }
        session.sample(id, probability);
        if session.reveal(id, truth(id)).is_positive() {
            let decision = session.send_to_court(id, truth(id));
            output.insert(id, decision);
            if decision.is_positive() {
                session.event(TranscriptEvent::FullReveal(FullRevealReason::HiddenPositive(id)));
                session.outcome.full_reveal_triggered = true;
                for other in inst.ids() {
                    if !session.outcome.revealed.contains(&other) {
                        let settled = session.verify(other, truth(other), report[&other]);
                        output.insert(other, settled);
                    }
                }
                break;
            }
        }
    }
    Ok(session.finish(output))
}
