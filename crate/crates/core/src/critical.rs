//! Critical points of a realizable instance: the negatives whose label can
//! be flipped to positive while the instance stays linearly separable.
//!
//! The fast path maps every document through a fractional linear map that
//! sends the max-margin hyperplane to infinity. A negative is critical
//! exactly when its image is an extreme point of the mapped set.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hull::extremal_points;
use crate::linalg::{householder_completion, Matrix};
use crate::lp::strict_separator;
use crate::model::{DocId, Instance, Label, LinearModel};
use crate::scalar::Scalar;

const MARGIN_QUALITY: f64 = 0.995;
const MAX_MARGIN_ITERATIONS: usize = 200_000;
const MIN_DENOMINATOR: f64 = 1e-9;

fn to_f64<T: Scalar>(rows: &[&[T]]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hard-margin separator with `w·x + b >= 1` on `positives` and `<= -1` on
/// `negatives`.
///
/// Separability is decided by a linear program. The separator itself comes
/// from the closest pair of points of the two convex hulls, found by
/// pairwise mass transfer between hull vertices and stopped once the
/// certified margin is within half a percent of the current hull distance.
pub fn max_margin_classifier<T: Scalar>(positives: &[&[T]], negatives: &[&[T]]) -> Result<LinearModel<T>> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::InvalidParameter("both classes must be non-empty".into()));
    }
    let pos = to_f64(positives);
    let neg = to_f64(negatives);
    let d = pos[0].len();
    if let Some(r) = pos.iter().chain(&neg).find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: r.len() });
    }
    let pr: Vec<&[f64]> = pos.iter().map(Vec::as_slice).collect();
    let nr: Vec<&[f64]> = neg.iter().map(Vec::as_slice).collect();
    let Some((lp_w, lp_b)) = strict_separator(&pr, &nr)? else {
        return Err(Error::NotRealizable);
    };

    let w = closest_hull_direction(&pos, &neg);
    let (w, b) = match normalize_margin(&w, &pos, &neg) {
        Some(wb) => wb,
        None => (lp_w, lp_b),
    };
    LinearModel::new(w.into_iter().map(T::of).collect(), T::of(b))
}

/// Direction `p - q` between approximately closest points of the two hulls.
fn closest_hull_direction(pos: &[Vec<f64>], neg: &[Vec<f64>]) -> Vec<f64> {
    let d = pos[0].len();
    let mut alpha = vec![1.0 / pos.len() as f64; pos.len()];
    let mut beta = vec![1.0 / neg.len() as f64; neg.len()];
    let combo = |set: &[Vec<f64>], wts: &[f64]| {
        let mut out = vec![0.0; d];
        for (x, &a) in set.iter().zip(wts) {
            for (o, v) in out.iter_mut().zip(x) {
                *o += a * v;
            }
        }
        out
    };
    let mut p = combo(pos, &alpha);
    let mut q = combo(neg, &beta);
    for it in 0..MAX_MARGIN_ITERATIONS {
        if it % 1000 == 999 {
            p = combo(pos, &alpha);
            q = combo(neg, &beta);
        }
        let w: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
        let ww = dot(&w, &w);
        if ww == 0.0 {
            break;
        }
        let sp: Vec<f64> = pos.iter().map(|x| dot(&w, x)).collect();
        let sn: Vec<f64> = neg.iter().map(|x| dot(&w, x)).collect();
        let (i_add, &min_p) = sp.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let (j_add, &max_n) = sn.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let lower = (min_p - max_n) / ww.sqrt();
        if lower >= MARGIN_QUALITY * ww.sqrt() {
            break;
        }
        let (i_del, &max_p) = sp
            .iter()
            .enumerate()
            .filter(|(i, _)| alpha[*i] > 0.0)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let (j_del, &min_n) = sn
            .iter()
            .enumerate()
            .filter(|(j, _)| beta[*j] > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let gap_p = max_p - min_p;
        let gap_n = max_n - min_n;
        if gap_p <= 0.0 && gap_n <= 0.0 {
            break;
        }
        if gap_p >= gap_n {
            let delta: Vec<f64> = pos[i_add].iter().zip(&pos[i_del]).map(|(a, b)| a - b).collect();
            let dd = dot(&delta, &delta);
            if dd == 0.0 {
                break;
            }
            let t = (gap_p / dd).min(alpha[i_del]);
            alpha[i_del] -= t;
            alpha[i_add] += t;
            for (pv, dv) in p.iter_mut().zip(&delta) {
                *pv += t * dv;
            }
        } else {
            let delta: Vec<f64> = neg[j_add].iter().zip(&neg[j_del]).map(|(a, b)| a - b).collect();
            let dd = dot(&delta, &delta);
            if dd == 0.0 {
                break;
            }
            let t = (gap_n / dd).min(beta[j_del]);
            beta[j_del] -= t;
            beta[j_add] += t;
            for (qv, dv) in q.iter_mut().zip(&delta) {
                *qv += t * dv;
            }
        }
    }
    p.iter().zip(&q).map(|(a, b)| a - b).collect()
}

/// Rescales a separating direction to the canonical hard-margin form.
fn normalize_margin(w: &[f64], pos: &[Vec<f64>], neg: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let min_p = pos.iter().map(|x| dot(w, x)).fold(f64::INFINITY, f64::min);
    let max_n = neg.iter().map(|x| dot(w, x)).fold(f64::NEG_INFINITY, f64::max);
    let gap = min_p - max_n;
    if !(gap > 0.0) || !gap.is_finite() {
        return None;
    }
    let scale = 2.0 / gap;
    let w: Vec<f64> = w.iter().map(|v| v * scale).collect();
    let b = -(min_p + max_n) / 2.0 * scale;
    Some((w, b))
}

/// Orthogonal matrix whose first column is `(b, w) / |(b, w)|`.
pub fn orthogonal_completion<T: Scalar>(w: &[T], b: T) -> Result<Matrix<T>> {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.push(b);
    v.extend_from_slice(w);
    householder_completion(&v)
}

/// Fractional linear map sending the hyperplane `w·x + b = 0` to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap<T = f64> {
    u: Matrix<T>,
}

impl<T: Scalar> ProjectiveMap<T> {
    pub fn new(model: &LinearModel<T>) -> Result<Self> {
        Ok(ProjectiveMap { u: orthogonal_completion(model.w(), model.b())? })
    }

    pub fn from_matrix(u: Matrix<T>) -> Result<Self> {
        if u.rows() != u.cols() || u.rows() < 2 {
            return Err(Error::InvalidParameter("projective map needs a square matrix of size >= 2".into()));
        }
        Ok(ProjectiveMap { u })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.rows() - 1
    }

    /// `[1 | x] · U`
    pub fn lift(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        let n = self.u.rows();
        Ok((0..n)
            .map(|j| (0..n).fold(T::zero(), |acc, i| acc + if i == 0 { T::one() } else { x[i - 1] } * self.u[(i, j)]))
            .collect())
    }

    /// Equals `(b + w·x) / |(b, w)|` for the model the map was built from.
    pub fn denominator(&self, x: &[T]) -> Result<T> {
        Ok(self.lift(x)?[0])
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        let row = self.lift(x)?;
        if row[0].abs().as_f64() < MIN_DENOMINATOR {
            return Err(Error::NumericalDegeneracy(
                "point lies on the separating hyperplane; use a classifier with a larger margin".into(),
            ));
        }
        Ok(row[1..].iter().map(|&v| v / row[0]).collect())
    }
}

/// Maps the negatives and then the positives, in that order.
pub fn apply_projective_map<T: Scalar>(negatives: &[&[T]], positives: &[&[T]], u: &Matrix<T>) -> Result<Vec<Vec<T>>> {
    let map = ProjectiveMap::from_matrix(u.clone())?;
    negatives.iter().chain(positives).map(|x| map.apply(x)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoints<T = f64> {
    pub ids: BTreeSet<DocId>,
    pub lp_solves: usize,
    pub separator: LinearModel<T>,
}

type ClassRows<'a, T> = Vec<(DocId, &'a [T])>;

/// (negatives, positives).
fn split_classes<T: Scalar>(inst: &Instance<T>) -> (ClassRows<'_, T>, ClassRows<'_, T>) {
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (doc, label) in inst.iter() {
        match label {
            Label::Negative => neg.push((doc.id, doc.features.as_slice())),
            Label::Positive => pos.push((doc.id, doc.features.as_slice())),
        }
    }
    (neg, pos)
}

/// Negatives that share their exact feature vector with another negative.
/// Flipping one of them leaves an identical negative behind, so none of them
/// can be critical.
fn duplicated<T: Scalar>(neg: &[(DocId, &[T])]) -> BTreeSet<DocId> {
    let mut seen: BTreeMap<Vec<u64>, Vec<DocId>> = BTreeMap::new();
    for (id, x) in neg {
        let key = x.iter().map(|v| if v.as_f64() == 0.0 { 0 } else { v.as_f64().to_bits() }).collect();
        seen.entry(key).or_default().push(*id);
    }
    seen.into_values().filter(|ids| ids.len() > 1).flatten().collect()
}

/// Critical points via the projective map and Clarkson's algorithm.
pub fn critical_points_fast<T: Scalar>(inst: &Instance<T>) -> Result<CriticalPoints<T>> {
    let (neg, pos) = split_classes(inst);
    let neg_rows: Vec<&[T]> = neg.iter().map(|(_, x)| *x).collect();
    let pos_rows: Vec<&[T]> = pos.iter().map(|(_, x)| *x).collect();
    let separator = if pos.is_empty() {
        let top = neg_rows.iter().map(|x| x[0]).fold(T::neg_infinity(), T::max);
        let mut w = vec![T::zero(); inst.dim()];
        w[0] = T::one();
        LinearModel::new(w, -(top + T::one()))?
    } else if neg.is_empty() {
        let bottom = pos_rows.iter().map(|x| x[0]).fold(T::infinity(), T::min);
        let mut w = vec![T::zero(); inst.dim()];
        w[0] = T::one();
        let separator = LinearModel::new(w, T::one() - bottom)?;
        return Ok(CriticalPoints { ids: BTreeSet::new(), lp_solves: 0, separator });
    } else {
        max_margin_classifier(&pos_rows, &neg_rows)?
    };
    let map = ProjectiveMap::new(&separator)?;
    let mapped: Vec<Vec<f64>> = neg_rows
        .iter()
        .chain(&pos_rows)
        .map(|x| map.apply(x).map(|r| r.iter().map(|v| v.as_f64()).collect()))
        .collect::<Result<_>>()?;
    let hull = extremal_points(&mapped)?;
    let dups = duplicated(&neg);
    let ids = hull
        .indices
        .iter()
        .filter(|&&i| i < neg.len())
        .map(|&i| neg[i].0)
        .filter(|id| !dups.contains(id))
        .collect();
    Ok(CriticalPoints { ids, lp_solves: hull.lp_solves, separator })
}

/// Critical points by definition: one separability program per negative.
pub fn critical_points_naive<T: Scalar>(inst: &Instance<T>) -> Result<BTreeSet<DocId>> {
    let (neg, pos) = split_classes(inst);
    let neg_f: Vec<Vec<f64>> = to_f64(&neg.iter().map(|(_, x)| *x).collect::<Vec<_>>());
    let pos_f: Vec<Vec<f64>> = to_f64(&pos.iter().map(|(_, x)| *x).collect::<Vec<_>>());
    let pos_rows: Vec<&[f64]> = pos_f.iter().map(Vec::as_slice).collect();
    let neg_rows: Vec<&[f64]> = neg_f.iter().map(Vec::as_slice).collect();
    if strict_separator(&pos_rows, &neg_rows)?.is_none() {
        return Err(Error::NotRealizable);
    }
    let flags: Vec<bool> = (0..neg.len())
        .into_par_iter()
        .map(|i| {
            let mut p = pos_rows.clone();
            p.push(neg_rows[i]);
            let n: Vec<&[f64]> = neg_rows.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, r)| *r).collect();
            strict_separator(&p, &n).map(|s| s.is_some())
        })
        .collect::<Result<_>>()?;
    Ok(neg.iter().zip(flags).filter(|(_, f)| *f).map(|((id, _), _)| *id).collect())
}
