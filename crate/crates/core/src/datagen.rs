//! Synthetic instances, the lower-bound family, and the plain-text
//! instance file format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{optimal_threshold_true, DocId, Document, Instance, Label, OneDimInstance, Threshold};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianConfig {
    pub n: usize,
    pub d: usize,
    pub positive_ratio: f64,
    pub mean_separation: f64,
    pub seed: u64,
}

impl GaussianConfig {
    pub const DEFAULT_SEPARATION: f64 = 2.0;

    pub fn new(n: usize, d: usize, positive_ratio: f64, seed: u64) -> Self {
        GaussianConfig { n, d, positive_ratio, mean_separation: Self::DEFAULT_SEPARATION, seed }
    }

    pub fn with_separation(self, mean_separation: f64) -> Self {
        GaussianConfig { mean_separation, ..self }
    }

    pub fn n_positive(&self) -> usize {
        (self.n as f64 * self.positive_ratio).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.positive_ratio > 0.0 && self.positive_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("positive ratio {} must lie in (0, 1)", self.positive_ratio)));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(self.mean_separation >= 0.0) || !self.mean_separation.is_finite() {
            return Err(Error::InvalidParameter("mean separation must be finite and >= 0".into()));
        }
        let k = self.n_positive();
        if k == 0 || k > self.n {
            return Err(Error::InvalidParameter(format!("{} documents at ratio {} give no positives", self.n, self.positive_ratio)));
        }
        Ok(())
    }
}

/// Two unit-variance Gaussian classes centred at `±(separation / 2) e_1`.
/// Labels are assigned to a uniformly shuffled set of ids `0..n`.
pub fn gaussian_mixture<T: Scalar>(cfg: &GaussianConfig) -> Result<Instance<T>> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut labels: Vec<Label> = (0..cfg.n)
        .map(|i| if i < cfg.n_positive() { Label::Positive } else { Label::Negative })
        .collect();
    labels.shuffle(&mut rng);
    let mu = cfg.mean_separation / 2.0;
    let rows = labels
        .iter()
        .map(|label| {
            (0..cfg.d)
                .map(|j| {
                    let z: f64 = rng.sample(StandardNormal);
                    let shift = if j == 0 { f64::from(label.sign()) * mu } else { 0.0 };
                    T::of(z + shift)
                })
                .collect()
        })
        .collect();
    Instance::from_rows(rows, labels)
}

/// Makes an instance linearly separable.
///
/// Uses the perpendicular bisector of the two empirical class means. Every
/// point not strictly on its own side is reflected across the bisector and
/// then pushed `epsilon` further along the normal. Other points are left
/// untouched.
pub fn enforce_realizable<T: Scalar>(inst: &Instance<T>, epsilon: T) -> Result<Instance<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let d = inst.dim();
    let mean = |label: Label| -> Option<Vec<f64>> {
        let rows = inst.class_rows(label);
        if rows.is_empty() {
            return None;
        }
        let mut m = vec![0.0; d];
        for doc in &rows {
            for (acc, v) in m.iter_mut().zip(&doc.features) {
                *acc += v.as_f64();
            }
        }
        Some(m.into_iter().map(|v| v / rows.len() as f64).collect())
    };
    let (Some(mp), Some(mn)) = (mean(Label::Positive), mean(Label::Negative)) else {
        return Ok(inst.clone());
    };
    let normal: Vec<f64> = mp.iter().zip(&mn).map(|(a, b)| a - b).collect();
    let nn: f64 = normal.iter().map(|v| v * v).sum();
    if nn == 0.0 {
        return Err(Error::NumericalDegeneracy("class means coincide; no bisector".into()));
    }
    let len = nn.sqrt();
    let centre: Vec<f64> = mp.iter().zip(&mn).map(|(a, b)| (a + b) / 2.0).collect();
    let eps = epsilon.as_f64();

    let documents = inst
        .iter()
        .map(|(doc, label)| {
            let x: Vec<f64> = doc.features.iter().map(|v| v.as_f64()).collect();
            let side: f64 = x.iter().zip(&centre).zip(&normal).map(|((xi, ci), ni)| (xi - ci) * ni).sum();
            let sign = f64::from(label.sign());
            if sign * side > 0.0 {
                return doc.clone();
            }
            let features = x
                .iter()
                .zip(&normal)
                .map(|(xi, ni)| T::of(xi - 2.0 * side / nn * ni + sign * eps * ni / len))
                .collect();
            Document { id: doc.id, features }
        })
        .collect();
    Instance::new(documents, inst.labels().to_vec())
}

/// One labeling of the lower-bound family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember<T: Scalar = f64> {
    pub instance: OneDimInstance<T>,
    pub t_star: Threshold<T>,
    pub err_star: usize,
}

/// Instances sharing positions `x_1 > ... > x_N` whose labelings force any
/// high-recall revealed set to touch every bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundFamily<T: Scalar = f64> {
    /// `buckets[0] = {x_1}`, `buckets[j] = {x_i : 2^(j-1) < i <= 2^j}`.
    pub buckets: Vec<Vec<DocId>>,
    /// `members[j - 1]` labels `buckets[0]` and `buckets[j]` positive.
    pub members: Vec<FamilyMember<T>>,
}

impl<T: Scalar> LowerBoundFamily<T> {
    pub fn n(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }
}

/// Builds the family for `n = 2^m`, `m >= 1`. Position `x_i = n - i + 1`
/// belongs to document id `i - 1`.
pub fn lower_bound_family<T: Scalar>(n: usize) -> Result<LowerBoundFamily<T>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("N = {n} must be a power of two >= 2")));
    }
    let m = n.trailing_zeros() as usize;
    let bucket_of = |i: usize| -> usize {
        // 1-based index i; bucket 0 holds i = 1 only.
        if i == 1 {
            0
        } else {
            (usize::BITS - (i - 1).leading_zeros()) as usize
        }
    };
    let mut buckets = vec![Vec::new(); m + 1];
    for i in 1..=n {
        buckets[bucket_of(i)].push(DocId(i as u64 - 1));
    }
    let positions: Vec<T> = (1..=n).map(|i| T::of((n - i + 1) as f64)).collect();
    let members = (1..=m)
        .map(|j| {
            let labels: Vec<Label> = (1..=n)
                .map(|i| {
                    let b = bucket_of(i);
                    if b == 0 || b == j {
                        Label::Positive
                    } else {
                        Label::Negative
                    }
                })
                .collect();
            let instance = OneDimInstance::from_positions(&positions, &labels)?;
            let (t_star, err_star) = optimal_threshold_true(&instance)?;
            Ok(FamilyMember { instance, t_star, err_star })
        })
        .collect::<Result<_>>()?;
    Ok(LowerBoundFamily { buckets, members })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInstanceConfig {
    pub n: usize,
    /// Fraction of documents above the clean cut.
    pub positive_fraction: f64,
    /// Documents whose label is flipped after the clean cut.
    pub flips: usize,
    pub seed: u64,
}

/// A random one-dimensional instance: uniform positions on `[0, 1)`,
/// labelled by a threshold and then corrupted by `flips` label flips, so
/// `err* <= flips`.
pub fn threshold_instance<T: Scalar>(cfg: &ThresholdInstanceConfig) -> Result<OneDimInstance<T>> {
    if cfg.n == 0 {
        return Err(Error::EmptyInstance);
    }
    if !(0.0..=1.0).contains(&cfg.positive_fraction) || cfg.flips > cfg.n {
        return Err(Error::InvalidParameter("invalid threshold instance configuration".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let positions: Vec<f64> = (0..cfg.n).map(|_| rng.random::<f64>()).collect();
    let cut = 1.0 - cfg.positive_fraction;
    let mut labels: Vec<Label> = positions.iter().map(|&x| Label::from_sign(if x >= cut { 1 } else { -1 }).unwrap()).collect();
    let mut order: Vec<usize> = (0..cfg.n).collect();
    order.shuffle(&mut rng);
    for &i in order.iter().take(cfg.flips) {
        labels[i] = labels[i].flipped();
    }
    let positions: Vec<T> = positions.into_iter().map(T::of).collect();
    OneDimInstance::from_positions(&positions, &labels)
}

/// Renders an instance in the text format read by [`parse_instance`].
pub fn format_instance<T: Scalar>(inst: &Instance<T>) -> String {
    let mut out = format!("dim={} count={}\n", inst.dim(), inst.len());
    for (doc, label) in inst.iter() {
        let _ = write!(out, "{}\t{}\t", doc.id, label);
        for (i, v) in doc.features.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut dim = None;
    let mut count = None;
    for tok in line.split_whitespace() {
        let (key, value) = tok.split_once('=')?;
        match key {
            "dim" => dim = value.parse().ok(),
            "count" => count = value.parse().ok(),
            _ => return None,
        }
    }
    Some((dim?, count?))
}

/// Parses `dim=<d> count=<n>` followed by `id<TAB>label<TAB>v1 v2 ... vd`
/// lines. Labels are `1`, `+1` or `-1`. Line numbers in errors are 1-based.
pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return Err(Error::EmptyInstance);
    };
    let (dim, count) = parse_header(header.trim()).ok_or_else(|| parse_error(hline + 1, "expected header `dim=<d> count=<n>`"))?;
    let mut documents = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut fields = line.split('\t');
        let (Some(id), Some(label), Some(values), None) = (fields.next(), fields.next(), fields.next(), fields.next()) else {
            return Err(parse_error(lineno, "expected three tab-separated fields"));
        };
        let id: u64 = id.trim().parse().map_err(|_| parse_error(lineno, format!("invalid id `{id}`")))?;
        let label = match label.trim() {
            "1" | "+1" => Label::Positive,
            "-1" => Label::Negative,
            other => return Err(parse_error(lineno, format!("invalid label `{other}`"))),
        };
        let features = values
            .split_whitespace()
            .map(|v| v.parse::<T>().map_err(|_| parse_error(lineno, format!("invalid number `{v}`"))))
            .collect::<Result<Vec<T>>>()?;
        if features.len() != dim {
            return Err(parse_error(lineno, format!("expected {dim} coordinates, found {}", features.len())));
        }
        documents.push(Document { id: DocId(id), features });
        labels.push(label);
    }
    if documents.len() != count {
        return Err(parse_error(0, format!("header announces {count} documents, file has {}", documents.len())));
    }
    Instance::new(documents, labels)
}

pub fn load_instance<T: Scalar>(path: impl AsRef<Path>) -> Result<Instance<T>> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn save_instance<T: Scalar>(inst: &Instance<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_instance(inst))?;
    Ok(())
}
