//! Linear SVM trained by full-batch subgradient descent on the
//! L2-regularised average hinge loss.

use crate::error::{Error, Result};
use crate::model::{Label, LinearModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub regularization: f64,
    pub epochs: usize,
    /// Initial step size.
    pub eta0: f64,
    /// Step size at epoch `t` is `eta0 / (1 + decay * t)`.
    pub decay: f64,
    /// Recorded with each run. Full-batch training draws no random numbers.
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { regularization: 1e-2, epochs: 200, eta0: 1.0, decay: 0.05, seed: 0 }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.regularization > 0.0) || !self.regularization.is_finite() {
            return Err(Error::InvalidParameter("regularization must be positive".into()));
        }
        if !(self.eta0 > 0.0) || !(self.decay >= 0.0) {
            return Err(Error::InvalidParameter("step schedule must have eta0 > 0 and decay >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit<T = f64> {
    pub model: LinearModel<T>,
    /// Set when the data had a single class and the model is the fallback
    /// mean-direction separator.
    pub degenerate: bool,
    /// Objective before training followed by its value after every epoch.
    pub objective_trace: Vec<f64>,
}

struct Problem {
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    lambda: f64,
}

impl Problem {
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let hinge: f64 = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
            .sum();
        0.5 * self.lambda * dot(w, w) + hinge / self.xs.len() as f64
    }

    fn subgradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.xs.len() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| self.lambda * v).collect();
        let mut gb = 0.0;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            if y * (dot(w, x) + b) < 1.0 {
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g -= y * xi / n;
                }
                gb -= y / n;
            }
        }
        (gw, gb)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Trains from the zero vector. A step that would increase the objective is
/// halved until it does not; if no halving helps the epoch leaves the model
/// unchanged, so the objective trace never increases.
pub fn train_linear_svm<T: Scalar>(examples: &[(&[T], Label)], cfg: &SvmConfig) -> Result<SvmFit<T>> {
    cfg.validate()?;
    let Some((first, _)) = examples.first() else {
        return Err(Error::EmptyInstance);
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::InvalidParameter("examples must have dimension >= 1".into()));
    }
    if let Some((x, _)) = examples.iter().find(|(x, _)| x.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    let xs: Vec<Vec<f64>> = examples.iter().map(|(x, _)| x.iter().map(|v| v.as_f64()).collect()).collect();
    let ys: Vec<f64> = examples.iter().map(|(_, y)| f64::from(y.sign())).collect();

    let all_same = ys.iter().all(|&y| y == ys[0]);
    if all_same {
        return degenerate_fit(&xs, examples[0].1);
    }

    let problem = Problem { xs, ys, lambda: cfg.regularization };
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut current = problem.objective(&w, b);
    let mut trace = Vec::with_capacity(cfg.epochs + 1);
    trace.push(current);
    for t in 0..cfg.epochs {
        let (gw, gb) = problem.subgradient(&w, b);
        let mut eta = cfg.eta0 / (1.0 + cfg.decay * t as f64);
        for _ in 0..40 {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - eta * gi).collect();
            let b_new = b - eta * gb;
            let value = problem.objective(&w_new, b_new);
            if value <= current {
                w = w_new;
                b = b_new;
                current = value;
                break;
            }
            eta /= 2.0;
        }
        trace.push(current);
    }
    if w.iter().all(|&v| v == 0.0) {
        let mut fit = mean_difference_fit(&problem)?;
        fit.objective_trace = trace;
        return Ok(fit);
    }
    let model = LinearModel::new(w.into_iter().map(T::of).collect(), T::of(b))?;
    Ok(SvmFit { model, degenerate: false, objective_trace: trace })
}

fn mean_of(xs: &[&Vec<f64>], d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    for x in xs {
        for (a, v) in m.iter_mut().zip(x.iter()) {
            *a += v;
        }
    }
    m.iter().map(|v| v / xs.len().max(1) as f64).collect()
}

/// Used when training ends at `w = 0`: separates along the difference of
/// the class means.
fn mean_difference_fit<T: Scalar>(p: &Problem) -> Result<SvmFit<T>> {
    let d = p.xs[0].len();
    let pos: Vec<&Vec<f64>> = p.xs.iter().zip(&p.ys).filter(|(_, &y)| y > 0.0).map(|(x, _)| x).collect();
    let neg: Vec<&Vec<f64>> = p.xs.iter().zip(&p.ys).filter(|(_, &y)| y < 0.0).map(|(x, _)| x).collect();
    let mp = mean_of(&pos, d);
    let mn = mean_of(&neg, d);
    let mut w: Vec<f64> = mp.iter().zip(&mn).map(|(a, b)| a - b).collect();
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let centre: Vec<f64> = mp.iter().zip(&mn).map(|(a, b)| (a + b) / 2.0).collect();
    let b = -dot(&w, &centre);
    let model = LinearModel::new(w.into_iter().map(T::of).collect(), T::of(b))?;
    Ok(SvmFit { model, degenerate: true, objective_trace: Vec::new() })
}

/// Single-class data. For positives `w` is the class mean direction; for
/// negatives it is the opposite direction, so that scores still rank
/// documents unlike the reviewed negatives first. `b` puts every input on
/// its labelled side.
fn degenerate_fit<T: Scalar>(xs: &[Vec<f64>], label: Label) -> Result<SvmFit<T>> {
    let d = xs[0].len();
    let refs: Vec<&Vec<f64>> = xs.iter().collect();
    let mut w = mean_of(&refs, d);
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let b = match label {
        Label::Positive => -xs.iter().map(|x| dot(&w, x)).fold(f64::INFINITY, f64::min),
        Label::Negative => {
            w.iter_mut().for_each(|v| *v = -*v);
            -xs.iter().map(|x| dot(&w, x)).fold(f64::NEG_INFINITY, f64::max) - 1.0
        }
    };
    let model = LinearModel::new(w.into_iter().map(T::of).collect(), T::of(b))?;
    Ok(SvmFit { model, degenerate: true, objective_trace: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Label::{Negative as N, Positive as P};

    fn toy() -> Vec<(Vec<f64>, Label)> {
        vec![
            (vec![2.0, 2.0], P),
            (vec![3.0, 1.5], P),
            (vec![-1.0, -2.0], N),
            (vec![-2.0, -0.5], N),
        ]
    }

    fn view(data: &[(Vec<f64>, Label)]) -> Vec<(&[f64], Label)> {
        data.iter().map(|(x, y)| (x.as_slice(), *y)).collect()
    }

    #[test]
    fn separable_toy_has_no_training_errors() {
        let data = toy();
        let fit = train_linear_svm(&view(&data), &SvmConfig::default()).unwrap();
        assert!(!fit.degenerate);
        for (x, y) in &data {
            assert_eq!(fit.model.classify(x).unwrap(), *y);
        }
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn duplicated_data_gives_same_model() {
        let data = toy();
        let doubled: Vec<_> = data.iter().chain(data.iter()).cloned().collect();
        let a = train_linear_svm(&view(&data), &SvmConfig::default()).unwrap().model;
        let b = train_linear_svm(&view(&doubled), &SvmConfig::default()).unwrap().model;
        for (x, y) in a.w().iter().zip(b.w()) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((a.b() - b.b()).abs() < 1e-9);
    }

    #[test]
    fn flipped_labels_negate_the_model() {
        let data = toy();
        let flipped: Vec<_> = data.iter().map(|(x, y)| (x.clone(), y.flipped())).collect();
        let a = train_linear_svm(&view(&data), &SvmConfig::default()).unwrap().model;
        let b = train_linear_svm(&view(&flipped), &SvmConfig::default()).unwrap().model;
        for (x, y) in a.w().iter().zip(b.w()) {
            assert!((x + y).abs() < 1e-9);
        }
        assert!((a.b() + b.b()).abs() < 1e-9);
    }

    #[test]
    fn single_class_is_degenerate() {
        let pos = vec![(vec![1.0, 0.0], P), (vec![2.0, 1.0], P)];
        let fit = train_linear_svm(&view(&pos), &SvmConfig::default()).unwrap();
        assert!(fit.degenerate);
        assert!(pos.iter().all(|(x, _)| fit.model.classify(x).unwrap() == P));
        let neg = vec![(vec![1.0, 0.0], N), (vec![2.0, 1.0], N)];
        let fit = train_linear_svm(&view(&neg), &SvmConfig::default()).unwrap();
        assert!(neg.iter().all(|(x, _)| fit.model.classify(x).unwrap() == N));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(train_linear_svm::<f64>(&[], &SvmConfig::default()).is_err());
        let cfg = SvmConfig { regularization: 0.0, ..SvmConfig::default() };
        let data = toy();
        assert!(train_linear_svm(&view(&data), &cfg).is_err());
    }
}
