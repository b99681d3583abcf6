//! Extreme points of a finite point set by Clarkson's output-sensitive
//! algorithm. Each test first solves a small convex-combination problem and
//! only asks the separation LP for a direction when the point lies outside.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus};

/// A direction `v` with `v·x_j >= v·x_i + margin` for every tested hull point.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCertificate {
    pub v: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremePoints {
    /// Indices into the input, ascending.
    pub indices: Vec<usize>,
    pub lp_solves: usize,
}

fn scale_of<'a>(points: impl Iterator<Item = &'a [f64]>) -> f64 {
    1.0 + points.flat_map(|p| p.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Looks for a hyperplane strictly separating `target` from `hull`.
///
/// Solves `max s` over `(v, t, s)` with `v·x_i <= t` on the hull points,
/// `v·target >= t + s`, `|v_l| <= 1` and `s <= 1`. The origin is feasible,
/// so the program always has an optimum. `Ok(None)` means `target` lies in
/// the convex hull of `hull` up to tolerance.
pub fn separation_lp(target: &[f64], hull: &[&[f64]]) -> Result<Option<SeparationCertificate>> {
    let d = target.len();
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if hull.is_empty() {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        return Ok(Some(SeparationCertificate { v, margin: 1.0 }));
    }
    // Variables: v+ (d), v- (d), t+, t-, s.
    let nv = 2 * d + 3;
    let mut c = vec![0.0; nv];
    c[nv - 1] = 1.0;
    let mut lp = LinearProgram::new(nv).maximize(c)?;
    for x in hull {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.len() });
        }
        let mut row = Vec::with_capacity(nv);
        row.extend_from_slice(x);
        row.extend(x.iter().map(|v| -v));
        row.extend([-1.0, 1.0, 0.0]);
        lp.less_eq(row, 0.0)?;
    }
    let mut row = Vec::with_capacity(nv);
    row.extend(target.iter().map(|v| -v));
    row.extend_from_slice(target);
    row.extend([1.0, -1.0, 1.0]);
    lp.less_eq(row, 0.0)?;
    let mut cap = vec![0.0; nv];
    cap[nv - 1] = 1.0;
    lp.less_eq(cap, 1.0)?;
    for l in 0..d {
        let mut row = vec![0.0; nv];
        row[l] = 1.0;
        row[d + l] = 1.0;
        lp.less_eq(row, 1.0)?;
    }
    match lp.solve()? {
        LpStatus::Optimal { x, objective } => {
            let tol = 1e-9 * scale_of(hull.iter().copied().chain([target]));
            if objective > tol {
                let v = (0..d).map(|l| x[l] - x[d + l]).collect();
                Ok(Some(SeparationCertificate { v, margin: objective }))
            } else {
                Ok(None)
            }
        }
        other => Err(Error::LpFailure(format!("separation problem ended as {other:?}"))),
    }
}

/// Whether `target` is a convex combination of `hull`: a feasibility
/// problem over the weights with `d + 1` equality rows, in coordinates
/// centred on `target` and divided by `scale`.
pub fn in_convex_hull(target: &[f64], hull: &[&[f64]], scale: f64) -> Result<bool> {
    let d = target.len();
    if hull.is_empty() {
        return Ok(false);
    }
    let mut lp = LinearProgram::new(hull.len()).maximize(vec![0.0; hull.len()])?;
    for l in 0..d {
        lp.equal(hull.iter().map(|x| (x[l] - target[l]) / scale).collect(), 0.0)?;
    }
    lp.equal(vec![1.0; hull.len()], 1.0)?;
    Ok(lp.solve()?.is_feasible())
}

/// Tries to find a separating direction cheaply: Gilbert's iteration towards
/// the point of `conv(hull)` nearest to `target`, stopping as soon as
/// `target - p` separates with margin above `tol`. The margin is checked
/// against every hull point, so a returned certificate is exact.
fn nearest_point_separation(target: &[f64], hull: &[&[f64]], tol: f64, max_iter: usize) -> Option<SeparationCertificate> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut p = hull[0].to_vec();
    for _ in 0..max_iter {
        let v: Vec<f64> = target.iter().zip(&p).map(|(t, q)| t - q).collect();
        let (best, top) = hull
            .iter()
            .enumerate()
            .map(|(i, x)| (i, dot(&v, x)))
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
        let norm = dot(&v, &v).sqrt();
        if norm == 0.0 {
            return None;
        }
        let margin = (dot(&v, target) - top) / norm;
        if margin > tol {
            return Some(SeparationCertificate { v: v.iter().map(|x| x / norm).collect(), margin });
        }
        let s = hull[best];
        let step: Vec<f64> = s.iter().zip(&p).map(|(a, b)| a - b).collect();
        let len2 = dot(&step, &step);
        if len2 == 0.0 {
            return None;
        }
        let alpha = (dot(&v, &step) / len2).clamp(0.0, 1.0);
        if alpha == 0.0 {
            return None;
        }
        for (q, d) in p.iter_mut().zip(&step) {
            *q += alpha * d;
        }
    }
    None
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Groups exact duplicates. Returns one representative index per distinct
/// point together with the members of its group.
fn distinct_points(points: &[Vec<f64>]) -> Vec<(usize, Vec<usize>)> {
    let mut groups: BTreeMap<Vec<u64>, (usize, Vec<usize>)> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        // +0.0 and -0.0 compare equal as points.
        let key = p.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect();
        groups.entry(key).or_insert_with(|| (i, Vec::new())).1.push(i);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_by_key(|(rep, _)| *rep);
    out
}

/// Indices of the extreme points of `points`.
///
/// Exact duplicates are collapsed first; every member of an extreme group is
/// reported. The LP counter covers every separation problem solved.
pub fn extremal_points(points: &[Vec<f64>]) -> Result<ExtremePoints> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyInstance);
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDegeneracy("non-finite coordinate".into()));
    }
    let groups = distinct_points(points);
    let reps: Vec<&[f64]> = groups.iter().map(|(r, _)| points[*r].as_slice()).collect();
    let m = reps.len();
    let scale = scale_of(reps.iter().copied());

    let start = (0..m)
        .max_by(|&a, &b| {
            reps[a][0]
                .total_cmp(&reps[b][0])
                .then_with(|| lex_cmp(reps[a], reps[b]))
                .then_with(|| b.cmp(&a))
        })
        .expect("non-empty");
    let mut in_hull = vec![false; m];
    in_hull[start] = true;
    let mut hull: Vec<usize> = vec![start];
    let mut lp_solves = 0;

    for j in 0..m {
        while !in_hull[j] {
            let hull_pts: Vec<&[f64]> = hull.iter().map(|&i| reps[i]).collect();
            lp_solves += 1;
            if in_convex_hull(reps[j], &hull_pts, scale)? {
                break;
            }
            let cert = match nearest_point_separation(reps[j], &hull_pts, 1e-9 * scale, 200) {
                Some(cert) => cert,
                None => {
                    lp_solves += 1;
                    match separation_lp(reps[j], &hull_pts)? {
                        Some(cert) => cert,
                        None => break,
                    }
                }
            };
            let score = |k: usize| reps[k].iter().zip(&cert.v).map(|(a, b)| a * b).sum::<f64>();
            let best = (0..m).filter(|&k| !in_hull[k]).map(score).fold(f64::NEG_INFINITY, f64::max);
            let tie = 1e-12 * scale;
            let k = (0..m)
                .filter(|&k| !in_hull[k] && score(k) >= best - tie)
                .max_by(|&a, &b| lex_cmp(reps[a], reps[b]).then_with(|| b.cmp(&a)))
                .expect("a point beyond the hull exists");
            in_hull[k] = true;
            hull.push(k);
        }
    }

    let mut indices: Vec<usize> = hull.iter().flat_map(|&g| groups[g].1.iter().copied()).collect();
    indices.sort_unstable();
    Ok(ExtremePoints { indices, lp_solves })
}
