mod common;

use common::{brute_force_extreme, random_point_set};
use ediscovery::hull::{extremal_points, in_convex_hull, separation_lp};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn clarkson_matches_brute_force(n in 1usize..60, d in 1usize..5, seed in any::<u64>()) {
        let pts = random_point_set(n, d, seed);
        let e = extremal_points(&pts).unwrap();
        prop_assert_eq!(&e.indices, &brute_force_extreme(&pts));
        prop_assert!(e.lp_solves <= n * (e.indices.len() + 1));
    }

    #[test]
    fn output_does_not_depend_on_order(n in 2usize..40, d in 1usize..4, seed in any::<u64>(), shift in 1usize..40) {
        let pts = random_point_set(n, d, seed);
        let mut rotated = pts.clone();
        rotated.rotate_left(shift % n);
        let a = extremal_points(&pts).unwrap().indices;
        let b: Vec<usize> = extremal_points(&rotated).unwrap().indices.iter().map(|&i| (i + shift % n) % n).collect();
        let mut b = b;
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn separation_certificates_separate(n in 1usize..30, d in 1usize..4, seed in any::<u64>()) {
        let pts = random_point_set(n + 1, d, seed);
        let (target, hull) = pts.split_last().unwrap();
        let rows: Vec<&[f64]> = hull.iter().map(Vec::as_slice).collect();
        let scale = 1.0 + pts.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let inside = in_convex_hull(target, &rows, scale).unwrap();
        match separation_lp(target, &rows).unwrap() {
            Some(cert) => {
                prop_assert!(!inside);
                let at = |x: &[f64]| x.iter().zip(&cert.v).map(|(a, b)| a * b).sum::<f64>();
                for h in &rows {
                    prop_assert!(at(target) >= at(h) + cert.margin - 1e-9);
                }
            }
            None => prop_assert!(inside),
        }
    }
}

#[test]
fn simplex_with_interior_points() {
    let mut pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    pts.push(vec![0.25, 0.25, 0.25]);
    pts.push(vec![0.5, 0.5, 0.0]);
    pts.push(vec![1.0, 0.0, 0.0]);
    let e = extremal_points(&pts).unwrap();
    assert_eq!(e.indices, vec![0, 1, 2, 3, 6]);
}

#[test]
fn malformed_input_is_rejected() {
    assert!(extremal_points(&[]).is_err());
    assert!(extremal_points(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    assert!(extremal_points(&[vec![f64::NAN]]).is_err());
}
