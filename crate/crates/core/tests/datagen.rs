use ediscovery::datagen::*;
use ediscovery::lp::strict_separator;
use ediscovery::model::optimal_threshold_true;
use ediscovery::*;
use proptest::prelude::*;

fn rows(inst: &Instance, label: Label) -> Vec<&[f64]> {
    inst.class_rows(label).into_iter().map(|d| d.features.as_slice()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_counts_and_reproducibility(n in 10usize..300, d in 1usize..8, ratio in 0.05f64..0.9, seed in any::<u64>()) {
        let gen = GaussianConfig::new(n, d, ratio, seed);
        let a = gaussian_mixture::<f64>(&gen).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(a.dim(), d);
        prop_assert_eq!(a.n_plus(), gen.n_positive());
        let mut ids: Vec<u64> = a.ids().map(|id| id.0).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..n as u64).collect::<Vec<_>>());
        prop_assert_eq!(&a, &gaussian_mixture::<f64>(&gen).unwrap());
    }

    #[test]
    fn enforce_realizable_separates_and_keeps_labels(n in 10usize..200, d in 1usize..6, seed in any::<u64>()) {
        let raw = gaussian_mixture::<f64>(&GaussianConfig::new(n, d, 0.3, seed).with_separation(0.5)).unwrap();
        let fixed = enforce_realizable(&raw, 1e-2).unwrap();
        prop_assert_eq!(raw.labels(), fixed.labels());
        prop_assert!(strict_separator(&rows(&fixed, Label::Positive), &rows(&fixed, Label::Negative)).unwrap().is_some());
        prop_assert!(raw.ids().eq(fixed.ids()));
    }

    #[test]
    fn text_format_round_trips(n in 1usize..50, d in 1usize..5, seed in any::<u64>()) {
        let inst = gaussian_mixture::<f64>(&GaussianConfig::new(n.max(2), d, 0.5, seed)).unwrap();
        prop_assert_eq!(parse_instance::<f64>(&format_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn threshold_instances_respect_the_flip_budget(n in 1usize..300, frac in 0.0f64..1.0, flips in 0usize..20, seed in any::<u64>()) {
        let flips = flips.min(n);
        let inst = threshold_instance::<f64>(&ThresholdInstanceConfig { n, positive_fraction: frac, flips, seed }).unwrap();
        prop_assert_eq!(inst.len(), n);
        prop_assert!(optimal_threshold_true(&inst).unwrap().1 <= flips);
    }
}

#[test]
fn lower_bound_family_structure() {
    for m in 1..=5usize {
        let n = 1 << m;
        let fam = lower_bound_family::<f64>(n).unwrap();
        assert_eq!(fam.n(), n);
        assert_eq!(fam.buckets.len(), m + 1);
        assert_eq!(fam.members.len(), m);
        for (j, member) in fam.members.iter().enumerate() {
            let positives: Vec<DocId> =
                member.instance.points().iter().filter(|p| p.label.is_positive()).map(|p| p.id).collect();
            let mut expected: Vec<DocId> = fam.buckets[0].iter().chain(&fam.buckets[j + 1]).copied().collect();
            expected.sort_unstable();
            let mut positives = positives;
            positives.sort_unstable();
            assert_eq!(positives, expected);
            assert_eq!(optimal_threshold_true(&member.instance).unwrap(), (member.t_star, member.err_star));
        }
    }
    assert!(lower_bound_family::<f64>(12).is_err());
    assert!(lower_bound_family::<f64>(1).is_err());
}

#[test]
fn instance_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("ediscovery-datagen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inst.txt");
    let inst = gaussian_mixture::<f64>(&GaussianConfig::new(30, 3, 0.2, 4)).unwrap();
    save_instance(&inst, &path).unwrap();
    assert_eq!(load_instance::<f64>(&path).unwrap(), inst);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn invalid_generator_parameters_are_rejected() {
    assert!(gaussian_mixture::<f64>(&GaussianConfig::new(10, 2, 0.0, 1)).is_err());
    assert!(gaussian_mixture::<f64>(&GaussianConfig::new(10, 0, 0.5, 1)).is_err());
    assert!(gaussian_mixture::<f64>(&GaussianConfig::new(10, 2, 0.5, 1).with_separation(f64::NAN)).is_err());
    assert!(parse_instance::<f64>("garbage").is_err());
}
