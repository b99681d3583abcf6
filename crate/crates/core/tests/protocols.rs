use ediscovery::model::{optimal_threshold_report, optimal_threshold_true, report_threshold_error, threshold_error};
use ediscovery::protocols::{
    run_classifier_report, run_label_report, run_reveal_all, sampling_constant_classifier, sampling_constant_label,
};
use ediscovery::rng::rng_from_seed;
use ediscovery::*;
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = OneDimInstance> {
    (1usize..60)
        .prop_flat_map(|n| (prop::collection::vec(0u16..200, n), prop::collection::vec(any::<bool>(), n)))
        .prop_map(|(pos, signs)| {
            let positions: Vec<f64> = pos.iter().map(|&p| f64::from(p) / 10.0).collect();
            let mut labels: Vec<Label> = signs.iter().map(|&s| if s { Label::Positive } else { Label::Negative }).collect();
            labels[0] = Label::Positive;
            OneDimInstance::from_positions(&positions, &labels).unwrap()
        })
}

fn with_script(inst: OneDimInstance, flips: &[bool]) -> (OneDimInstance, LabelReport) {
    let report = inst
        .points()
        .iter()
        .zip(flips.iter().cycle())
        .map(|(p, &f)| (p.id, if f { p.label.flipped() } else { p.label }))
        .collect();
    (inst, report)
}

fn candidates(inst: &OneDimInstance) -> Vec<Threshold> {
    let mut out = vec![Threshold::Infinite];
    out.extend(inst.points().iter().map(|p| Threshold::Finite(p.position)));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn true_optimum_is_largest_minimizer(inst in instance()) {
        let (t_star, err_star) = optimal_threshold_true(&inst).unwrap();
        prop_assert_eq!(threshold_error(&inst, t_star), err_star);
        for t in candidates(&inst) {
            let e = threshold_error(&inst, t);
            prop_assert!(e >= err_star);
            if e == err_star {
                prop_assert!(t <= t_star);
            }
        }
    }

    #[test]
    fn report_optimum_is_smallest_minimizer(inst in instance(), flips in prop::collection::vec(any::<bool>(), 1..8)) {
        let (inst, report) = with_script(inst, &flips);
        let (t_a, err_a) = optimal_threshold_report(&inst, &report).unwrap();
        prop_assert_eq!(report_threshold_error(&inst, &report, t_a).unwrap(), err_a);
        for t in candidates(&inst) {
            let e = report_threshold_error(&inst, &report, t).unwrap();
            prop_assert!(e >= err_a);
            if e == err_a {
                prop_assert!(t >= t_a);
            }
        }
    }

    #[test]
    fn reveal_all_discloses_everything(inst in instance()) {
        let out = run_reveal_all(&inst, &Bob::perfect());
        prop_assert_eq!(out.recall(&inst).unwrap(), 1.0);
        prop_assert_eq!(out.nrd(&inst), inst.n_minus());
    }

    #[test]
    fn truthful_label_report_has_full_recall(inst in instance(), seed in any::<u64>()) {
        let cfg = LabelReportConfig::new(1, 0.1).unwrap();
        let out = run_label_report(&inst, &AliceStrategy::Truthful, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(out.is_sound());
        prop_assert_eq!(out.recall(&inst).unwrap(), 1.0);
        prop_assert!(!out.full_reveal_triggered);
        for id in &out.revealed {
            prop_assert_eq!(out.output_labels.get(id).copied(), inst.truth(*id));
        }
    }

    #[test]
    fn scripted_label_report_is_sound_and_reproducible(
        inst in instance(),
        flips in prop::collection::vec(any::<bool>(), 1..8),
        seed in any::<u64>(),
    ) {
        let (inst, report) = with_script(inst, &flips);
        let alice = AliceStrategy::Scripted(report.clone());
        let cfg = LabelReportConfig::new(1, 0.05).unwrap();
        let a = run_label_report(&inst, &alice, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(seed)).unwrap();
        let b = run_label_report(&inst, &alice, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_sound());
        for (id, label) in &report {
            if label.is_positive() {
                prop_assert!(a.revealed.contains(id));
            }
        }
        if a.full_reveal_triggered {
            prop_assert_eq!(a.revealed.len(), inst.len());
        }
        prop_assert!(a.nrd(&inst) <= inst.n_minus());
    }

    #[test]
    fn classifier_report_reveals_the_positive_side(inst in instance(), t in 0u16..200, seed in any::<u64>()) {
        let t = f64::from(t) / 10.0;
        let cfg = ClassifierReportConfig::new(0.05).unwrap();
        let alice = AliceStrategy::ReportThreshold(t);
        let out = run_classifier_report(&inst, &alice, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(out.is_sound());
        for p in inst.points().iter().filter(|p| p.position >= t) {
            prop_assert!(out.revealed.contains(&p.id));
        }
        if out.full_reveal_triggered {
            prop_assert_eq!(out.recall(&inst).unwrap(), 1.0);
        }
    }

    #[test]
    fn sampling_constants_match_closed_forms(err in 0usize..50, k in 1usize..5, n in 1usize..10_000, delta in 0.001f64..0.999) {
        let c = sampling_constant_label(err, k, delta).unwrap();
        prop_assert!((c - (2.0 + 2.0 * err as f64 / k as f64) * (1.0 / delta).ln()).abs() < 1e-9 * c.max(1.0));
        let c = sampling_constant_classifier(n, delta).unwrap();
        prop_assert!((c - 2.0 * (n as f64 / delta).ln()).abs() < 1e-9 * c.max(1.0));
    }
}

#[test]
fn hidden_positive_below_the_reported_cut_forces_full_reveal() {
    let positions: Vec<f64> = (0..10).map(f64::from).collect();
    let mut labels = vec![Label::Negative; 10];
    labels[9] = Label::Positive;
    labels[8] = Label::Positive;
    labels[3] = Label::Positive;
    let inst = OneDimInstance::from_positions(&positions, &labels).unwrap();
    let mut report = inst.truth_report();
    let hidden = inst.points().iter().find(|p| p.position == 3.0).unwrap().id;
    report.insert(hidden, Label::Negative);
    let cfg = LabelReportConfig::new(1, 0.01).unwrap();
    let out = run_label_report(&inst, &AliceStrategy::Scripted(report), &Bob::perfect(), &Court, cfg, &mut rng_from_seed(0))
        .unwrap();
    assert!(out.full_reveal_triggered);
    assert_eq!(out.recall(&inst).unwrap(), 1.0);
    assert_eq!(out.court_settled.get(&hidden), Some(&Label::Positive));
}

#[test]
fn incomplete_report_is_rejected() {
    let inst = OneDimInstance::from_positions(&[0.0, 1.0], &[Label::Negative, Label::Positive]).unwrap();
    let mut report = inst.truth_report();
    report.remove(&DocId(0));
    let cfg = LabelReportConfig::new(1, 0.1).unwrap();
    let err = run_label_report(&inst, &AliceStrategy::Scripted(report), &Bob::perfect(), &Court, cfg, &mut rng_from_seed(0));
    assert!(matches!(err, Err(Error::IncompleteReport(DocId(0)))));
}

#[test]
fn f32_instances_run() {
    let inst = OneDimInstance32::from_positions(&[0.0, 0.5, 1.0], &[Label::Negative, Label::Negative, Label::Positive]).unwrap();
    let cfg = LabelReportConfig::new(1, 0.1).unwrap();
    let out = run_label_report(&inst, &AliceStrategy::Truthful, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(1)).unwrap();
    assert_eq!(out.recall(&inst).unwrap(), 1.0);
}
