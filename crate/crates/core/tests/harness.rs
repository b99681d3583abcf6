use ediscovery::datagen::{threshold_instance, ThresholdInstanceConfig};
use ediscovery::harness::figures::{nrd_ratio_series, parse_csv, summarize, to_csv, DENOMINATOR_SUFFIX};
use ediscovery::harness::verify::{classifier_nrd_bound, label_nrd_bound, lower_bound_exhaustive};
use ediscovery::harness::{format_sig, verify_bounds, Campaign, CampaignConfig, ExperimentConfig, ResultRow, Verdict};
use ediscovery::model::optimal_threshold_true;
use ediscovery::protocols::run_classifier_report;
use ediscovery::rng::rng_from_seed;
use ediscovery::*;
use proptest::prelude::*;

fn row() -> impl Strategy<Value = ResultRow> {
    ("[a-z][a-z0-9_-]{0,8}", "[a-z][a-z_/]{0,12}", 0usize..50, any::<u64>(), 0.0f64..=1.0, 0usize..10_000, any::<bool>())
        .prop_map(|(experiment, protocol, iteration, seed, recall, nrd, full_reveal)| ResultRow {
            experiment,
            protocol,
            iteration,
            seed,
            recall,
            nrd,
            full_reveal,
            ms: 0.0,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn significant_digits_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let s = format_sig(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-6 * x.abs(), "{} -> {} -> {}", x, s, back);
        prop_assert!(s.len() <= 13);
    }

    #[test]
    fn result_csv_round_trips(rows in prop::collection::vec(row(), 0..30)) {
        let csv = to_csv(&rows);
        let parsed = parse_csv(&csv).unwrap();
        prop_assert_eq!(parsed.len(), rows.len());
        prop_assert_eq!(to_csv(&parsed), csv);
        for r in &parsed {
            let original = rows.iter().find(|o| o.experiment == r.experiment && o.protocol == r.protocol
                && o.seed == r.seed && o.iteration == r.iteration).unwrap();
            prop_assert_eq!(r.nrd, original.nrd);
            prop_assert!((r.recall - original.recall).abs() <= 5e-6);
        }
    }

    #[test]
    fn summaries_bracket_their_means(rows in prop::collection::vec(row(), 1..40)) {
        for p in summarize(&rows) {
            prop_assert!(p.recall.min <= p.recall.mean + 1e-12 && p.recall.mean <= p.recall.max + 1e-12);
            prop_assert!(p.nrd.min <= p.nrd.mean + 1e-9 && p.nrd.mean <= p.nrd.max + 1e-9);
        }
    }

    #[test]
    fn config_text_round_trips(seed in any::<u64>(), trials in 1usize..100_000, delta in 0.0001f64..0.9999, timing in any::<bool>()) {
        let text = format!("seed = {seed}\n# comment\n\ntrials = {trials}\ndelta = {delta}\ntiming = {timing}\n");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.seed, Some(seed));
        prop_assert_eq!(cfg.trials, Some(trials));
        prop_assert_eq!(cfg.delta, Some(delta));
        prop_assert_eq!(cfg.timing, Some(timing));
    }

    #[test]
    fn bounds_grow_with_err_star(err in 0usize..20, n in 2usize..10_000, delta in 0.001f64..0.5) {
        prop_assert!(label_nrd_bound(err + 1, 1, n, delta) > label_nrd_bound(err, 1, n, delta));
        prop_assert!(classifier_nrd_bound(err + 1, n, delta) > classifier_nrd_bound(err, n, delta));
    }
}

#[test]
fn classifier_disclosure_bound_is_vacuous_without_errors() {
    let inst: OneDimInstance =
        threshold_instance(&ThresholdInstanceConfig { n: 200, positive_fraction: 0.3, flips: 0, seed: 8 }).unwrap();
    assert_eq!(optimal_threshold_true(&inst).unwrap().1, 0);
    assert_eq!(classifier_nrd_bound(0, inst.len(), 0.01), 0.0);
    let cfg = ClassifierReportConfig::new(0.01).unwrap();
    let out = run_classifier_report(&inst, &AliceStrategy::Truthful, &Bob::perfect(), &Court, cfg, &mut rng_from_seed(0)).unwrap();
    assert!(out.nrd(&inst) > 0, "the first walked negatives are sampled with probability one");

    let report = verify_bounds(Campaign::ClassifierNrd, &CampaignConfig { trials: Some(50), instances: 11, ..Default::default() });
    let zero_rows: Vec<_> = report.rows.iter().filter(|r| r.instance.contains("err*=0")).collect();
    assert!(!zero_rows.is_empty());
    assert!(zero_rows.iter().all(|r| r.verdict == Verdict::Skipped));
    assert!(report.all_pass());
}

#[test]
fn lower_bound_holds_exhaustively() {
    for n in [4usize, 8, 16] {
        let (missing, best_worst) = lower_bound_exhaustive(n).unwrap();
        assert_eq!(missing, 0);
        assert!(best_worst as f64 >= (n as f64).log2());
    }
    assert!(lower_bound_exhaustive(32).is_err());
}

#[test]
fn verification_reports_are_reproducible() {
    let cfg = CampaignConfig { trials: Some(200), instances: 3, root_seed: 17, ..Default::default() };
    for campaign in [Campaign::LabelRecall, Campaign::LabelNrd, Campaign::ClassifierDetection] {
        let a = verify_bounds(campaign, &cfg);
        let b = verify_bounds(campaign, &cfg);
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.count(Verdict::Fail), 0, "{a}");
    }
}

#[test]
fn ratio_series_pairs_rows_with_denominators() {
    let mk = |protocol: &str, seed: u64, nrd: usize| ResultRow {
        experiment: "e".into(),
        protocol: protocol.into(),
        iteration: 0,
        seed,
        recall: 1.0,
        nrd,
        full_reveal: false,
        ms: 0.0,
    };
    let den = format!("p{DENOMINATOR_SUFFIX}");
    let rows = vec![mk("p", 1, 2), mk(&den, 1, 4), mk("p", 2, 3), mk(&den, 2, 3), mk("p", 3, 9)];
    assert_eq!(nrd_ratio_series(&rows, "e", "p"), vec![(0, 0.75)]);
}
