use std::collections::BTreeSet;

use ediscovery::cal::{run_cal, select_top_n, CalConfig};
use ediscovery::datagen::{gaussian_mixture, GaussianConfig};
use ediscovery::protocols::Subprotocol;
use ediscovery::rng::rng_from_seed;
use ediscovery::*;
use proptest::prelude::*;

fn corpus(n: usize, d: usize, seed: u64) -> Instance {
    gaussian_mixture::<f64>(&GaussianConfig::new(n, d, 0.1, seed)).unwrap()
}

fn subprotocols() -> [Subprotocol; 3] {
    [
        Subprotocol::RevealAll,
        Subprotocol::LabelReport(LabelReportConfig::new(1, 0.05).unwrap()),
        Subprotocol::ClassifierReport(ClassifierReportConfig::new(0.05).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cumulative_metrics_never_decrease(seed in any::<u64>(), which in 0usize..3) {
        let inst = corpus(300, 3, seed);
        let cfg = CalConfig { force_seed_positive: true, ..CalConfig::new(4, 25, subprotocols()[which]).unwrap() };
        let record = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(record.iterations.len(), 4);
        let mut requested = BTreeSet::new();
        for pair in record.iterations.windows(2) {
            prop_assert!(pair[1].recall >= pair[0].recall);
            prop_assert!(pair[1].nrd >= pair[0].nrd);
            prop_assert!(pair[1].revealed_total >= pair[0].revealed_total);
        }
        for it in &record.iterations {
            prop_assert_eq!(it.requested.len(), 25);
            for id in &it.requested {
                prop_assert!(requested.insert(*id), "document requested twice");
            }
            prop_assert!(it.outcome.is_sound());
        }
        prop_assert_eq!(record.final_nrd(), record.revealed.iter().filter(|id| inst.truth(**id) == Some(Label::Negative)).count());
        prop_assert!(record.revealed.iter().all(|id| requested.contains(id)));
        for (id, label) in &record.training_labels {
            if label.is_positive() || record.revealed.contains(id) {
                prop_assert_eq!(inst.truth(*id), Some(*label));
            }
        }
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>()) {
        let inst = corpus(200, 2, seed);
        let cfg = CalConfig::new(3, 20, subprotocols()[2]).unwrap();
        let a = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(seed)).unwrap();
        let b = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn reveal_all_reviews_everything_it_requests() {
    let inst = corpus(400, 4, 9);
    let cfg = CalConfig::new(5, 40, Subprotocol::RevealAll).unwrap();
    let record = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(2)).unwrap();
    assert_eq!(record.revealed.len(), 200);
    assert_eq!(record.final_nrd(), record.reviewed_negatives(&inst));
}

#[test]
fn ranking_beats_random_on_separated_data() {
    let inst = gaussian_mixture::<f64>(&GaussianConfig::new(1000, 5, 0.05, 3).with_separation(4.0)).unwrap();
    let cfg = CalConfig { force_seed_positive: true, ..CalConfig::new(5, 20, Subprotocol::RevealAll).unwrap() };
    let record = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(4)).unwrap();
    assert!(record.final_recall() > 0.6, "recall {}", record.final_recall());
}

#[test]
fn corpus_exhaustion_truncates() {
    let inst = corpus(50, 2, 1);
    let cfg = CalConfig::new(10, 20, Subprotocol::RevealAll).unwrap();
    let record = run_cal(&inst, &cfg, &AliceStrategy::Truthful, &Bob::perfect(), &Court, &mut rng_from_seed(0)).unwrap();
    assert!(record.truncated);
    assert_eq!(record.revealed.len(), 50);
    assert_eq!(record.final_recall(), 1.0);
}

#[test]
fn top_n_prefers_high_scores() {
    let inst = Instance::from_rows(
        vec![vec![0.0], vec![3.0], vec![1.0], vec![2.0]],
        vec![Label::Negative, Label::Positive, Label::Negative, Label::Positive],
    )
    .unwrap();
    let model = LinearModel::new(vec![1.0], 0.0).unwrap();
    let top = select_top_n(&inst, &BTreeSet::from([DocId(1)]), &model, 2).unwrap();
    let ids: BTreeSet<DocId> = top.points().iter().map(|p| p.id).collect();
    assert_eq!(ids, BTreeSet::from([DocId(3), DocId(2)]));
}
