//! Acceptance suite: one line per criterion with its verdict and runtime.
//! Runs as a plain binary so the lines always reach the console.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{brute_force_extreme, random_point_set, random_realizable, worked_example};
use ediscovery::critical::{critical_points_fast, critical_points_naive};
use ediscovery::harness::figures::nrd_ratio_series;
use ediscovery::harness::{
    run_figure_campaign, verify_bounds, Campaign, CampaignConfig, Figure, FigureConfig, ResultRow, Verdict,
    VerificationReport,
};
use ediscovery::hull::extremal_points;
use ediscovery::rng::{rng_from_seed, split_seed};
use ediscovery::DocId;
use rand::Rng;

const ROOT_SEED: u64 = 0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn campaign(campaign: Campaign) -> VerificationReport {
    verify_bounds(campaign, &CampaignConfig { root_seed: ROOT_SEED, ..CampaignConfig::default() })
}

fn describe(report: &VerificationReport) -> String {
    let fails: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| format!("{} [{}]: {} vs {}", r.instance, r.note, r.empirical, r.bound))
        .collect();
    let mut s = format!(
        "{}: {} pass, {} fail, {} skipped",
        report.campaign.name(),
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Skipped)
    );
    if !fails.is_empty() {
        s.push_str(&format!("; failing: {}", fails.join("; ")));
    }
    s
}

fn campaigns(list: &[Campaign], min_judged: usize) -> Outcome {
    let reports: Vec<VerificationReport> = list.iter().map(|&c| campaign(c)).collect();
    let judged: usize = reports.iter().map(|r| r.count(Verdict::Pass) + r.count(Verdict::Fail)).sum();
    let pass = reports.iter().all(VerificationReport::all_pass) && judged >= min_judged;
    let mut detail = reports.iter().map(describe).collect::<Vec<_>>().join(" | ");
    if judged < min_judged {
        detail.push_str(&format!(" | only {judged} judged rows, need {min_judged}"));
    }
    Outcome { pass, detail }
}

fn critical_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut rng = rng_from_seed(split_seed(ROOT_SEED, 6));
    let count = 200usize;
    for i in 0..count {
        let n = rng.random_range(10..=200);
        let d = rng.random_range(1..=5);
        let inst = random_realizable(n, d, split_seed(ROOT_SEED, 600 + i as u64));
        let fast = critical_points_fast(&inst).map(|c| c.ids);
        let naive = critical_points_naive(&inst);
        match (fast, naive) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => mismatches.push(format!("#{i}(n={n},d={d}): {a:?} vs {b:?}")),
        }
    }
    let worked = worked_example();
    let expected: BTreeSet<DocId> = [DocId(2), DocId(3)].into();
    let worked_ok = critical_points_fast(&worked).map(|c| c.ids).ok().as_ref() == Some(&expected)
        && critical_points_naive(&worked).ok().as_ref() == Some(&expected);
    Outcome {
        pass: mismatches.is_empty() && worked_ok,
        detail: format!(
            "{} of {count} random instances agree, worked example {}{}",
            count - mismatches.len(),
            if worked_ok { "ok" } else { "wrong" },
            if mismatches.is_empty() { String::new() } else { format!("; {}", mismatches.join("; ")) }
        ),
    }
}

fn extremal_correctness() -> Outcome {
    let mut problems = Vec::new();
    let mut bad_sets = 0;
    let mut rng = rng_from_seed(split_seed(ROOT_SEED, 7));
    let count = 200usize;
    let mut worst_ratio = 0.0f64;
    for i in 0..count {
        let n = rng.random_range(1..=300);
        let d = rng.random_range(1..=4);
        let pts = random_point_set(n, d, split_seed(ROOT_SEED, 700 + i as u64));
        let before = problems.len();
        match extremal_points(&pts) {
            Ok(e) => {
                let budget = n * (e.indices.len() + 1);
                worst_ratio = worst_ratio.max(e.lp_solves as f64 / budget as f64);
                if e.indices != brute_force_extreme(&pts) {
                    problems.push(format!("#{i}(n={n},d={d}) differs from the oracle"));
                }
                if e.lp_solves > budget {
                    problems.push(format!("#{i}(n={n},d={d}) used {} LPs > {budget}", e.lp_solves));
                }
            }
            Err(e) => problems.push(format!("#{i}: {e}")),
        }
        if problems.len() > before {
            bad_sets += 1;
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "{} of {count} point sets agree, max LP count / n(|V|+1) = {worst_ratio:.3}{}",
            count - bad_sets,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    }
}

fn mean_by_iteration(rows: &[ResultRow], experiment: &str, protocol: &str, field: fn(&ResultRow) -> f64) -> Vec<f64> {
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.experiment == experiment && r.protocol == protocol) {
        if sums.len() <= r.iteration {
            sums.resize(r.iteration + 1, (0.0, 0));
        }
        sums[r.iteration].0 += field(r);
        sums[r.iteration].1 += 1;
    }
    sums.into_iter().map(|(s, n)| s / n.max(1) as f64).collect()
}

fn cal_reproduction() -> Outcome {
    let cfg = FigureConfig { root_seed: ROOT_SEED, ..FigureConfig::default() };
    let out = match run_figure_campaign(Figure::Fig2, &cfg) {
        Ok(out) => out,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let recall = |p: &str| mean_by_iteration(&out.rows, "fig2-a", p, |r| r.recall);
    let nrd = |p: &str| mean_by_iteration(&out.rows, "fig2-a", p, |r| r.nrd as f64);
    let (rec_all, rec_cls) = (recall("reveal_all"), recall("protocol_classifier"));
    let (nrd_all, nrd_lab) = (nrd("reveal_all"), nrd("protocol_label"));
    let final_all = *rec_all.last().unwrap_or(&0.0);
    let final_cls = *rec_cls.last().unwrap_or(&0.0);
    let recall_ok = final_cls >= final_all - 0.10;
    let worse: Vec<usize> = (0..nrd_all.len()).filter(|&t| nrd_lab.get(t).is_none_or(|v| *v >= nrd_all[t])).collect();
    let nrd_ok = !nrd_all.is_empty() && worse.is_empty();
    Outcome {
        pass: recall_ok && nrd_ok,
        detail: format!(
            "final recall classifier {final_cls:.4} vs reveal_all {final_all:.4}; label NRD {:?} vs reveal_all {:?}{}",
            nrd_lab.iter().map(|v| v.round() as i64).collect::<Vec<_>>(),
            nrd_all.iter().map(|v| v.round() as i64).collect::<Vec<_>>(),
            if worse.is_empty() { String::new() } else { format!("; not lower at iterations {worse:?}") }
        ),
    }
}

fn critical_ratio() -> Outcome {
    let cfg = FigureConfig { root_seed: ROOT_SEED, ..FigureConfig::default() };
    let out = match run_figure_campaign(Figure::Fig4, &cfg) {
        Ok(out) => out,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let crit = nrd_ratio_series(&out.rows, "fig4", "critical_points");
    let cls = nrd_ratio_series(&out.rows, "fig4", "protocol_classifier");
    match (crit.last(), cls.last()) {
        (Some(&(_, c)), Some(&(_, p))) => Outcome {
            pass: c < p,
            detail: format!(
                "critical-points ratio {c:.4} at n = {} vs classifier ratio {p:.4} after {} iterations",
                cfg.crit_sizes.last().copied().unwrap_or(0),
                cfg.iterations
            ),
        },
        _ => Outcome { pass: false, detail: "missing ratio series".into() },
    }
}

fn determinism() -> Outcome {
    let cfg = FigureConfig { root_seed: ROOT_SEED, ..FigureConfig::default() };
    let figure = (run_figure_campaign(Figure::Fig1, &cfg).map(|o| o.csv()), run_figure_campaign(Figure::Fig1, &cfg).map(|o| o.csv()));
    let figure_ok = matches!(&figure, (Ok(a), Ok(b)) if a == b);
    let verify = CampaignConfig { root_seed: ROOT_SEED, trials: Some(2_000), ..CampaignConfig::default() };
    let a = verify_bounds(Campaign::LabelDetection, &verify).to_csv();
    let b = verify_bounds(Campaign::LabelDetection, &verify).to_csv();
    Outcome {
        pass: figure_ok && a == b,
        detail: format!(
            "fig1 CSV {} ({} bytes), label-detection CSV {}",
            if figure_ok { "identical" } else { "differs" },
            figure.0.as_ref().map_or(0, String::len),
            if a == b { "identical" } else { "differs" }
        ),
    }
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

fn main() {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: [Criterion; 11] = [
        (1, "label-report recall floor", secs(120), || campaigns(&[Campaign::LabelRecall], 20)),
        (2, "label-report disclosure bound", secs(120), || campaigns(&[Campaign::LabelNrd], 20)),
        (3, "label-report detection", secs(60), || campaigns(&[Campaign::LabelDetection], 2)),
        (4, "classifier-report detection and disclosure", secs(120), || {
            campaigns(&[Campaign::ClassifierDetection, Campaign::ClassifierNrd], 2)
        }),
        (5, "best response is truthful on the positive side", secs(300), || campaigns(&[Campaign::BestResponse], 5)),
        (6, "critical points fast = naive", secs(180), critical_equivalence),
        (7, "extreme points match the oracle", secs(120), extremal_correctness),
        (8, "lower-bound family", secs(10), || campaigns(&[Campaign::LowerBound], 6)),
        (9, "CAL reproduction", secs(300), cal_reproduction),
        (10, "critical points disclose less than the classifier protocol", secs(180), critical_ratio),
        (11, "determinism", None, determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let started = Instant::now();
        let outcome = run();
        let elapsed = started.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = match budget {
            Some(b) if !in_time => format!(", over the {} s budget", b.as_secs()),
            Some(b) => format!(", budget {} s", b.as_secs()),
            None => String::new(),
        };
        println!(
            "criterion {id:>2} {}: {name} ({:.1} s{budget_note}) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    println!("{} of 11 criteria pass", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
