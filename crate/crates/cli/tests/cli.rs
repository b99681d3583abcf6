use std::path::Path;
use std::process::{Command, Output};

fn ediscovery(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ediscovery")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_instance_feeds_the_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("t.txt");
    let gen = ediscovery(&["gen", "threshold", "--n", "60", "--flips", "2", "--seed", "3", "--out", path(&inst)]);
    assert!(gen.status.success(), "{gen:?}");
    assert!(std::fs::read_to_string(&inst).unwrap().starts_with("dim=1 count=60"));

    let run = ediscovery(&["run-protocol", "--instance", path(&inst), "--protocol", "label", "--seed", "1"]);
    assert!(run.status.success(), "{run:?}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(json["recall"], 1.0);
    assert!(json["nrd"].as_u64().is_some());

    let again = ediscovery(&["run-protocol", "--instance", path(&inst), "--protocol", "label", "--seed", "1"]);
    assert_eq!(stdout(&run), stdout(&again));
}

#[test]
fn exit_codes_distinguish_usage_errors() {
    assert_eq!(ediscovery(&["verify", "no-such-campaign"]).status.code(), Some(2));
    assert_eq!(ediscovery(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ediscovery(&["run-protocol", "--delta", "2"]).status.code(), Some(2));
    let ok = ediscovery(&["verify", "lower-bound"]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    assert!(stdout(&ok).starts_with("campaign,claim,instance"));
}

#[test]
fn command_line_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# lower-bound family\nn = 4\nseed = 1\n").unwrap();
    let from_file = stdout(&ediscovery(&["lower-bound", "--config", path(&cfg)]));
    assert!(from_file.contains("N = 4"), "{from_file}");
    let overridden = stdout(&ediscovery(&["lower-bound", "--config", path(&cfg), "--n", "8"]));
    assert!(overridden.contains("N = 8"), "{overridden}");

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(ediscovery(&["lower-bound", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn figures_write_reproducible_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "figures", "fig1", "--n", "300", "--d", "3", "--iterations", "3", "--batch", "20", "--repeats", "2", "--seed",
            "9", "--out",
        ]
        .into_iter()
        .map(String::from)
        .chain([out.to_string()])
        .collect::<Vec<_>>()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let argv = args(path(out));
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let run = ediscovery(&argv);
        assert!(run.status.success(), "{run:?}");
    }
    let csv = std::fs::read_to_string(a.join("fig1.csv")).unwrap();
    assert!(csv.starts_with("experiment,protocol,iteration,seed,recall,nrd,full_reveal,ms"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3);
    assert_eq!(csv, std::fs::read_to_string(b.join("fig1.csv")).unwrap());
    assert!(a.join("fig1_summary.csv").exists());
}

#[test]
fn critical_points_of_a_generated_realizable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("r.txt");
    let gen = ediscovery(&["gen", "realizable", "--n", "80", "--d", "3", "--ratio", "0.2", "--seed", "2", "--out", path(&inst)]);
    assert!(gen.status.success(), "{gen:?}");
    let crit = ediscovery(&["crit", "--instance", path(&inst)]);
    assert!(crit.status.success(), "{crit:?}");
    assert!(!stdout(&crit).is_empty());
}
