use std::path::Path;
use std::process::{Command, Output};

fn tdac(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{
  "runs": [{"side": 9, "leaky": true}],
  "count_per_class": 12,
  "forest": {"n_trees": 5},
  "grid": {"directions": [[0, 1], [-1, 1]], "centers": [[4, 4]]}
}"#;

#[test]
fn stepwise_commands_match_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let steps = dir.path().join("steps");
    for cmd in ["gen", "gridsearch", "features", "train", "evaluate", "report"] {
        let o = tdac(&[cmd, "--config", &cfg], &steps);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let all = dir.path().join("all");
    let o = tdac(&["pipeline", "--config", &cfg], &all);
    assert_eq!(code(&o), 0);
    for f in [
        "report.md",
        "report.csv",
        "plot_data.csv",
        "leaky-n8/features.csv",
        "leaky-n8/forest.json",
    ] {
        assert_eq!(
            std::fs::read(steps.join(f)).unwrap(),
            std::fs::read(all.join(f)).unwrap(),
            "{f}"
        );
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("| n | Random Forest | Decision Tree |"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = tdac(
        &["gen", "--config", &cfg, "--side", "11", "--leaky", "--seed", "5"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let manifest = std::fs::read_to_string(dir.path().join("leaky-n10/dataset.json")).unwrap();
    assert!(manifest.contains("\"seed\": 5"));
    let o = tdac(&["gen", "--config", &cfg, "--n", "3", "--jobs", "1"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("honest-n3/dataset.tdac").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"runs": [{"side": 9}], "colour": 1}"#);
    assert_eq!(code(&tdac(&["gen", "--config", &bad], dir.path())), 2);
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(
        code(&tdac(&["gen", "--config", &cfg, "--n", "3", "--side", "9"], dir.path())),
        2
    );
    assert_eq!(code(&tdac(&["gen", "--config", &cfg, "--jobs", "0"], dir.path())), 2);
    assert_eq!(code(&tdac(&["gen", "--config", "/no/such/file.json"], dir.path())), 2);
    assert_eq!(code(&tdac(&["frobnicate"], dir.path())), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(code(&tdac(&["gen", "--config", &cfg], dir.path())), 0);
    let data = dir.path().join("leaky-n8/dataset.tdac");
    let mut bytes = std::fs::read(&data).unwrap();
    bytes[0] = b'X';
    std::fs::write(&data, &bytes).unwrap();
    let o = tdac(&["features", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 0"));
    // report without evaluations lists the gap and fails
    let o = tdac(&["report", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 3);
    assert!(std::fs::read_to_string(dir.path().join("report.md"))
        .unwrap()
        .contains("leaky-n8 | missing"));
}

#[test]
fn failed_check_exits_4() {
    // honest n=6 (m=15) gives the distinguisher nothing to find
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"runs": [{"n": 6}], "count_per_class": 40, "forest": {"n_trees": 10},
            "grid": {"directions": [[-1, 1]], "centers": [[20, 20]]}}"#,
    );
    let o = tdac(&["pipeline", "--check", "--config", &cfg], dir.path());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 4, "{stdout}");
    assert!(stdout.contains("check:") && stdout.contains("FAIL"));
    // without --check the same run succeeds
    assert_eq!(code(&tdac(&["pipeline", "--config", &cfg], dir.path())), 0);
}
