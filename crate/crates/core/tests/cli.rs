use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_compound-sr");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["dressed", "rates", "intensity", "chirp", "sweep"] {
        for fmt in ["csv", "json"] {
            let a = dir.path().join(format!("{cmd}-a.{fmt}"));
            let b = dir.path().join(format!("{cmd}-b.{fmt}"));
            for p in [&a, &b] {
                stdout(&[
                    cmd,
                    "--preset",
                    "paper-default",
                    "--format",
                    fmt,
                    "--out",
                    p.to_str().unwrap(),
                ]);
            }
            assert_eq!(
                std::fs::read(&a).unwrap(),
                std::fs::read(&b).unwrap(),
                "{cmd} {fmt}"
            );
        }
    }
}

#[test]
fn row_counts() {
    assert_eq!(stdout(&["rates"]).lines().count(), 1 + 8);
    assert_eq!(stdout(&["chirp"]).lines().count(), 1 + 10);
    assert_eq!(
        stdout(&["sweep", "--preset", "ba138"]).lines().count(),
        1 + 1801
    );
    assert_eq!(
        stdout(&["sweep", "--kr-steps", "11"]).lines().count(),
        1 + 11
    );
    assert_eq!(stdout(&["intensity"]).lines().count(), 1 + 1001);
    let net = stdout(&["intensity", "--mode", "network"]);
    assert_eq!(net.lines().next().unwrap().split(',').count(), 1 + 1 + 9);
}

#[test]
fn rate_normalization_halves_the_rates() {
    let gamma = stdout(&["intensity"]);
    let two = stdout(&["intensity", "--rate-normalization", "two-atom"]);
    let first = |s: &str| {
        s.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse::<f64>()
            .unwrap()
    };
    assert!((first(&gamma) - 2.0 * first(&two)).abs() < 1e-12);
}

#[test]
fn json_output_parses() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["dressed", "--format", "json"])).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 9);
    assert!(v["metadata"]["quoted_shift_note"]
        .as_str()
        .unwrap()
        .contains("150000"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "a.json", r#"{"physical": {"wavelength": 1}}"#);
    assert_eq!(run(&["rates", "--config", &unknown]).status.code(), Some(2));
    let bad = write(dir.path(), "b.json", r#"{"physical": {"kr": -1}}"#);
    assert_eq!(run(&["rates", "--config", &bad]).status.code(), Some(2));
    let big = write(
        dir.path(),
        "c.json",
        r#"{"samples": [{"atoms": 7, "phase": 0}, {"atoms": 7, "phase": 30}]}"#,
    );
    assert_eq!(run(&["dressed", "--config", &big]).status.code(), Some(3));
    let missing = dir.path().join("none.json");
    assert_eq!(
        run(&["rates", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--kr-min", "50", "--kr-max", "20"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let cfg = write(
        dir.path(),
        "s.json",
        &format!(
            r#"{{"samples": [{{"atoms": 2, "phase": 0}}, {{"atoms": 2, "phase": 25}}, {{"atoms": 2, "phase": 50}}],
               "run": {{"t_max_tausp": 2, "dt_out_tausp": 0.5}},
               "output": {{"path": {:?}}}}}"#,
            out.to_str().unwrap()
        ),
    );
    assert!(stdout(&["intensity", "--config", &cfg]).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t_over_tausp,I_main,I_secondary,I_nonint,I_sixatom"
    );
    assert_eq!(text.lines().count(), 1 + 5);
}
