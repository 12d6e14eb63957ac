use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fmelm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmelm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn table(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn unknown_task_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fmelm(&["run", "mnist"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("iris"));
}

#[test]
fn bad_override_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fmelm(&["run", "iris", "--set", "model.nope=1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = fmelm(&["run", "iris", "--m1", "40"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_record_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let out = fmelm(&["run", "iris", "--repeats", "3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("iris-run.tsv")).unwrap();
    assert!(text.contains("# format: fmelm-record/1"));
    let rows = table(&text);
    assert_eq!(rows[0], "repeat\tlambda\tscore");
    assert_eq!(rows.len(), 4);
    assert!(dir.path().join("iris-run.tsv.time").exists());
}

#[test]
fn same_seed_same_file() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "wine", "--repeats", "4", "--seed", "17", "--lambda", "1e-6,1e-4"];
    assert!(fmelm(&args, a.path()).status.success());
    assert!(fmelm(&args, b.path()).status.success());
    assert_eq!(
        fs::read(a.path().join("wine-run.tsv")).unwrap(),
        fs::read(b.path().join("wine-run.tsv")).unwrap()
    );
}

#[test]
fn embedded_config_reproduces_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "nlc", "--repeats", "2", "--symbols", "300", "--snr", "20", "--m2", "1.5"];
    assert!(fmelm(&args, a.path()).status.success());
    let first = a.path().join("nlc-run.tsv");
    let out = fmelm(&["run", "--config", first.to_str().unwrap()], b.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&first).unwrap(), fs::read(b.path().join("nlc-run.tsv")).unwrap());
}

#[test]
fn sweep_covers_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = fmelm(
        &["sweep", "iris", "--m1", "6,7", "--m2", "1:2:1", "--repeats", "2"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("iris-sweep.tsv")).unwrap();
    let rows = table(&text);
    assert_eq!(rows.len(), 5);
    let cells: Vec<(&str, &str)> = rows[1..]
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split('\t').collect();
            (f[1], f[2])
        })
        .collect();
    assert_eq!(cells, [("6", "1"), ("6", "2"), ("7", "1"), ("7", "2")]);
}

#[test]
fn oversized_sweep_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = fmelm(&["sweep", "iris", "--m1", "0:12:0.1", "--m2", "0:12:0.1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

fn comb_powers(text: &str) -> Vec<(i32, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect()
}

#[test]
fn comb_export() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fmelm(&["export-comb", "--m1", "3", "--epsilon", "0"], dir.path())
        .status
        .success());
    let lines = comb_powers(&fs::read_to_string(dir.path().join("comb.tsv")).unwrap());
    assert!(lines.len() > 5);
    for &(k, p) in &lines {
        let (_, mirror) = lines.iter().find(|(j, _)| *j == -k).unwrap();
        assert!((p - mirror).abs() < 1e-6, "k={k}");
    }

    assert!(fmelm(&["export-comb", "--m1", "0"], dir.path()).status.success());
    let lines = comb_powers(&fs::read_to_string(dir.path().join("comb.tsv")).unwrap());
    assert_eq!(lines, [(0, 0.0)]);
}

#[test]
fn bundled_data_checks() {
    let out = Command::new(env!("CARGO_BIN_EXE_fmelm"))
        .arg("validate-data")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("OK\tiris.csv"));
    assert!(text.contains("OK\twine.csv"));

    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.csv"), "1,2\n").unwrap();
    fs::write(dir.path().join("SHA256SUMS"), format!("{} x.csv\n", "0".repeat(64))).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fmelm"))
        .args(["validate-data", "--dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
}
