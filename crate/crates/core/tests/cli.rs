use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tcheby-mobo");

const SMALL: &str = r#"
problem = "benchmark"
seed = 5
architectures = ["C", "F"]
weights = [0.0, 0.5, 1.0]

[benchmark]
steps = [31, 21]

[run]
budget = 14

[cv]
repeats = 5

[bmlr]
chains = 2
warmup_per_chain = 100
max_iter_per_chain = 600
"#;

fn tcheby(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env("TCHEBY_MOBO_LOG", "error").output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_config_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["run", "oracle", "compare"] {
        let o = tcheby(&[cmd, "--config", "no-such.toml"], dir.path());
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("no-such.toml"));
    }
}

#[test]
fn bad_keys_and_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("arch.toml", "architectures = [\"C\", \"X\"]\n", "X"),
        ("key.toml", "[run]\nbudgett = 3\n", "budgett"),
        ("weights.toml", "weights = []\n", "weights"),
        ("budget.toml", "[run]\nbudget = 5\nn0 = 10\n", "run.budget"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(dir.path(), name, text);
        let o = tcheby(&["compare", "--config", &cfg], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let cfg = write_config(dir.path(), "ok.toml", SMALL);
    let o = tcheby(&["oracle", "--config", &cfg, "--threads", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_writes_known_utopia() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let o = tcheby(&["oracle", "--config", &cfg, "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("o/utopia.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["objective", "sense", "value", "x1", "x2"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(&rows[0][2], "162.9");
    let pareto = fs::read_to_string(dir.path().join("o/pareto.csv")).unwrap();
    assert_eq!(pareto.lines().count(), 4);
    let first = fs::read(dir.path().join("o/pareto.csv")).unwrap();
    let o = tcheby(&["oracle", "--config", &cfg, "--out", "o"], dir.path());
    assert!(o.status.success());
    assert_eq!(first, fs::read(dir.path().join("o/pareto.csv")).unwrap());
}

#[test]
fn run_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    for out in ["a", "b"] {
        let o = tcheby(&["run", "--config", &cfg, "--out", out, "--threads", "1"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut files = 0;
    for arch in ["C", "F"] {
        for i in 0..3 {
            for suffix in ["trace.csv", "samples.csv", "summary.json"] {
                let name = format!("{arch}/w{i:02}_{suffix}");
                let a = fs::read(dir.path().join("a").join(&name)).unwrap();
                let b = fs::read(dir.path().join("b").join(&name)).unwrap();
                assert_eq!(a, b, "{name}");
                files += 1;
            }
        }
    }
    assert_eq!(files, 18);
    let trace = fs::read_to_string(dir.path().join("a/C/w00_trace.csv")).unwrap();
    assert!(trace.starts_with("k,evaluations,"));
    assert!(!trace.contains('\r'));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a/C/w01_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["architecture"], "C");
    assert!(summary.get("wall_time").is_none());
}

#[test]
fn seed_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &SMALL.replace("[\"C\", \"F\"]", "[\"C\"]").replace("[0.0, 0.5, 1.0]", "[0.5]"));
    for (out, seed) in [("s5", "5"), ("s6", "6")] {
        assert!(tcheby(&["run", "--config", &cfg, "--out", out, "--seed", seed], dir.path()).status.success());
    }
    let plain = tcheby(&["run", "--config", &cfg, "--out", "plain"], dir.path());
    assert!(plain.status.success());
    let read = |d: &str| fs::read(dir.path().join(d).join("C/w00_samples.csv")).unwrap();
    assert_eq!(read("s5"), read("plain"));
    assert_ne!(read("s5"), read("s6"));
}

#[test]
fn compare_writes_score_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let o = tcheby(&["compare", "--config", &cfg, "--out", "cmp"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("cmp/scores.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["criterion", "C", "F"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.iter().map(|r| r[0].to_string()).collect::<Vec<_>>(), ["utopia_norm", "evaluations", "pareto_norm", "total"]);
    for r in &rows[..3] {
        let v: Vec<f64> = (1..3).map(|j| r[j].parse().unwrap()).collect();
        assert!(v.iter().all(|s| (0.0..=100.0).contains(s)));
        if v[0] != v[1] {
            assert!(v.contains(&100.0) && v.contains(&0.0));
        }
    }
    let total: f64 = rows[3][1].parse().unwrap();
    let sum: f64 = rows[..3].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - sum).abs() < 1e-9);
    let metrics = fs::read_to_string(dir.path().join("cmp/metrics.csv")).unwrap();
    assert!(metrics.starts_with("metric,C,F\n"));
    let per_weight = fs::read_to_string(dir.path().join("cmp/per_weight.csv")).unwrap();
    assert_eq!(per_weight.lines().count(), 1 + 2 * 3);
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let exp = tcheby_mobo::config::ExperimentConfig::load(&path).and_then(|c| c.resolve());
        assert!(exp.is_ok(), "{}: {:?}", path.display(), exp.err());
        n += 1;
    }
    assert_eq!(n, 3);
}
