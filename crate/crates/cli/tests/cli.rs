use fracwiener_cli::config::{ExperimentConfig, Pair, Triple};
use fracwiener_cli::experiments::{column_reference, list_experiments, Experiment, KINDS};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracwiener"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracwiener-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_config(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, text).unwrap();
    bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse(text: &str) -> Result<Experiment, String> {
    let cfg: ExperimentConfig = text.parse().map_err(|e| format!("{e}"))?;
    Experiment::from_config(cfg).map_err(|e| format!("{e}"))
}

#[test]
fn list_experiments_is_three_lines_per_kind_and_stable() {
    let a = bin().arg("list-experiments").output().unwrap();
    let b = bin().arg("list-experiments").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text, list_experiments());
    assert_eq!(text.lines().count(), 3 * KINDS.len());
    for (i, spec) in KINDS.iter().enumerate() {
        let line = text.lines().nth(3 * i).unwrap();
        assert!(line.starts_with(spec.kind.name()), "{line}");
    }
}

#[test]
fn readme_matches_list_experiments_and_columns() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    assert!(readme.contains(&list_experiments()), "README is missing the list-experiments output");
    assert!(readme.contains(&column_reference()), "README is missing the CSV column reference");
}

#[test]
fn help_documents_every_column() {
    let out = bin().arg("--help").output().unwrap();
    let help = String::from_utf8(out.stdout).unwrap();
    for spec in &KINDS {
        for (stem, cols) in spec.tables {
            let line = format!("{} -> {stem}.csv: {}", spec.kind.name(), cols.join(","));
            assert!(help.contains(&line), "--help lacks '{line}'");
        }
    }
}

#[test]
fn empty_parameter_grid_exits_2() {
    let dir = scratch("empty");
    let out = run_config(&dir, "schema_version = 1\nkind = norm-identity\nhurst = \nn_functions = 2\nseed = 1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3: hurst: empty parameter grid"), "{}", stderr(&out));
    assert!(!dir.join("out").exists());
}

#[test]
fn invalid_configs_are_rejected_with_line_numbers() {
    let base = "schema_version = 1\nkind = norm-identity\nhurst = 0.3\nn_functions = 2\nseed = 1\n";
    assert!(parse(base).is_ok());
    let cases = [
        (format!("{base}tolerance = 0.1\n"), "line 6: unknown key 'tolerance'"),
        (format!("{base}seed = 2\n"), "line 6: key 'seed' repeats line 5"),
        (base.replace("0.3", "1.3"), "line 3: hurst: 1.3 is outside (0, 1)"),
        (base.replace("= 2", "= two"), "line 4: n_functions: cannot parse 'two'"),
        (base.replace("seed = 1\n", ""), "seed: required key is missing"),
        (base.replace("schema_version = 1", "schema_version = 7"), "schema_version 7 is not supported"),
        (base.replace("norm-identity", "norms"), "unknown experiment kind 'norms'"),
        (format!("{base}just text\n"), "line 6: expected 'key = value'"),
    ];
    for (text, needle) in cases {
        let err = parse(&text).unwrap_err();
        assert!(err.contains(needle), "expected '{needle}' in:\n{err}");
    }
    let dir = scratch("invalid");
    let out = run_config(&dir, &format!("{base}tolerance = 0.1\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key 'tolerance'"));
}

#[test]
fn kind_specific_keys_are_not_shared() {
    let text = "schema_version = 1\nkind = threshold-sweep\nhurst = 0.4\nalpha = 0.1\nseed = 3\n";
    assert!(parse(text).unwrap_err().contains("unknown key 'seed' for kind threshold-sweep"));
}

#[test]
fn pair_and_triple_syntax() {
    assert_eq!("fbm:0.3".parse::<Pair<String, f64>>().unwrap(), Pair("fbm".into(), 0.3));
    assert_eq!(" 1 : 0.4 : 0".parse::<Triple<u32, f64, f64>>().unwrap(), Triple(1, 0.4, 0.0));
    assert!("1:2".parse::<Triple<u32, f64, f64>>().is_err());
    assert!("0.3".parse::<Pair<f64, f64>>().is_err());
}

#[test]
fn config_hash_ignores_layout_and_comments() {
    let a: ExperimentConfig = "schema_version = 1\nkind = moments\nsamples = 10\nseed = 1\n".parse().unwrap();
    let b: ExperimentConfig = "# moments\nseed=1\n\nsamples   = 10 # small\nkind = moments\nschema_version = 1\n"
        .parse()
        .unwrap();
    let c: ExperimentConfig = "schema_version = 1\nkind = moments\nsamples = 10\nseed = 2\n".parse().unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
}

#[test]
fn norm_identity_over_six_hurst_values() {
    let dir = scratch("norm");
    let text = "schema_version = 1\nkind = norm-identity\nhurst = 0.1, 0.25, 0.4, 0.6, 0.75, 0.9\nn_functions = 3\nseed = 5\n";
    let out = run_config(&dir, text, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(dir.join("out/norm_identity.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["H", "f_id", "dh_norm", "fourier_norm", "ratio", "constant", "pass"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| &r[6] == "true"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["pass"], true);
    assert_eq!(manifest["verdicts"].as_array().unwrap().len(), 18);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["files"].as_array().unwrap().len(), 3);
}

#[test]
fn isometry_summary_reports_z_scores() {
    let dir = scratch("isometry");
    let text = "schema_version = 1\nkind = isometry\ndrivers = fbm:0.3\nn_functions = 4\npaths = 20000\nseed = 6\n";
    let out = run_config(&dir, text, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["kind"], "isometry");
    let z = summary["metrics"]["z_scores"].as_array().unwrap();
    assert_eq!(z.len(), 4);
    assert!(z.iter().all(|v| v.as_f64().unwrap().abs() <= 3.0), "{z:?}");
}

#[test]
fn failed_assertion_exits_1_with_failure_table() {
    let dir = scratch("fail");
    let text = "schema_version = 1\nkind = moments\nsamples = 2000\nseed = 1\ndraws = 2\ntol_gaussian = 1e-9\n";
    let out = run_config(&dir, text, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("FAILED\n") && err.contains("gaussian"), "{err}");
    assert!(dir.join("out/moments.csv").exists());
}

#[test]
fn strict_turns_warnings_into_failures() {
    let dir = scratch("strict");
    // α = 0.15 sits on the threshold H − 1/4
    let text = "schema_version = 1\nkind = threshold-sweep\nhurst = 0.4\nalpha = 0.0, 0.15, 0.3\nmodes = 64\n";
    let relaxed = run_config(&dir, text, &[]);
    assert_eq!(relaxed.status.code(), Some(0), "{}", stderr(&relaxed));
    assert!(stderr(&relaxed).contains("warning: H=0.4 alpha=0.15"));
    let strict = run_config(&dir, text, &["--strict"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn csv_output_is_independent_of_runs_and_threads() {
    let text = "schema_version = 1\nkind = spde-distributed\ncases = 1:0.4:0.0\nmodes = 16\npaths = 64\nsteps = 64\nseed = 9\ntol = 1\nz_max = 100\n";
    let read = |dir: &Path| std::fs::read(dir.join("out/spde_distributed.csv")).unwrap();
    let runs: Vec<Vec<u8>> = [("a", "1"), ("b", "1"), ("c", "3")]
        .iter()
        .map(|(name, threads)| {
            let dir = scratch(&format!("det-{name}"));
            let out = run_config(&dir, text, &["--threads", threads]);
            assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
            read(&dir)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}
