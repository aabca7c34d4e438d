//! End-to-end checks of the command-line interface, including exit codes:
//! 0 on success, 1 on check failures, 2 on usage or parse errors.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_turbolab"))
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn classify_seed_r_report() {
    let spec = corpus().join("seed_r.json");
    let out = run(&["classify", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["recursive"], true);
    assert_eq!(v["totally_recursive"], false);
    assert_eq!(v["systematic"], "falsified");
    assert_eq!(v["eta"], 1);
}

#[test]
fn classify_identity_memoryless_is_not_recursive() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("ident.json");
    std::fs::write(
        &spec,
        r#"{"letter_dim":1,"z_basis":[],"n":1,"k":1,"m":0,"matrix":["1"]}"#,
    )
    .unwrap();
    let out = run(&["classify", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["recursive"], false);
}

#[test]
fn malformed_matrix_row_exits_2_and_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(
        &spec,
        r#"{"letter_dim":1,"z_basis":[],"n":1,"k":1,"m":1,"matrix":["10","110"]}"#,
    )
    .unwrap();
    let out = run(&["classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 1"), "{err}");
}

#[test]
fn usage_error_exits_2() {
    let out = run(&["classify"]); // missing --spec
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_inner_csv() {
    let spec = corpus().join("seed_r.json");
    let out = run(&[
        "spectrum", "inner", "--spec", spec.to_str().unwrap(), "--n", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("w,d,count\n"));
    assert!(text.contains("2,1,2\n"), "{text}");
}

#[test]
fn spectrum_outer_rejects_seeds_with_memory() {
    let spec = corpus().join("seed_r.json");
    let out = run(&[
        "spectrum", "outer", "--spec", spec.to_str().unwrap(), "--n", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_json_matches_worked_example() {
    let spec = corpus().join("seed_r.json");
    let out = run(&[
        "trace",
        "--spec",
        spec.to_str().unwrap(),
        "--memory",
        "0",
        "--info",
        "1,0,0,1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bits"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["detour_starts"], serde_json::json!([1]));
}

#[test]
fn turbo_distance_identity_interleaver() {
    let out = run(&[
        "turbo-distance",
        "--outer",
        corpus().join("rep3.json").to_str().unwrap(),
        "--inner",
        corpus().join("seed_r.json").to_str().unwrap(),
        "--n",
        "1",
        "--dq",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["d_c"], 2); // E' = 111 -> M'=1, L'=(1,1) -> output 101
}

#[test]
fn mc_is_deterministic_and_exports_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("all.csv");
    let args = |csv_path: &Path| {
        vec![
            "mc".to_string(),
            "--outer".into(),
            corpus().join("rep3.json").to_str().unwrap().into(),
            "--inner".into(),
            corpus().join("seed_sys.json").to_str().unwrap().into(),
            "--n".into(),
            "2".into(),
            "--trials".into(),
            "6".into(),
            "--seed".into(),
            "5".into(),
            "--d".into(),
            "3,5".into(),
            "--csv".into(),
            csv_path.to_str().unwrap().into(),
        ]
    };
    let out1 = bin().args(args(&csv)).output().unwrap();
    assert!(out1.status.success());
    let text1 = stdout(&out1);
    let lines: Vec<&str> = text1.lines().collect();
    assert_eq!(lines.len(), 7); // 6 samples + summary
    assert!(lines[6].contains("summary"));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("n,trial,d_c\n"));
    assert_eq!(csv_text.lines().count(), 7);
    let out2 = bin().args(args(&csv)).output().unwrap();
    assert_eq!(text1, stdout(&out2));
}

#[test]
fn verify_corpus_passes_and_bad_corpus_fails() {
    let out = run(&["verify", "--corpus", corpus().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("singular.json"),
        r#"{"letter_dim":1,"z_basis":[],"n":2,"k":1,"m":0,"matrix":["11","11"]}"#,
    )
    .unwrap();
    let out = run(&["verify", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL singular :: parse+validate"));
}

#[test]
fn verify_empty_corpus_warns_but_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--corpus", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("warning"));
}

#[test]
fn experiment_runs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let cfg = serde_json::json!({
        "outer": corpus().join("rep3.json"),
        "inner": corpus().join("seed_sys.json"),
        "n_grid": [2],
        "trials": 3,
        "master_seed": 21,
        "mode": "poly",
        "alpha": "0.3",
        "x": "0.9",
        "d_values": [3]
    });
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let run_a = dir.path().join("a");
    let run_b = dir.path().join("b");
    for (out_dir, threads) in [(&run_a, "1"), (&run_b, "8")] {
        let out = bin()
            .env("LAB_THREADS", threads)
            .args([
                "experiment",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_a.join("manifest.json")).unwrap())
            .unwrap();
    for rel in manifest["outputs"].as_array().unwrap() {
        let rel = rel.as_str().unwrap();
        assert_eq!(
            std::fs::read(run_a.join(rel)).unwrap(),
            std::fs::read(run_b.join(rel)).unwrap(),
            "{rel} differs across runs"
        );
    }
    // rerun from the manifest reproduces the data files
    let run_c = dir.path().join("c");
    let out = bin()
        .args([
            "experiment",
            "--config",
            run_a.join("manifest.json").to_str().unwrap(),
            "--out",
            run_c.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(run_a.join("mc/all.csv")).unwrap(),
        std::fs::read(run_c.join("mc/all.csv")).unwrap()
    );
}

#[test]
fn experiment_rejects_bad_alpha_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let cfg = serde_json::json!({
        "outer": corpus().join("rep3.json"),
        "inner": corpus().join("seed_r.json"),
        "n_grid": [2],
        "trials": 1,
        "master_seed": 1,
        "mode": "poly",
        "alpha": "0.9",
        "x": "0.9"
    });
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = bin()
        .args([
            "experiment",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            dir.path().join("run").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn bounds_inner_emits_dominating_columns() {
    let out = run(&[
        "bounds",
        "inner",
        "--spec",
        corpus().join("seed_r.json").to_str().unwrap(),
        "--n",
        "3",
        "--w-max",
        "3",
        "--d-max",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "w,d,a,a_le,theorem,bound_1i,bound_2i");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let a: u64 = cols[2].parse().unwrap();
        let theorem: u64 = cols[4].parse().unwrap();
        assert!(a <= theorem, "{line}");
    }
}

#[test]
fn dot_output_written() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("graph.dot");
    let out = run(&[
        "classify",
        "--spec",
        corpus().join("seed_r.json").to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
}
