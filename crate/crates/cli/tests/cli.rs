use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chanspoof::chanrep::{kraus_rank, validate_cptp};
use chanspoof::format::{Channel, ChannelFile};
use chanspoof::linalg::{self, max_abs_diff};
use tempfile::TempDir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanspoof")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn load(path: &Path) -> Channel {
    ChannelFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap().to_channel().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const FIG2: &str = "0.1,0.1,0.1,0.7";

#[test]
fn gen_writes_a_valid_channel() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["gen", "--dim", "4", "--rank", "16", "--seed", "7", "--out", "e.json"]);
    assert_eq!(code(&o), 0);
    let Channel::Kraus(k) = load(&dir.path().join("e.json")) else { panic!("kraus file expected") };
    assert_eq!(k.len(), 16);
    let j = chanspoof::chanrep::kraus_to_choi(&k);
    assert!(validate_cptp(&j, 1e-9).unwrap().valid);
    assert_eq!(kraus_rank(&j, 1e-10).unwrap(), 16);
}

#[test]
fn gen_rank_one_is_unitary() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["gen", "--dim", "2", "--rank", "1", "--out", "u.json"])), 0);
    let Channel::Kraus(k) = load(&dir.path().join("u.json")) else { panic!("kraus file expected") };
    assert_eq!(k.len(), 1);
    let u = &k.ops()[0];
    assert!(max_abs_diff((u * u.adjoint()).as_ref(), linalg::identity(2).as_ref()) < 1e-12);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    for name in ["a.json", "b.json"] {
        let o = run_in(dir.path(), &["gen", "--dim", "3", "--seed", "11", "--repr", "choi", "--out", name]);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let o = run_in(dir.path(), &["gen", "--dim", "3", "--seed", "11", "--repr", "choi"]);
    assert_eq!(o.stdout, a);
}

#[test]
fn minimize_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["gen", "--dim", "3", "--seed", "5", "--out", "e.json"]);
    let o = run_in(dir.path(), &["minimize", "e.json", "--out", "m.json", "--trace", "t.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout(&o);
    assert!(summary.contains("rank 9 -> 3 (lower bound 3)"), "{summary}");
    assert!(summary.contains("converged true"));

    let j = load(&dir.path().join("m.json")).to_choi();
    assert_eq!(kraus_rank(&j, 1e-10).unwrap(), 3);

    let log = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(lines.next(), Some("# d=3,mode=operational"));
    assert!(lines.next().unwrap().starts_with("iteration,lambda_1,"));
    let iterations: Vec<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(iterations.len() > 1);
    assert!(iterations.windows(2).all(|w| w[1] > w[0]));

    let o = run_in(dir.path(), &["verify", "e.json", "m.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("same_class=true choi_differ=true"));
    assert_eq!(code(&run_in(dir.path(), &["verify", "e.json", "e.json"])), 0);
}

#[test]
fn minimal_input_takes_one_iteration() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["gen", "--dim", "3", "--rank", "3", "--out", "e.json"]);
    let o = run_in(dir.path(), &["minimize", "e.json", "--out", "m.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("iterations 1 converged true"), "{}", stdout(&o));
}

#[test]
fn non_convergence_keeps_best_iterate() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["gen", "--dim", "3", "--out", "e.json"]);
    let o = run_in(dir.path(), &["minimize", "e.json", "--max-iters", "2", "--out", "m.json"]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("converged false"));
    assert!(dir.path().join("m.json").exists());
    assert!(dir.path().join("m.json.manifest.json").exists());
}

#[test]
fn verify_rejects_other_classes_and_dimensions() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["gen", "--dim", "2", "--seed", "1", "--out", "a.json"]);
    run_in(dir.path(), &["gen", "--dim", "2", "--seed", "2", "--out", "b.json"]);
    run_in(dir.path(), &["gen", "--dim", "3", "--out", "c.json"]);
    let o = run_in(dir.path(), &["verify", "a.json", "b.json"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("same_class=false"));
    assert_eq!(code(&run_in(dir.path(), &["verify", "a.json", "c.json"])), 3);
}

#[test]
fn pauli_reduce_reports_ranks() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["pauli", "reduce", "--alphas", FIG2, "--out", "r.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("rank 4 -> 2\n"));
    let written = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert_eq!(written, std::fs::read_to_string(golden("reduce_fig2.json")).unwrap());
    let o = run_in(dir.path(), &["pauli", "reduce", "--qubits", "2", "--seed", "3"]);
    assert!(stdout(&o).starts_with("rank 16 -> 4\n"));
}

#[test]
fn pauli_spoof_transforms() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["pauli", "spoof", "--alphas", FIG2, "--type", "2", "--beta", "0", "--gamma", "0.2"]);
    assert_eq!(stdout(&o), "0.2,0.1,0.1,0.6\n");
    let o = run_in(dir.path(), &["pauli", "spoof", "--alphas", FIG2, "--type", "1", "--beta", "0"]);
    let got: Vec<f64> = stdout(&o).trim().split(',').map(|v| v.parse().unwrap()).collect();
    for (a, b) in got.iter().zip([0.4, 0.1, 0.1, 0.4]) {
        assert!((a - b).abs() < 1e-15);
    }
    let o = run_in(dir.path(), &["pauli", "spoof", "--alphas", FIG2, "--type", "1", "--beta", "1.5"]);
    assert_eq!(code(&o), 2);
    let o = run_in(dir.path(), &["pauli", "spoof", "--alphas", FIG2, "--type", "2", "--beta", "0.5", "--gamma", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn pauli_tetra_matches_golden() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["pauli", "tetra", "--alphas", FIG2, "--resolution", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("tetra_fig2_r3.csv")).unwrap());
    let last_type1: Vec<f64> = stdout(&o)
        .lines()
        .rfind(|l| l.starts_with("type1,"))
        .unwrap()
        .split(',')
        .skip(1)
        .take(4)
        .map(|v| v.parse().unwrap())
        .collect();
    for (a, b) in last_type1.iter().zip([0.1, 0.1, 0.1, 0.7]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn detect_fixed_and_random_bases() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["pauli", "reduce", "--alphas", FIG2, "--out", "r.json"]);
    std::fs::write(dir.path().join("p.json"), pauli_file(&[0.1, 0.1, 0.1, 0.7])).unwrap();

    let o = run_in(dir.path(), &["detect", "p.json", "p.json", "--out", "same.json"]);
    assert_eq!(code(&o), 0);
    let same: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("same.json")).unwrap()).unwrap();
    assert_eq!(same["fixed_basis"]["detected"], false);
    assert_eq!(same["random_basis"]["detected"], false);

    let o = run_in(dir.path(), &["detect", "p.json", "r.json", "--shots", "100000", "--bases", "50", "--out", "pair.json"]);
    assert_eq!(code(&o), 0);
    let pair: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("pair.json")).unwrap()).unwrap();
    assert_eq!(pair["fixed_basis"]["detected"], false);
    assert_eq!(pair["random_basis"]["detected"], true);

    let o = run_in(dir.path(), &["detect", "p.json", "p.json", "--shots", "10", "--bases", "50"]);
    let few: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(few["random_basis"]["detected"], false);
    assert!(few["random_basis"]["threshold"].as_f64().unwrap() > 0.9);
    let o = run_in(dir.path(), &["detect", "p.json", "r.json", "--shots", "10", "--bases", "50"]);
    let few: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(few["fixed_basis"]["detected"], false);
    assert!(few["random_basis"]["threshold"].as_f64().unwrap() > 0.9);
}

fn pauli_file(alphas: &[f64]) -> String {
    let p = chanspoof::pauli::pauli_channel(alphas).unwrap();
    ChannelFile::from_kraus(&p.kraus()).to_json().unwrap()
}

#[test]
fn count_examples() {
    let dir = TempDir::new().unwrap();
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type1", "--dim", "2"])), "2\n");
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type2-pauli", "--qubits", "2"])), "12\n");
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type2", "--dim", "3"])), "48\n");
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type2", "--dim", "3", "--mode", "operational"])), "54\n");
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type2", "--dim", "2", "--numeric"])), "6\nnumeric 6\n");
    assert_eq!(stdout(&run_in(dir.path(), &["count", "type1", "--qubits", "2", "--numeric"])), "12\nnumeric 12\n");
    assert_eq!(code(&run_in(dir.path(), &["count", "type1-pauli", "--dim", "2"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["count", "type3", "--dim", "2"])), 2);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["gen", "--dim", "0"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["gen", "--dim", "2", "--rank", "5"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["bogus"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["verify", "missing.json", "missing.json"])), 5);
    std::fs::write(dir.path().join("bad.json"), "{\"dim\": 2}").unwrap();
    assert_eq!(code(&run_in(dir.path(), &["minimize", "bad.json"])), 3);
    let not_tp = r#"{"dim": 2, "representation": "kraus", "entries": [[[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]}"#;
    std::fs::write(dir.path().join("not_tp.json"), not_tp).unwrap();
    assert_eq!(code(&run_in(dir.path(), &["minimize", "not_tp.json"])), 3);
    let o = run_in(dir.path(), &["gen", "--dim", "2", "--out", "no/such/dir/e.json"]);
    assert_eq!(code(&o), 5);
}

#[test]
fn quiet_suppresses_summaries() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["gen", "--dim", "2", "--out", "e.json", "--quiet"]);
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
    let o = run_in(dir.path(), &["minimize", "e.json", "--out", "m.json", "-q"]);
    assert!(o.stdout.is_empty());
}

#[test]
fn manifest_reruns_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["gen", "--dim", "2", "--seed", "9", "--out", "e.json"]);
    let o = run_in(dir.path(), &["minimize", "e.json", "--seed", "4", "--perturbation", "0.01", "--out", "m.json", "--trace", "t.csv"]);
    assert_eq!(code(&o), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "minimize");
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["mode"], "operational");
    assert_eq!(manifest["inputs"], serde_json::json!(["e.json"]));
    assert_eq!(manifest["outputs"], serde_json::json!(["m.json", "t.csv"]));
    assert_eq!(manifest["parameters"]["minimize"]["perturbation"], 0.01);

    let before: Vec<Vec<u8>> = ["m.json", "t.csv"].iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect();
    let argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert_eq!(code(&run_in(dir.path(), &argv)), 0);
    let after: Vec<Vec<u8>> = ["m.json", "t.csv"].iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect();
    assert_eq!(before, after);
}
