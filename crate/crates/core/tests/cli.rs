mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use emoaug::corpus::{write_jsonl, Dataset};
use emoaug::synth;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_emoaug"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(ds: &Dataset, path: &Path) {
    let mut buf = Vec::new();
    write_jsonl(ds, &mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

fn lines(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build_lexicons(dir: &Path) {
    let f = common::fixtures();
    let out = run(&[
        "lexicon",
        "build",
        "--nrc",
        s(&f.join("nrc_emotion_lexicon.txt")),
        "--se-words",
        s(&f.join("se_words.txt")),
        "--sentiwordnet",
        s(&f.join("sentiwordnet.txt")),
        "--out",
        s(dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn split_writes_stratified_train_and_test_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.jsonl");
    write(&synth::reference_sized_corpus(2), &input);
    let out = run(&["split", "--in", s(&input), "--ratio", "0.2", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let train = lines(&dir.path().join("corpus.train.jsonl"));
    let test = lines(&dir.path().join("corpus.test.jsonl"));
    assert_eq!((train.len(), test.len()), (1600, 400));
    let ids = |v: &[Value]| {
        v.iter()
            .map(|r| r["id"].as_str().unwrap().to_string())
            .collect::<std::collections::BTreeSet<_>>()
    };
    assert!(ids(&train).is_disjoint(&ids(&test)));
}

#[test]
fn lexicon_build_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    build_lexicons(dir.path());
    let log: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("build_log.json")).unwrap()).unwrap();
    assert_eq!(log["emotion_lexicon_words"], 41);
    assert!(dir.path().join("emotion_lexicon.json").exists());
    assert!(dir.path().join("polarity_lexicon.json").exists());
}

#[test]
fn augment_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("lex");
    build_lexicons(&lex);
    let input = dir.path().join("three.jsonl");
    let mut ds = synth::reference_sized_corpus(3);
    ds.instances = vec![
        ds.instances[0].clone(),
        ds.instances[400].clone(),
        ds.instances[1200].clone(),
    ];
    write(&ds, &input);

    let mut digests = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("w{workers}.jsonl"));
        let o = run(&[
            "augment",
            "--in",
            s(&input),
            "--strategy",
            "unconstrained",
            "--lexicons",
            s(&lex),
            "--workers",
            workers,
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let rows = lines(&out);
        assert_eq!(rows.len(), 30);
        for r in &rows {
            assert!(r["similarity"].as_f64().unwrap() >= 0.9);
        }
        let bytes = fs::read(&out).unwrap();
        use sha2::{Digest, Sha256};
        digests.push(hex::encode(Sha256::digest(&bytes)));
        assert!(!Path::new(&format!("{}.partial", out.display())).exists());
    }
    assert_eq!(digests[0], digests[1]);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("three.unconstrained.report.json")).unwrap()).unwrap();
    assert_eq!(report["emitted"], 30);
}

#[test]
fn failed_write_leaves_only_the_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.jsonl");
    write(&synth::mixed_corpus(10, 1), &input);
    let target = dir.path().join("occupied");
    fs::create_dir(&target).unwrap();
    fs::write(target.join("keep"), "x").unwrap();
    let o = run(&["preprocess", "--in", s(&input), "--out", s(&target)]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "io");
    assert!(target.join("keep").exists());
    assert!(dir.path().join("occupied.partial").exists());
}

#[test]
fn errors_are_single_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["split", "--in", s(&dir.path().join("missing.jsonl"))]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    let err: Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "input");
    assert!(err["message"].as_str().unwrap().contains("missing.jsonl"));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "seeed = 3\n").unwrap();
    let input = dir.path().join("c.jsonl");
    write(&synth::mixed_corpus(3, 1), &input);
    let o = run(&["augment", "--in", s(&input), "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "config");

    let o = run(&["augment", "--strategy", "sideways", "--in", s(&input)]);
    assert_eq!(o.status.code(), Some(2));

    let o = bin()
        .env_remove("EMOAUG_TOKEN")
        .args(["fetch", "--repo", "a/b", "--kind", "issues", "--limit", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "auth");
}

#[test]
fn train_eval_and_overlap_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = synth::planted_cue_corpus(10, 5, 4);
    let (tr, te) = (dir.path().join("train.jsonl"), dir.path().join("test.jsonl"));
    write(&train, &tr);
    write(&test, &te);
    let o = run(&["train", "--in", s(&tr)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let model = dir.path().join("train.model.json");
    let preds = dir.path().join("preds.jsonl");
    let o = run(&[
        "eval",
        "--model",
        s(&model),
        "--test",
        s(&te),
        "--predictions",
        s(&preds),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("micro f1 "));
    let metrics: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("test.metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["test_size"], 30);
    let f1 = metrics["metrics"]["micro"]["f1"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f1));

    let o = run(&["overlap", "--pred", s(&preds), s(&preds), "--gold", s(&te)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("false negatives shared by all"));
}
