use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use idiomforge::manifest::read_manifest;
use idiomforge::{jsonl, PipelineManifest};
use idiomforge_core::triplet::Triplet;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn forge(stage: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge"))
        .arg(stage)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("run forge")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Config that pulls fixture paths in absolutely and adds `body`.
fn write_config(dir: &Path, body: &str) -> PathBuf {
    let fx = fixtures();
    let text = format!(
        "seed = 42\ncorpus = {c}\nlexicon = {l}\n\n[silver]\nreference = {r}\n\n{body}\n",
        c = fx.join("corpus").display(),
        l = fx.join("lexicon.jsonl").display(),
        r = fx.join("reference.jsonl").display(),
    );
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(stage: &str, config: &Path, out: &Path, extra: &[&str]) {
    let o = forge(stage, config, out, extra);
    assert_eq!(code(&o), 0, "{stage}: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_stage_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    assert_eq!(code(&forge("polish", &cfg, dir.path(), &[])), 2);
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&forge("ingest", &dir.path().join("none.conf"), dir.path(), &[])), 2);
}

#[test]
fn evaluate_without_backend_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    run_ok("ingest", &cfg, dir.path(), &[]);
    run_ok("bronze", &cfg, dir.path(), &[]);
    let o = forge("evaluate", &cfg, dir.path(), &["--seed", "1"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn missing_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    assert_eq!(code(&forge("bronze", &cfg, dir.path(), &[])), 3);
}

#[test]
fn bronze_on_empty_corpus_succeeds_with_zero_records() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty");
    std::fs::create_dir(&corpus).unwrap();
    let cfg = write_config(dir.path(), &format!("[ingest]\ninput = {}", corpus.display()));
    let out = dir.path().join("out");
    run_ok("ingest", &cfg, &out, &[]);
    run_ok("bronze", &cfg, &out, &[]);
    let m = read_manifest(&out.join("bronze.jsonl")).unwrap();
    assert_eq!((m.records_in, m.records_out), (0, 0));
    assert_eq!(std::fs::read_to_string(out.join("bronze.jsonl")).unwrap(), "");
}

#[test]
fn invalid_percent_and_gloss_paragraph_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[silver]\npercents = 0, 5");
    assert_eq!(code(&forge("silver", &cfg, dir.path(), &[])), 2);

    let cfg = write_config(dir.path(), "[enrich]\ncontext = paragraph\nknowledge = gloss");
    assert_eq!(code(&forge("enrich", &cfg, dir.path(), &[])), 2);

    let cfg = write_config(dir.path(), "[enrich]\nknowledge = inference\ninferences = 7");
    assert_eq!(code(&forge("enrich", &cfg, dir.path(), &[])), 2);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["ingest", "--config"])
        .arg(&cfg)
        .env("FORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

fn synthetic_bronze(dir: &Path, n: usize) -> PathBuf {
    let rows: Vec<Triplet> = (0..n)
        .map(|i| Triplet {
            mwe: "guinea pig".into(),
            e: format!("Record {i} says the guinea pig"),
            e_c: format!("Record {i} says the test subject"),
            e_i: format!("Record {i} says the animal"),
            span_start: format!("Record {i} says the ").len(),
            span_end: format!("Record {i} says the guinea pig").len(),
            doc_id: format!("d{:04}", i),
            index: 0,
            prev: None,
            next: None,
            augmentation: None,
        })
        .collect();
    let path = dir.join("synthetic.jsonl");
    jsonl::write(&path, &rows).unwrap();
    path
}

#[test]
fn silver_decile_of_a_thousand_without_filter() {
    let dir = tempfile::tempdir().unwrap();
    let bronze = synthetic_bronze(dir.path(), 1000);
    let cfg = write_config(
        dir.path(),
        &format!("[silver]\ninput = {}\nfilter = false\npercents = 1, 5, 10", bronze.display()),
    );
    let out = dir.path().join("out");
    run_ok("silver", &cfg, &out, &[]);
    let counts: Vec<usize> = ["1", "5", "10"]
        .iter()
        .map(|p| read_manifest(&out.join(format!("silver_{p}.jsonl"))).unwrap().records_out)
        .collect();
    assert_eq!(counts, [10, 50, 100]);
    let m = read_manifest(&out.join("silver_10.jsonl")).unwrap();
    assert_eq!(m.records_in, 1000);
    assert_eq!(m.details["filter_rejected"], 0);
    assert_eq!(m.details["percent"], 10.0);
    let tier: Vec<Value> = jsonl::read(&out.join("silver_10.jsonl")).unwrap();
    assert!(tier.iter().all(|r| r.get("score").is_some_and(Value::is_f64)));
}

#[test]
fn augment_doubles_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures();
    let cfg = write_config(
        dir.path(),
        &format!(
            "[augment]\nmethod = spelling\ndictionary = {}\nembeddings = {}",
            fx.join("spelling.jsonl").display(),
            fx.join("embeddings.txt").display()
        ),
    );
    run_ok("ingest", &cfg, dir.path(), &[]);
    run_ok("bronze", &cfg, dir.path(), &[]);
    let n = jsonl::count_records(&dir.path().join("bronze.jsonl")).unwrap();
    for aug in ["spelling", "embed", "tfidf-insert", "tfidf-replace"] {
        run_ok("augment", &cfg, dir.path(), &["--aug", aug, "--rate", "0.2", "--k", "2", "--seed", "9"]);
        let out = dir.path().join(format!("augmented_{aug}.jsonl"));
        let m = read_manifest(&out).unwrap();
        assert_eq!((m.records_in, m.records_out), (n, 2 * n), "{aug}");
        assert_eq!(m.details["method"], aug);
        assert_eq!(m.seed, 9);
        let rows: Vec<Triplet> = jsonl::read(&out).unwrap();
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].augmentation, None);
            assert_eq!(pair[1].augmentation.as_deref(), Some(aug));
            assert_eq!(pair[0].e[pair[0].span()], pair[1].e[pair[1].span()]);
        }
    }
    assert_eq!(code(&forge("augment", &cfg, dir.path(), &["--aug", "shuffle"])), 2);
    assert_eq!(code(&forge("augment", &cfg, dir.path(), &["--rate", "1.5"])), 2);
}

#[test]
fn process_backend_round_trip_and_dimension_check() {
    let dir = tempfile::tempdir().unwrap();
    let script = fixtures().join("letter_backend.py");
    let cfg = write_config(
        dir.path(),
        &format!("[evaluate]\nbackend = process\ncommand = python3 {}\nfrom = bronze.jsonl", script.display()),
    );
    run_ok("ingest", &cfg, dir.path(), &[]);
    run_ok("bronze", &cfg, dir.path(), &[]);
    run_ok("evaluate", &cfg, dir.path(), &[]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let n = jsonl::count_records(&dir.path().join("bronze.jsonl")).unwrap();
    assert_eq!(report["n_records"], 2 * n);
    assert!(report["rho_overall"].as_f64().unwrap().abs() <= 1.0);

    let cfg = write_config(
        dir.path(),
        &format!("[evaluate]\nbackend = process\ncommand = python3 {} --ragged\nfrom = bronze.jsonl", script.display()),
    );
    let o = forge("evaluate", &cfg, dir.path(), &[]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gold_merge_sample_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "[gold]\nannotations = {}\ntriplets = {}\n\n[sample]\ninput = {}\nsize_of = {}\n\n[stats]\ninput = {}, {}",
            fx.join("annotations.jsonl").display(),
            out.join("bronze.jsonl").display(),
            out.join("bronze.jsonl").display(),
            out.join("gold.jsonl").display(),
            out.join("bronze.jsonl").display(),
            out.join("sample.jsonl").display(),
        ),
    );
    run_ok("ingest", &cfg, &out, &[]);
    run_ok("bronze", &cfg, &out, &[]);
    run_ok("gold-merge", &cfg, &out, &[]);
    let agreement: Value = serde_json::from_str(&std::fs::read_to_string(out.join("agreement.json")).unwrap()).unwrap();
    assert_eq!(agreement["n"], 40);
    let labels = jsonl::count_records(&out.join("gold_labels.jsonl")).unwrap();
    assert_eq!(labels, 40);
    let gold = read_manifest(&out.join("gold.jsonl")).unwrap();
    assert_eq!(gold.records_out, read_manifest(&out.join("gold_labels.jsonl")).unwrap().details["accepted"]);

    run_ok("sample", &cfg, &out, &[]);
    assert_eq!(jsonl::count_records(&out.join("sample.jsonl")).unwrap(), gold.records_out);
    run_ok("stats", &cfg, &out, &[]);
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["tier_counts"]["sample.jsonl"], gold.records_out);
}

#[test]
fn unadjudicated_disagreement_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let ann = dir.path().join("ann.jsonl");
    std::fs::write(&ann, r#"{"triplet_id":"a","annotator_a":"accept","annotator_b":"reject"}"#).unwrap();
    let cfg = write_config(dir.path(), &format!("[gold]\nannotations = {}", ann.display()));
    assert_eq!(code(&forge("gold-merge", &cfg, dir.path(), &[])), 3);
}

#[test]
fn stats_match_hand_counted_golden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    run_ok("ingest", &cfg, dir.path(), &[]);
    run_ok("bronze", &cfg, dir.path(), &[]);
    run_ok("stats", &cfg, dir.path(), &[]);
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("golden/bronze_counts.json")).unwrap()).unwrap();
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    let bronze = &stats["files"]["bronze.jsonl"];
    assert_eq!(bronze["records"], golden["triplets"]);
    assert_eq!(bronze["distinct_mwes"], golden["distinct_mwes"]);
    assert_eq!(bronze["length_histogram"], golden["length_histogram"]);
    let ingest = read_manifest(&dir.path().join("sentences.jsonl")).unwrap();
    assert_eq!(ingest.records_out as u64, golden["sentences"].as_u64().unwrap());
}

#[test]
fn empty_dataset_stats_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let cfg = write_config(dir.path(), &format!("[stats]\ninput = {}", empty.display()));
    run_ok("stats", &cfg, dir.path(), &[]);
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["total_records"], 0);
    assert_eq!(stats["files"]["empty.jsonl"]["distinct_mwes"], 0);
    assert_eq!(stats["files"]["empty.jsonl"]["length_histogram"], serde_json::json!({}));
}

#[test]
fn every_output_has_a_manifest_with_the_run_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[evaluate]\nbackend = hashing\nfrom = bronze.jsonl");
    let out = dir.path().join("out");
    for stage in ["ingest", "bronze", "silver", "enrich", "evaluate", "stats"] {
        run_ok(stage, &cfg, &out, &[]);
    }
    let expected = idiomforge::Config::load(&cfg).unwrap().hash();
    let mut outputs = 0;
    for entry in std::fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".manifest.json") {
            continue;
        }
        let m: PipelineManifest = read_manifest(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(m.config_hash, expected, "{name}");
        assert!(m.outputs.contains(&name), "{name} not listed in its manifest");
        outputs += 1;
    }
    assert_eq!(outputs, 9);
}
