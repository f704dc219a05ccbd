//! End-to-end runs of the binary: outputs, exit codes and error records.

mod common;

use common::{biasaudit, fixture, ok, run_pipeline};
use serde_json::Value;

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_record(out: &std::process::Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error record");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("not JSON: {line}: {e}"))
}

#[test]
fn full_pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(dir.path(), None);
    for name in [
        "validation.json",
        "filtered/visual_context.jsonl",
        "distance_word.json",
        "distance_sentence.csv",
        "scored.jsonl",
        "predictions.jsonl",
        "cooc_summary.json",
        "human/cooc_summary.json",
        "leakage.json",
        "text_summary.json",
        "report.json",
        "table_estimation.csv",
        "table_distance.csv",
    ] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }

    let filtered =
        std::fs::read_to_string(dir.path().join("filtered/visual_context.jsonl")).unwrap();
    assert_eq!(
        filtered,
        std::fs::read_to_string(fixture("contexts.jsonl")).unwrap()
    );

    let predictions = std::fs::read_to_string(dir.path().join("predictions.jsonl")).unwrap();
    let first: Vec<Value> = predictions
        .lines()
        .take(2)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(first[0]["caption_id"], "x00");
    assert_eq!(first[0]["predicted"], "man");
    assert_eq!(first[1]["predicted"], "neutral");

    let validation = read_json(&dir.path().join("validation.json"));
    assert_eq!(validation["error_count"], 0);
    assert_eq!(validation["warning_count"], 0);

    let csv = std::fs::read_to_string(dir.path().join("table_estimation.csv")).unwrap();
    assert!(
        csv.starts_with("label,man,woman,neutral,to_m,to_w\nfixture,"),
        "{csv}"
    );
}

#[test]
fn validation_failure_exits_one_with_key() {
    let dir = tempfile::tempdir().unwrap();
    let lm = dir.path().join("lm.jsonl");
    let body = std::fs::read_to_string(fixture("sidecar_lm.jsonl")).unwrap();
    let kept: Vec<&str> = body
        .lines()
        .filter(|l| !l.contains("\"x05#woman\""))
        .collect();
    std::fs::write(&lm, kept.join("\n") + "\n").unwrap();
    let out = biasaudit(
        &[
            "validate",
            "--captions",
            "captions.jsonl",
            "--sidecar-lm",
            lm.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["error_count"], 1);
    assert_eq!(report["errors"][0]["key"], "x05#woman");
}

#[test]
fn bad_vector_line_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let vectors = dir.path().join("v.txt");
    let body = std::fs::read_to_string(fixture("vectors.txt")).unwrap();
    let mut lines: Vec<String> = body.lines().map(str::to_string).collect();
    lines[3] = lines[3]
        .split_whitespace()
        .take(3)
        .collect::<Vec<_>>()
        .join(" ");
    std::fs::write(&vectors, lines.join("\n") + "\n").unwrap();
    let out = biasaudit(&["validate", "--vectors", vectors.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["errors"][0]["line"], 4);

    let out = biasaudit(
        &[
            "distance",
            "--level",
            "word",
            "--vectors",
            vectors.to_str().unwrap(),
            "--captions",
            "captions.jsonl",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_record(&out)["code"], "parse");
}

#[test]
fn missing_sidecar_key_while_scoring_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let emb = dir.path().join("emb.jsonl");
    let body = std::fs::read_to_string(fixture("sidecar_emb.jsonl")).unwrap();
    let kept: Vec<&str> = body
        .lines()
        .filter(|l| !l.starts_with("{\"key\":\"paddle\""))
        .collect();
    std::fs::write(&emb, kept.join("\n") + "\n").unwrap();
    let out = biasaudit(
        &[
            "score",
            "--captions",
            "captions.jsonl",
            "--contexts",
            "contexts.jsonl",
            "--sidecar-emb",
            emb.to_str().unwrap(),
            "--sidecar-lm",
            "sidecar_lm.jsonl",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let rec = stderr_record(&out);
    assert_eq!(rec["code"], "missing_key");
    assert!(rec["message"].as_str().unwrap().contains("paddle"));
}

#[test]
fn report_without_artifacts_names_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = biasaudit(
        &[
            "report",
            "--run",
            dir.path().to_str().unwrap(),
            "--table",
            "estimation",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let rec = stderr_record(&out);
    assert_eq!(rec["code"], "missing_artifact");
    assert!(rec["message"]
        .as_str()
        .unwrap()
        .contains("run `estimate` first"));
}

#[test]
fn unreadable_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = biasaudit(
        &[
            "cooc",
            "--captions",
            "nope.jsonl",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["code"], "io");
}

#[test]
fn config_file_applies_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("audit.toml");
    std::fs::write(&cfg, "strategy = \"mean_topk\"\nthreads = 2\n").unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let score = |out: &std::path::Path, extra: &[&str]| {
        let mut args = vec![
            "score",
            "--captions",
            "captions.jsonl",
            "--contexts",
            "contexts.jsonl",
            "--sidecar-emb",
            "sidecar_emb.jsonl",
            "--sidecar-lm",
            "sidecar_lm.jsonl",
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        ok(&args, None);
        read_json(&out.join("score_summary.json"))["strategy"].clone()
    };
    assert_eq!(score(&a, &[]), "max_sim");
    assert_eq!(score(&b, &["--config", cfg.to_str().unwrap()]), "mean_topk");
    assert_eq!(
        score(
            &c,
            &["--config", cfg.to_str().unwrap(), "--strategy", "max_sim"]
        ),
        "max_sim"
    );
    assert_eq!(
        std::fs::read(a.join("scored.jsonl")).unwrap(),
        std::fs::read(c.join("scored.jsonl")).unwrap()
    );

    std::fs::write(&cfg, "no_such_setting = 1\n").unwrap();
    let out = biasaudit(
        &[
            "cooc",
            "--captions",
            "captions.jsonl",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            a.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_record(&out)["code"], "config");
}

#[test]
fn custom_lexicon_changes_labels() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("lex.json");
    std::fs::write(
        &lex,
        r#"{"man":["man"],"woman":["woman"],"neutral":["person"],"anchors":{"man":"a man","woman":"a woman","neutral":"a person"}}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(
        &[
            "cooc",
            "--captions",
            "captions.jsonl",
            "--out",
            a.to_str().unwrap(),
        ],
        None,
    );
    ok(
        &[
            "cooc",
            "--captions",
            "captions.jsonl",
            "--lexicon",
            lex.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
        ],
        None,
    );
    let (ca, cb) = (
        read_json(&a.join("cooc_summary.json")),
        read_json(&b.join("cooc_summary.json")),
    );
    assert!(cb["man"].as_u64().unwrap() < ca["man"].as_u64().unwrap());
}

#[test]
fn leakage_from_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, m: usize, w: usize| {
        let p = dir.path().join(name);
        std::fs::write(
            &p,
            format!(r#"{{"source":"x","man":{m},"woman":{w},"neutral":0,"mixed":0,"to_m":null,"to_w":null,"per_image_to_m":null}}"#),
        )
        .unwrap();
        p
    };
    let (m, h) = (write("m.json", 792, 408), write("h.json", 930, 291));
    let o = dir.path().join("o");
    ok(
        &[
            "leakage",
            "--model",
            m.to_str().unwrap(),
            "--human",
            h.to_str().unwrap(),
            "--out",
            o.to_str().unwrap(),
        ],
        None,
    );
    ok(
        &[
            "report",
            "--run",
            o.to_str().unwrap(),
            "--label",
            "Transformer",
        ],
        None,
    );
    let csv = std::fs::read_to_string(o.join("table_leakage.csv")).unwrap();
    assert_eq!(csv, "label,model_m,model_w,human_m,human_w,leakage_m,leakage_w\nTransformer,792,408,930,291,0.85,1.40\n");
}
