//! Check that every hypothesis the scorer will ask for is in the sidecars.
//!
//! cargo run --example validate_inputs

use std::path::Path;

use biasaudit::validate::{validate_inputs, ValidationInputs};
use biasaudit::GenderLexicon;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let inputs = ValidationInputs {
        captions: Some(dir.join("captions.jsonl")),
        contexts: Some(dir.join("contexts.jsonl")),
        vectors: Some(dir.join("vectors.txt")),
        sidecar_emb: Some(dir.join("sidecar_emb.jsonl")),
        sidecar_lm: Some(dir.join("sidecar_lm.jsonl")),
        text: Some(dir.join("text.jsonl")),
        include_neutral: true,
    };
    let report = validate_inputs(&inputs, &GenderLexicon::default());
    println!(
        "{} errors, {} warnings",
        report.error_count, report.warning_count
    );
    for (kind, n) in &report.counts {
        println!("  {kind:<13} {n}");
    }
}
