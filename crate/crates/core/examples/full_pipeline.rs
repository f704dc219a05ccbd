//! Every stage over the fixture corpus, ending in the report tables.
//!
//! cargo run --example full_pipeline [-- OUT_DIR]

use std::path::{Path, PathBuf};

use biasaudit::cooc::{per_image_ratio, CoocSummary, Leakage};
use biasaudit::dataset::{load_captions, load_contexts};
use biasaudit::distance::{aggregate_distance_table, DistanceInputs, Level};
use biasaudit::estimate::{estimation_report, EstimateOptions};
use biasaudit::jsonl::write_json;
use biasaudit::report::{artifact, build_report};
use biasaudit::revision::{score_dataset, summarize, ScoreOptions};
use biasaudit::{cooc_counts, EmbeddingStore, GenderLexicon, LmSidecar, Sidecars, Source};

fn main() -> biasaudit::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("biasaudit-example"));
    std::fs::create_dir_all(&out).map_err(|e| biasaudit::Error::InvalidInput(e.to_string()))?;

    let lexicon = GenderLexicon::default();
    let captions = load_captions(&fixtures.join("captions.jsonl"))?;
    let contexts = load_contexts(&fixtures.join("contexts.jsonl"))?;
    let words = EmbeddingStore::load_word_vectors(&fixtures.join("vectors.txt"))?;
    let emb = EmbeddingStore::load_sidecar(&fixtures.join("sidecar_emb.jsonl"))?;
    let lm = LmSidecar::load(&fixtures.join("sidecar_lm.jsonl"))?;
    let sidecars = Sidecars {
        embeddings: &emb,
        lm: &lm,
    };

    let word = aggregate_distance_table(
        &captions,
        &contexts,
        DistanceInputs::Word(&words),
        &lexicon,
        10,
    )?;
    write_json(&out.join(artifact::distance_json(Level::Word)), &word)?;

    let scored = score_dataset(
        &captions,
        &contexts,
        sidecars,
        &lexicon,
        ScoreOptions::default(),
    )?;
    write_json(
        &out.join(artifact::SCORE_SUMMARY),
        &summarize(&scored, Default::default()),
    )?;

    let estimates = estimation_report(
        &captions,
        &contexts,
        sidecars,
        EstimateOptions::default(),
        None,
    );
    write_json(&out.join(artifact::ESTIMATE_SUMMARY), &estimates.summary)?;

    let (model, human): (Vec<_>, Vec<_>) = captions
        .iter()
        .cloned()
        .partition(|c| c.source == Source::Model);
    let m = cooc_counts(&model, &lexicon, None);
    let h = cooc_counts(&human, &lexicon, None);
    write_json(
        &out.join(artifact::LEAKAGE),
        &Leakage::new(m.man, m.woman, h.man, h.woman),
    )?;
    let summary = CoocSummary {
        source: "model".into(),
        per_image_to_m: per_image_ratio(&model, &lexicon),
        counts: m,
    };
    write_json(&out.join(artifact::COOC_SUMMARY), &summary)?;

    let report = build_report(&out, &[], "fixture")?;
    report.write(&out)?;
    for (kind, table) in &report.tables {
        println!("-- {}", kind.name());
        print!("{}", table.to_csv()?);
    }
    println!("tables written to {}", out.display());
    Ok(())
}
