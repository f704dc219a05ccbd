//! Gender score for free text, with a keyword standing in for the image.
//!
//! cargo run --example text_only

use std::path::Path;

use biasaudit::estimate::DEFAULT_TIE_EPSILON;
use biasaudit::text_only::{load_text_records, text_only_score, DEFAULT_KEYWORD_CONFIDENCE};
use biasaudit::{EmbeddingStore, LmSidecar, Sidecars};

fn main() -> biasaudit::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let records = load_text_records(&dir.join("text.jsonl"))?;
    let emb = EmbeddingStore::load_sidecar(&dir.join("sidecar_emb.jsonl"))?;
    let lm = LmSidecar::load(&dir.join("sidecar_lm.jsonl"))?;
    let (scores, summary) = text_only_score(
        &records,
        Sidecars {
            embeddings: &emb,
            lm: &lm,
        },
        DEFAULT_KEYWORD_CONFIDENCE,
        DEFAULT_TIE_EPSILON,
    )?;
    for s in &scores {
        println!(
            "{} {:<9} man {:.3} woman {:.3} -> {}",
            s.id,
            s.keyword.as_deref().unwrap_or("-"),
            s.score_man,
            s.score_woman,
            s.predicted
        );
    }
    println!(
        "to-m {:.2} to-w {:.2}",
        summary.to_m.unwrap(),
        summary.to_w.unwrap()
    );
    Ok(())
}
