//! Belief-revision gender score: raw formula, one caption, and a corpus.
//!
//! cargo run --example gender_score

use std::path::Path;

use biasaudit::dataset::{load_captions, load_contexts};
use biasaudit::revision::{score_dataset, summarize, ScoreOptions};
use biasaudit::{alpha, revise, EmbeddingStore, GenderLexicon, LmSidecar, Sidecars, Strategy};

fn main() -> biasaudit::Result<()> {
    // related (sim 0.8), moderately common (confidence 0.5) object
    let a = alpha(0.8, 0.5);
    println!("alpha {a:.4}; 0.5 revised to {:.4}", revise(0.5, a));
    println!(
        "unrelated object leaves p alone: {}",
        revise(0.5, alpha(0.0, 0.5))
    );

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let captions = load_captions(&dir.join("captions.jsonl"))?;
    let contexts = load_contexts(&dir.join("contexts.jsonl"))?;
    let emb = EmbeddingStore::load_sidecar(&dir.join("sidecar_emb.jsonl"))?;
    let lm = LmSidecar::load(&dir.join("sidecar_lm.jsonl"))?;
    let sidecars = Sidecars {
        embeddings: &emb,
        lm: &lm,
    };

    for strategy in [Strategy::MaxSim, Strategy::MeanTopk] {
        let options = ScoreOptions {
            strategy,
            ..ScoreOptions::default()
        };
        let scored = score_dataset(
            &captions,
            &contexts,
            sidecars,
            &GenderLexicon::default(),
            options,
        )?;
        let s = summarize(&scored, strategy);
        println!(
            "{strategy:?}: man {:.4} woman {:.4} person {:.4} to-m {:.4}",
            s.man.mean_score.unwrap_or(f64::NAN),
            s.woman.mean_score.unwrap_or(f64::NAN),
            s.person.mean_score.unwrap_or(f64::NAN),
            s.to_m.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
