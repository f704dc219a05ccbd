//! Word- and sentence-level gender/object similarity over the fixture corpus.
//!
//! cargo run --example gender_distance

use std::path::Path;

use biasaudit::dataset::{load_captions, load_contexts};
use biasaudit::distance::{aggregate_distance_table, DistanceInputs};
use biasaudit::report::{distance_table, fmt_opt};
use biasaudit::{bias_ratio_to_m, EmbeddingStore, GenderLexicon};

fn main() -> biasaudit::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let lexicon = GenderLexicon::default();
    let captions = load_captions(&dir.join("captions.jsonl"))?;
    let contexts = load_contexts(&dir.join("contexts.jsonl"))?;
    let words = EmbeddingStore::load_word_vectors(&dir.join("vectors.txt"))?;
    let sentences = EmbeddingStore::load_sidecar(&dir.join("sidecar_emb.jsonl"))?;

    let word = aggregate_distance_table(
        &captions,
        &contexts,
        DistanceInputs::Word(&words),
        &lexicon,
        3,
    )?;
    print!("{}", distance_table(&word).to_csv()?);
    println!(
        "closest to man: {:?}",
        word.top_man.iter().map(|r| &r.subject).collect::<Vec<_>>()
    );

    let sent = aggregate_distance_table(
        &captions,
        &contexts,
        DistanceInputs::Sentence(&sentences),
        &lexicon,
        3,
    )?;
    println!("sentence level to-m {}", fmt_opt(sent.corpus.to_m));

    // the ratio on two reported averages
    println!(
        "bicycle 0.31 vs 0.27 -> {:.4}",
        bias_ratio_to_m(0.31, 0.27).unwrap()
    );
    Ok(())
}
