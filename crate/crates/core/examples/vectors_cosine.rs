//! Load word vectors and compare gender terms with object labels.
//!
//! cargo run --example vectors_cosine

use std::path::Path;

use biasaudit::{cosine, EmbeddingStore};

fn main() -> biasaudit::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/vectors.txt");
    let store = EmbeddingStore::load_word_vectors(&path)?;
    println!("{} vectors of dimension {}", store.len(), store.dim());

    let man = store.get("man").expect("man in vocabulary");
    let woman = store.get("woman").expect("woman in vocabulary");
    for label in ["bicycle", "kitchen", "tennis racket"] {
        // multi-word labels fall back to the mean of their token vectors
        let v = store.phrase_vector(label).expect("label in vocabulary");
        println!(
            "{label:<14} man {:+.3}  woman {:+.3}",
            cosine(man, &v)?,
            cosine(woman, &v)?
        );
    }
    Ok(())
}
