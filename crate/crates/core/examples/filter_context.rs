//! Reduce raw detector output to at most three informative objects.
//!
//! cargo run --example filter_context

use biasaudit::context::ContextFilter;
use biasaudit::{ContextObject, EmbeddingStore, GenderLexicon};

fn main() -> biasaudit::Result<()> {
    let store = EmbeddingStore::from_pairs([
        ("motorcycle", vec![0.0, 0.0, 1.0]),
        ("motorbike", vec![0.0, 0.1, 0.99]),
        ("helmet", vec![1.0, 0.0, 0.0]),
        ("road", vec![0.0, 1.0, 0.0]),
        ("tree", vec![0.6, 0.6, 0.0]),
    ])?;
    let candidates = vec![
        ContextObject::new("person", 0.98, "detector"),
        ContextObject::new("motorcycle", 0.91, "detector"),
        ContextObject::new("motorbike", 0.88, "classifier"),
        ContextObject::new("helmet", 0.64, "detector"),
        ContextObject::new("road", 0.42, "classifier"),
        ContextObject::new("tree", 0.31, "classifier"),
        ContextObject::new("bird", 0.07, "detector"),
    ];
    let outcome =
        ContextFilter::default().filter("img1", &candidates, &store, &GenderLexicon::default());
    for o in &outcome.context.objects {
        println!("{:<12} {:.2} ({})", o.label, o.confidence, o.classifier);
    }
    Ok(())
}
