//! Predict the gender of masked captions from revised fill scores.
//!
//! cargo run --example estimate_gender

use biasaudit::dataset::VisualContext;
use biasaudit::estimate::EstimateOptions;
use biasaudit::{
    estimate_gender, CaptionRecord, ContextObject, EmbeddingStore, LmSidecar, Sidecars, Source,
};

fn main() -> biasaudit::Result<()> {
    // Both fills sit at cosine 0.6 from the paddle, seen with confidence 0.5,
    // so each score is the square root of its LM probability.
    let emb = EmbeddingStore::from_pairs([
        ("paddle", vec![1.0, 0.0]),
        ("c1#man", vec![0.6, 0.8]),
        ("c1#woman", vec![0.6, 0.8]),
        ("c2#man", vec![0.6, 0.8]),
        ("c2#woman", vec![0.6, 0.8]),
    ])?;
    let lm = LmSidecar::from_probs([
        ("c1#man", 0.1089),
        ("c1#woman", 0.09),
        ("c2#man", 0.2025),
        ("c2#woman", 0.2025),
    ]);
    let context = VisualContext {
        image_id: "img".into(),
        objects: vec![ContextObject::new("paddle", 0.5, "detector")],
    };
    let sidecars = Sidecars {
        embeddings: &emb,
        lm: &lm,
    };
    for id in ["c1", "c2"] {
        let caption = CaptionRecord::new(id, "img", "a <MASK> holding a paddle", Source::Model)?;
        let p = estimate_gender(&caption, &context, sidecars, EstimateOptions::default())?;
        println!(
            "{id}: man {:.2} woman {:.2} -> {}",
            p.score_man, p.score_woman, p.predicted
        );
    }
    Ok(())
}
