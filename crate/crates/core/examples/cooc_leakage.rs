//! Co-occurrence counts, per-object bias and leakage against human captions.
//!
//! cargo run --example cooc_leakage

use std::path::Path;

use biasaudit::cooc::{per_image_ratio, Leakage};
use biasaudit::dataset::load_captions;
use biasaudit::{cooc_counts, per_object_bias, BiasMethod, GenderLexicon, Source};

fn main() -> biasaudit::Result<()> {
    let lexicon = GenderLexicon::default();
    let all = load_captions(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/captions.jsonl"),
    )?;
    let (model, human): (Vec<_>, Vec<_>) = all.into_iter().partition(|c| c.source == Source::Model);

    let m = cooc_counts(&model, &lexicon, None);
    let h = cooc_counts(&human, &lexicon, None);
    println!(
        "model man {} woman {} to-m {:.2}",
        m.man,
        m.woman,
        m.to_m.unwrap_or(f64::NAN)
    );
    println!(
        "human man {} woman {} per-image to-m {:.2}",
        h.man,
        h.woman,
        per_image_ratio(&human, &lexicon).unwrap_or(f64::NAN)
    );

    let leak = Leakage::new(m.man, m.woman, h.man, h.woman);
    println!(
        "leakage m {:.2} w {:.2}",
        leak.man.unwrap_or(f64::NAN),
        leak.woman.unwrap_or(f64::NAN)
    );

    for object in ["kitchen", "skateboard", "paddle"] {
        let b = per_object_bias(&model, &lexicon, object, BiasMethod::Cooc);
        println!("{object:<11} {} captions, to-m {:?}", b.captions, b.to_m);
    }

    // Transformer benchmark counts against the human references
    let benchmark = Leakage::new(792, 408, 930, 291);
    println!(
        "benchmark leakage m {:.2} w {:.2}",
        benchmark.man.unwrap(),
        benchmark.woman.unwrap()
    );
    Ok(())
}
