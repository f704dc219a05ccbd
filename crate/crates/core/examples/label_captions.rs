//! Label captions by gender and fill masked ones.
//!
//! cargo run --example label_captions

use biasaudit::{fill_mask, CaptionRecord, GenderLexicon, Source};

fn main() -> biasaudit::Result<()> {
    let lexicon = GenderLexicon::default();
    for text in [
        "a man riding a horse",
        "two girls playing frisbee",
        "a man and a woman at a table",
        "a person holding an umbrella",
        "a dog on a couch",
    ] {
        println!("{:<32} {}", text, lexicon.label(text).as_str());
    }

    let masked = CaptionRecord::new("c1", "img1", "a <MASK> holding a paddle", Source::Model)?;
    for class in biasaudit::GenderClass::SCORABLE {
        println!(
            "{:<8} -> {}",
            class.as_str(),
            fill_mask(&masked, class, &lexicon)?
        );
    }
    Ok(())
}
