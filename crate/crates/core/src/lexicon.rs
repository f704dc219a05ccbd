//! Gender classes, the configurable gender lexicon, and caption labeling.
//!
//! Labeling is purely lexical: text is lowercased, split on every
//! non-alphanumeric character, and each token is looked up in the three
//! term sets. No stemming, no coreference.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{CaptionRecord, MASK_TOKEN};
use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.json");

/// Gender assigned to a caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenderClass {
    Man,
    Woman,
    Neutral,
    /// Both man and woman terms present. Excluded from per-gender aggregates.
    Mixed,
}

impl GenderClass {
    /// The three classes that can be scored or filled into a mask.
    pub const SCORABLE: [GenderClass; 3] =
        [GenderClass::Man, GenderClass::Woman, GenderClass::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            GenderClass::Man => "man",
            GenderClass::Woman => "woman",
            GenderClass::Neutral => "neutral",
            GenderClass::Mixed => "mixed",
        }
    }

    /// Suffix used in sidecar keys for filled variants (`<id>#man`, `<id>#woman`, `<id>#person`).
    pub fn variant_suffix(self) -> Option<&'static str> {
        match self {
            GenderClass::Man => Some("man"),
            GenderClass::Woman => Some("woman"),
            GenderClass::Neutral => Some("person"),
            GenderClass::Mixed => None,
        }
    }
}

impl fmt::Display for GenderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "man" | "m" | "male" => Ok(GenderClass::Man),
            "woman" | "w" | "female" => Ok(GenderClass::Woman),
            "neutral" | "person" | "n" => Ok(GenderClass::Neutral),
            "mixed" => Ok(GenderClass::Mixed),
            other => Err(Error::InvalidInput(format!(
                "unknown gender class `{other}`"
            ))),
        }
    }
}

/// Lowercase and split on non-alphanumeric boundaries.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Deserialize)]
struct LexiconFile {
    man: Vec<String>,
    woman: Vec<String>,
    neutral: Vec<String>,
    anchors: AnchorFile,
}

#[derive(Debug, Deserialize)]
struct AnchorFile {
    man: String,
    woman: String,
    #[serde(alias = "person")]
    neutral: String,
}

#[derive(Debug, Clone)]
struct TermSet {
    ordered: Vec<String>,
    lookup: HashSet<String>,
}

impl TermSet {
    fn new(class: &str, terms: Vec<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Lexicon(format!("`{class}` term list is empty")));
        }
        let mut ordered = Vec::with_capacity(terms.len());
        let mut lookup = HashSet::new();
        for raw in terms {
            let term = raw.trim().to_lowercase();
            if tokenize(&term) != [term.clone()] {
                return Err(Error::Lexicon(format!(
                    "`{class}` term `{raw}` is not a single alphanumeric token"
                )));
            }
            if lookup.insert(term.clone()) {
                ordered.push(term);
            }
        }
        Ok(TermSet { ordered, lookup })
    }
}

/// Man, woman and neutral term sets plus one sentence-level anchor phrase per class.
///
/// The first term of each set is the canonical surface form used to fill
/// `<MASK>` and to look up the class vector at the word level.
#[derive(Debug, Clone)]
pub struct GenderLexicon {
    man: TermSet,
    woman: TermSet,
    neutral: TermSet,
    anchors: [String; 3],
}

impl Default for GenderLexicon {
    fn default() -> Self {
        GenderLexicon::from_json_str(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }
}

impl GenderLexicon {
    pub fn new(
        man: Vec<String>,
        woman: Vec<String>,
        neutral: Vec<String>,
        anchors: [String; 3],
    ) -> Result<Self> {
        let lexicon = GenderLexicon {
            man: TermSet::new("man", man)?,
            woman: TermSet::new("woman", woman)?,
            neutral: TermSet::new("neutral", neutral)?,
            anchors,
        };
        lexicon.check()?;
        Ok(lexicon)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: LexiconFile =
            serde_json::from_str(s).map_err(|e| Error::Lexicon(e.to_string()))?;
        GenderLexicon::new(
            file.man,
            file.woman,
            file.neutral,
            [file.anchors.man, file.anchors.woman, file.anchors.neutral],
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GenderLexicon::from_json_str(&text)
            .map_err(|e| Error::Lexicon(format!("{}: {e}", path.display())))
    }

    fn check(&self) -> Result<()> {
        let pairs = [
            ("man", &self.man, "woman", &self.woman),
            ("man", &self.man, "neutral", &self.neutral),
            ("woman", &self.woman, "neutral", &self.neutral),
        ];
        for (a_name, a, b_name, b) in pairs {
            let mut shared: Vec<&String> = a.lookup.intersection(&b.lookup).collect();
            if !shared.is_empty() {
                shared.sort();
                return Err(Error::Lexicon(format!(
                    "`{a_name}` and `{b_name}` share terms {shared:?}"
                )));
            }
        }
        for (class, anchor) in ["man", "woman", "neutral"].iter().zip(&self.anchors) {
            if anchor.trim().is_empty() {
                return Err(Error::Lexicon(format!("`{class}` anchor phrase is empty")));
            }
        }
        Ok(())
    }

    fn set(&self, class: GenderClass) -> Option<&TermSet> {
        match class {
            GenderClass::Man => Some(&self.man),
            GenderClass::Woman => Some(&self.woman),
            GenderClass::Neutral => Some(&self.neutral),
            GenderClass::Mixed => None,
        }
    }

    pub fn terms(&self, class: GenderClass) -> &[String] {
        self.set(class).map(|s| s.ordered.as_slice()).unwrap_or(&[])
    }

    /// First term of the class's set; `None` for `Mixed`.
    pub fn canonical(&self, class: GenderClass) -> Option<&str> {
        self.set(class).map(|s| s.ordered[0].as_str())
    }

    /// Sentence-level anchor phrase, also used as its key in embedding sidecars.
    pub fn anchor(&self, class: GenderClass) -> Option<&str> {
        match class {
            GenderClass::Man => Some(&self.anchors[0]),
            GenderClass::Woman => Some(&self.anchors[1]),
            GenderClass::Neutral => Some(&self.anchors[2]),
            GenderClass::Mixed => None,
        }
    }

    /// Class owning `token`, if any. Expects an already-lowercased token.
    pub fn class_of(&self, token: &str) -> Option<GenderClass> {
        if self.man.lookup.contains(token) {
            Some(GenderClass::Man)
        } else if self.woman.lookup.contains(token) {
            Some(GenderClass::Woman)
        } else if self.neutral.lookup.contains(token) {
            Some(GenderClass::Neutral)
        } else {
            None
        }
    }

    /// True when the whole label (lowercased, trimmed) equals a lexicon term.
    pub fn is_person_label(&self, label: &str) -> bool {
        self.class_of(label.trim().to_lowercase().as_str())
            .is_some()
    }

    pub fn label(&self, text: &str) -> GenderClass {
        label_caption_gender(text, self)
    }
}

/// Assign a gender class to raw caption text.
pub fn label_caption_gender(text: &str, lexicon: &GenderLexicon) -> GenderClass {
    let mut man = false;
    let mut woman = false;
    for token in tokenize(text) {
        match lexicon.class_of(&token) {
            Some(GenderClass::Man) => man = true,
            Some(GenderClass::Woman) => woman = true,
            _ => {}
        }
    }
    match (man, woman) {
        (true, true) => GenderClass::Mixed,
        (true, false) => GenderClass::Man,
        (false, true) => GenderClass::Woman,
        (false, false) => GenderClass::Neutral,
    }
}

/// Replace the `<MASK>` slot with the canonical term of `class`.
pub fn fill_mask(
    record: &CaptionRecord,
    class: GenderClass,
    lexicon: &GenderLexicon,
) -> Result<String> {
    if !record.mask_present() {
        return Err(Error::InvalidInput(format!(
            "caption `{}` has no {MASK_TOKEN} slot",
            record.id
        )));
    }
    let term = lexicon.canonical(class).ok_or_else(|| {
        Error::InvalidInput(format!(
            "cannot fill caption `{}` with class mixed",
            record.id
        ))
    })?;
    Ok(record.text.replacen(MASK_TOKEN, term, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Source;

    fn masked(text: &str) -> CaptionRecord {
        CaptionRecord::new("c1", "img1", text, Source::Model).unwrap()
    }

    #[test]
    fn labels_single_both_and_neutral() {
        let lex = GenderLexicon::default();
        assert_eq!(lex.label("a man riding a horse"), GenderClass::Man);
        assert_eq!(
            lex.label("a man and a woman at a table"),
            GenderClass::Mixed
        );
        assert_eq!(
            lex.label("a person holding an umbrella"),
            GenderClass::Neutral
        );
        assert_eq!(lex.label("two girls playing"), GenderClass::Woman);
        assert_eq!(lex.label("a dog on a couch"), GenderClass::Neutral);
    }

    #[test]
    fn labeling_is_case_insensitive_and_word_bounded() {
        let lex = GenderLexicon::default();
        assert_eq!(lex.label("A MAN, surfing"), GenderClass::Man);
        // "human" is neutral, "woman" inside "womanly" is not a token match
        assert_eq!(lex.label("a human-like robot"), GenderClass::Neutral);
        assert_eq!(lex.label("a womanly figure"), GenderClass::Neutral);
        assert_eq!(lex.label("the man's hat"), GenderClass::Man);
    }

    #[test]
    fn fills_mask_with_canonical_terms() {
        let lex = GenderLexicon::default();
        let r = masked("a <MASK> hitting a tennis ball");
        assert_eq!(
            fill_mask(&r, GenderClass::Man, &lex).unwrap(),
            "a man hitting a tennis ball"
        );
        let r = masked("a <MASK> holding an umbrella in the rain");
        assert_eq!(
            fill_mask(&r, GenderClass::Woman, &lex).unwrap(),
            "a woman holding an umbrella in the rain"
        );
        let r = masked("a <MASK> walking");
        assert_eq!(
            fill_mask(&r, GenderClass::Neutral, &lex).unwrap(),
            "a person walking"
        );
    }

    #[test]
    fn fill_mask_rejects_mixed_and_unmasked() {
        let lex = GenderLexicon::default();
        assert!(fill_mask(&masked("a <MASK> walking"), GenderClass::Mixed, &lex).is_err());
        assert!(fill_mask(&masked("a man walking"), GenderClass::Man, &lex).is_err());
    }

    #[test]
    fn rejects_overlapping_or_empty_sets() {
        let anchors = [
            "a man".to_string(),
            "a woman".to_string(),
            "a person".to_string(),
        ];
        let s = |v: &[&str]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        let err = GenderLexicon::new(
            s(&["man", "kid"]),
            s(&["woman"]),
            s(&["kid"]),
            anchors.clone(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("kid"), "{err}");
        assert!(
            GenderLexicon::new(s(&[]), s(&["woman"]), s(&["person"]), anchors.clone()).is_err()
        );
        assert!(GenderLexicon::new(s(&["Man"]), s(&["woman"]), s(&["person"]), anchors).is_ok());
    }

    #[test]
    fn rejects_multi_token_terms() {
        let err = GenderLexicon::from_json_str(
            r#"{"man":["old man"],"woman":["woman"],"neutral":["person"],
                "anchors":{"man":"a man","woman":"a woman","neutral":"a person"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Lexicon(_)));
    }

    #[test]
    fn default_lexicon_canonicals_and_anchors() {
        let lex = GenderLexicon::default();
        assert_eq!(lex.canonical(GenderClass::Man), Some("man"));
        assert_eq!(lex.canonical(GenderClass::Woman), Some("woman"));
        assert_eq!(lex.canonical(GenderClass::Neutral), Some("person"));
        assert_eq!(lex.anchor(GenderClass::Woman), Some("a woman"));
        assert!(lex.is_person_label("Person"));
        assert!(!lex.is_person_label("umbrella"));
    }
}
