//! Object-gender co-occurrence counting and leakage.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::CaptionRecord;
use crate::distance::bias_ratio_to_m;
use crate::lexicon::{tokenize, GenderClass, GenderLexicon};
use crate::revision::ScoredCaption;

/// Whether `label` occurs in `text` as a whole-word (token sequence) match, case-insensitive.
pub fn mentions(text: &str, label: &str) -> bool {
    let needle = tokenize(label);
    if needle.is_empty() {
        return false;
    }
    tokenize(text)
        .windows(needle.len())
        .any(|w| w == needle.as_slice())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoocCounts {
    pub man: usize,
    pub woman: usize,
    pub neutral: usize,
    pub mixed: usize,
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
}

impl CoocCounts {
    fn add(&mut self, class: GenderClass) {
        match class {
            GenderClass::Man => self.man += 1,
            GenderClass::Woman => self.woman += 1,
            GenderClass::Neutral => self.neutral += 1,
            GenderClass::Mixed => self.mixed += 1,
        }
    }

    fn finish(mut self) -> Self {
        self.to_m = bias_ratio_to_m(self.man as f64, self.woman as f64);
        self.to_w = bias_ratio_to_m(self.woman as f64, self.man as f64);
        self
    }
}

/// Count captions per gender class, optionally only those mentioning `object_filter`.
///
/// Masked captions carry no gender and are ignored.
pub fn cooc_counts(
    captions: &[CaptionRecord],
    lexicon: &GenderLexicon,
    object_filter: Option<&str>,
) -> CoocCounts {
    let mut counts = CoocCounts::default();
    for c in captions {
        if c.mask_present() {
            continue;
        }
        if let Some(obj) = object_filter {
            if !mentions(&c.text, obj) {
                continue;
            }
        }
        counts.add(lexicon.label(&c.text));
    }
    counts.finish()
}

/// Mean over images of the per-image man share among gendered captions.
///
/// Images with no man or woman caption do not contribute. Used for human
/// references, where each image has several captions.
pub fn per_image_ratio(captions: &[CaptionRecord], lexicon: &GenderLexicon) -> Option<f64> {
    let mut per_image: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for c in captions.iter().filter(|c| !c.mask_present()) {
        let entry = per_image.entry(c.image_id.as_str()).or_default();
        match lexicon.label(&c.text) {
            GenderClass::Man => entry.0 += 1,
            GenderClass::Woman => entry.1 += 1,
            _ => {}
        }
    }
    let ratios: Vec<f64> = per_image
        .values()
        .filter_map(|&(m, w)| bias_ratio_to_m(m as f64, w as f64))
        .collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

#[derive(Debug, Clone, Copy)]
pub enum BiasMethod<'a> {
    /// Count man and woman captions mentioning the object.
    Cooc,
    /// Sum the gender scores of captions mentioning the object.
    GenderScore(&'a [ScoredCaption]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectBias {
    pub object: String,
    pub method: String,
    /// Man count or summed man score.
    pub man: f64,
    pub woman: f64,
    pub captions: usize,
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
}

/// Bias ratio toward men for captions mentioning `object`.
pub fn per_object_bias(
    captions: &[CaptionRecord],
    lexicon: &GenderLexicon,
    object: &str,
    method: BiasMethod<'_>,
) -> ObjectBias {
    let (man, woman, n, name) = match method {
        BiasMethod::Cooc => {
            let c = cooc_counts(captions, lexicon, Some(object));
            (
                c.man as f64,
                c.woman as f64,
                c.man + c.woman + c.neutral + c.mixed,
                "cooc",
            )
        }
        BiasMethod::GenderScore(scored) => {
            let texts: HashMap<&str, &str> = captions
                .iter()
                .map(|c| (c.id.as_str(), c.text.as_str()))
                .collect();
            let mut man = 0.0;
            let mut woman = 0.0;
            let mut ids = std::collections::BTreeSet::new();
            for s in scored {
                let Some(text) = texts.get(s.caption_id.as_str()) else {
                    continue;
                };
                if !mentions(text, object) {
                    continue;
                }
                match s.gender {
                    GenderClass::Man => man += s.score,
                    GenderClass::Woman => woman += s.score,
                    _ => {}
                }
                ids.insert(s.caption_id.as_str());
            }
            (man, woman, ids.len(), "gender_score")
        }
    };
    ObjectBias {
        object: object.to_string(),
        method: name.to_string(),
        man,
        woman,
        captions: n,
        to_m: bias_ratio_to_m(man, woman),
        to_w: bias_ratio_to_m(woman, man),
    }
}

/// Corpus counts written by the `cooc` subcommand and read by `leakage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoocSummary {
    /// Which captions were counted: `model`, `human` or `all`.
    pub source: String,
    #[serde(flatten)]
    pub counts: CoocCounts,
    /// Mean per-image man share; the ground-truth ratio for human references.
    pub per_image_to_m: Option<f64>,
}

/// Model mentions relative to human-reference mentions for one gender.
pub fn leakage(model_count: usize, human_count: usize) -> Option<f64> {
    (human_count > 0).then(|| model_count as f64 / human_count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    pub model_man: usize,
    pub model_woman: usize,
    pub human_man: usize,
    pub human_woman: usize,
    pub man: Option<f64>,
    pub woman: Option<f64>,
}

impl Leakage {
    pub fn new(model_man: usize, model_woman: usize, human_man: usize, human_woman: usize) -> Self {
        Leakage {
            model_man,
            model_woman,
            human_man,
            human_woman,
            man: leakage(model_man, human_man),
            woman: leakage(model_woman, human_woman),
        }
    }
}
