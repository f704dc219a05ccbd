//! Gender-object distance at word and sentence level, the bias ratio toward
//! men, the ratio to the gender-neutral class, and corpus aggregation.
//!
//! Similarities here are cosine similarities with negatives clamped to zero,
//! so every score fed into a ratio is non-negative.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CaptionRecord, ContextMap};
use crate::error::{Error, Result};
use crate::lexicon::{GenderClass, GenderLexicon};
use crate::vectors::{cosine, EmbeddingStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Word,
    Sentence,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Word => "word",
            Level::Sentence => "sentence",
        }
    }
}

fn scorable(class: GenderClass) -> Result<()> {
    if class == GenderClass::Mixed {
        return Err(Error::InvalidInput(
            "class mixed has no gender vector".into(),
        ));
    }
    Ok(())
}

/// Clamped cosine, or `None` when a vector is unusable (zero norm).
fn clamped_sim(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    match cosine(a, b) {
        Ok(c) => Ok(Some(c.max(0.0))),
        Err(Error::ZeroNorm) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Similarity between a class's canonical term and an object label.
///
/// `Ok(None)` means one side is out of vocabulary and the pair must be skipped.
pub fn word_distance(
    object_label: &str,
    class: GenderClass,
    lexicon: &GenderLexicon,
    store: &EmbeddingStore,
) -> Result<Option<f64>> {
    scorable(class)?;
    let term = lexicon.canonical(class).expect("scorable class");
    let (Some(gender_vec), Some(object_vec)) = (store.get(term), store.phrase_vector(object_label))
    else {
        return Ok(None);
    };
    clamped_sim(gender_vec, &object_vec)
}

/// Similarity between a class anchor phrase and a caption, both taken from a sidecar.
pub fn sentence_distance(
    caption_key: &str,
    class: GenderClass,
    sidecar: &EmbeddingStore,
    lexicon: &GenderLexicon,
) -> Result<Option<f64>> {
    scorable(class)?;
    let anchor = lexicon.anchor(class).expect("scorable class");
    let (Some(anchor_vec), Some(caption_vec)) = (sidecar.get(anchor), sidecar.get(caption_key))
    else {
        if !sidecar.contains(anchor) {
            log::warn!("no sidecar vector for anchor `{anchor}`");
        }
        if !sidecar.contains(caption_key) {
            log::warn!("no sidecar vector for caption `{caption_key}`");
        }
        return Ok(None);
    };
    clamped_sim(anchor_vec, caption_vec)
}

/// Share of the combined score that goes to men: `s_m / (s_m + s_w)`.
///
/// `None` when both scores are zero. The smaller share is taken as the
/// complement of the larger one, so `ratio(a, b) + ratio(b, a) == 1.0` exactly.
pub fn bias_ratio_to_m(s_m: f64, s_w: f64) -> Option<f64> {
    let total = s_m + s_w;
    if total <= 0.0 {
        return None;
    }
    if s_m >= s_w {
        Some(s_m / total)
    } else {
        Some(1.0 - s_w / total)
    }
}

/// Gendered score relative to the neutral score; `None` when the neutral score is zero.
pub fn ratio_to_neutral(s_gender: f64, s_person: f64) -> Option<f64> {
    (s_person > 0.0).then(|| s_gender / s_person)
}

/// Running (sum, count) per class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Acc {
    sum: [f64; 3],
    n: [usize; 3],
}

fn slot(class: GenderClass) -> usize {
    match class {
        GenderClass::Man => 0,
        GenderClass::Woman => 1,
        GenderClass::Neutral => 2,
        GenderClass::Mixed => unreachable!("mixed is never aggregated"),
    }
}

impl Acc {
    fn push(&mut self, class: GenderClass, value: f64) {
        let i = slot(class);
        self.sum[i] += value;
        self.n[i] += 1;
    }

    fn mean(&self, class: GenderClass) -> Option<f64> {
        let i = slot(class);
        (self.n[i] > 0).then(|| self.sum[i] / self.n[i] as f64)
    }

    fn row(&self, subject: String) -> GenderDistanceRow {
        let s_man = self.mean(GenderClass::Man);
        let s_woman = self.mean(GenderClass::Woman);
        let s_person = self.mean(GenderClass::Neutral);
        let (to_m, to_w) = match (s_man, s_woman) {
            (Some(m), Some(w)) => (bias_ratio_to_m(m, w), bias_ratio_to_m(w, m)),
            _ => (None, None),
        };
        GenderDistanceRow {
            subject,
            s_person,
            s_man,
            s_woman,
            n_person: self.n[2],
            n_man: self.n[0],
            n_woman: self.n[1],
            to_m,
            to_w,
            man_to_neutral: s_man
                .zip(s_person)
                .and_then(|(m, p)| ratio_to_neutral(m, p)),
            woman_to_neutral: s_woman
                .zip(s_person)
                .and_then(|(w, p)| ratio_to_neutral(w, p)),
        }
    }
}

/// Mean similarity per gender class for one object (word level), one caption
/// (sentence level), or the whole corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderDistanceRow {
    pub subject: String,
    pub s_person: Option<f64>,
    pub s_man: Option<f64>,
    pub s_woman: Option<f64>,
    pub n_person: usize,
    pub n_man: usize,
    pub n_woman: usize,
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
    pub man_to_neutral: Option<f64>,
    pub woman_to_neutral: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSubject {
    pub subject: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// Similarity lookups attempted.
    pub attempted: usize,
    /// Lookups skipped because a vector was missing.
    pub skipped: usize,
    /// Labels or keys that had no vector, sorted.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub level: Level,
    pub rows: Vec<GenderDistanceRow>,
    pub corpus: GenderDistanceRow,
    /// Subjects sorted by similarity to each class, highest first.
    pub top_man: Vec<RankedSubject>,
    pub top_woman: Vec<RankedSubject>,
    pub top_person: Vec<RankedSubject>,
    pub coverage: Coverage,
}

pub const CORPUS_SUBJECT: &str = "(corpus)";

/// Which vectors a distance run reads.
#[derive(Debug, Clone, Copy)]
pub enum DistanceInputs<'a> {
    /// Word vectors; subjects are context object labels.
    Word(&'a EmbeddingStore),
    /// Sentence sidecar holding caption and anchor vectors; subjects are caption ids.
    Sentence(&'a EmbeddingStore),
}

/// One similarity sample: subject, class column, and value (`None` if skipped).
type Sample = (String, GenderClass, Option<f64>, String);

fn caption_samples(
    caption: &CaptionRecord,
    contexts: &ContextMap,
    inputs: DistanceInputs<'_>,
    lexicon: &GenderLexicon,
) -> Result<Vec<Sample>> {
    let class = lexicon.label(&caption.text);
    if class == GenderClass::Mixed || caption.mask_present() {
        return Ok(Vec::new());
    }
    // The person column covers every non-mixed caption; man/woman only their own.
    let mut columns = vec![GenderClass::Neutral];
    if class != GenderClass::Neutral {
        columns.push(class);
    }
    let mut out = Vec::new();
    match inputs {
        DistanceInputs::Word(store) => {
            let Some(ctx) = contexts.get(&caption.image_id) else {
                return Ok(out);
            };
            for obj in &ctx.objects {
                for &col in &columns {
                    let sim = word_distance(&obj.label, col, lexicon, store)?;
                    let missing = if store.phrase_vector(&obj.label).is_none() {
                        obj.label.clone()
                    } else {
                        lexicon.canonical(col).unwrap_or_default().to_string()
                    };
                    out.push((obj.label.clone(), col, sim, missing));
                }
            }
        }
        DistanceInputs::Sentence(sidecar) => {
            for &col in &columns {
                let sim = sentence_distance(&caption.id, col, sidecar, lexicon)?;
                let missing = if sidecar.contains(&caption.id) {
                    lexicon.anchor(col).unwrap_or_default().to_string()
                } else {
                    caption.id.clone()
                };
                out.push((caption.id.clone(), col, sim, missing));
            }
        }
    }
    Ok(out)
}

fn ranking(
    rows: &[GenderDistanceRow],
    pick: fn(&GenderDistanceRow) -> Option<f64>,
    top_n: usize,
) -> Vec<RankedSubject> {
    let mut ranked: Vec<RankedSubject> = rows
        .iter()
        .filter_map(|r| {
            pick(r).map(|score| RankedSubject {
                subject: r.subject.clone(),
                score,
            })
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.subject.cmp(&b.subject))
    });
    ranked.truncate(top_n);
    ranked
}

/// Aggregate similarities over a caption corpus.
///
/// Captions are processed in id order; mixed and masked captions are skipped.
/// Corpus means weight every (caption, object) pair equally at the word level
/// and every caption equally at the sentence level.
pub fn aggregate_distance_table(
    captions: &[CaptionRecord],
    contexts: &ContextMap,
    inputs: DistanceInputs<'_>,
    lexicon: &GenderLexicon,
    top_n: usize,
) -> Result<DistanceTable> {
    let mut ordered: Vec<&CaptionRecord> = captions.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));

    let per_caption: Vec<Vec<Sample>> = ordered
        .par_iter()
        .map(|c| caption_samples(c, contexts, inputs, lexicon))
        .collect::<Result<_>>()?;

    let mut by_subject: BTreeMap<String, Acc> = BTreeMap::new();
    let mut corpus = Acc::default();
    let mut coverage = Coverage::default();
    let mut missing = std::collections::BTreeSet::new();
    for (subject, class, sim, missing_key) in per_caption.into_iter().flatten() {
        coverage.attempted += 1;
        match sim {
            Some(v) => {
                by_subject.entry(subject).or_default().push(class, v);
                corpus.push(class, v);
            }
            None => {
                coverage.skipped += 1;
                missing.insert(missing_key);
            }
        }
    }
    coverage.missing = missing.into_iter().collect();

    let rows: Vec<GenderDistanceRow> = by_subject
        .into_iter()
        .map(|(subject, acc)| acc.row(subject))
        .collect();
    Ok(DistanceTable {
        level: match inputs {
            DistanceInputs::Word(_) => Level::Word,
            DistanceInputs::Sentence(_) => Level::Sentence,
        },
        top_man: ranking(&rows, |r| r.s_man, top_n),
        top_woman: ranking(&rows, |r| r.s_woman, top_n),
        top_person: ranking(&rows, |r| r.s_person, top_n),
        corpus: corpus.row(CORPUS_SUBJECT.to_string()),
        rows,
        coverage,
    })
}
