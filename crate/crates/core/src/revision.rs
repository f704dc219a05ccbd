//! Belief-revision gender score.
//!
//! A caption paired with a gender starts from its language-model probability
//! (the initial bias). Visual context revises it upward:
//!
//! ```text
//! alpha = ((1 - sim) / (1 + sim)) ^ (1 - P(object))
//! score = P(hypothesis) ^ alpha
//! ```
//!
//! where `sim` is the clamped cosine between the gendered caption and the
//! object label, and `P(object)` is the classifier confidence. Related,
//! informative objects push `alpha` toward 0 and the score toward 1; an
//! unrelated or ubiquitous object leaves the hypothesis unchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CaptionRecord, ContextMap, LmSidecar, VisualContext, PROBABILITY_FLOOR};
use crate::distance::{bias_ratio_to_m, ratio_to_neutral};
use crate::error::{Error, Result};
use crate::lexicon::{GenderClass, GenderLexicon};
use crate::vectors::{cosine, EmbeddingStore};

/// How a caption with several context objects is scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Revise with the single object most similar to the caption.
    #[default]
    MaxSim,
    /// Revise with every object and average the revised scores.
    MeanTopk,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_sim" => Ok(Strategy::MaxSim),
            "mean_topk" => Ok(Strategy::MeanTopk),
            other => Err(Error::InvalidInput(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Similarity exponent. `sim` is clamped to [0, 1] and `p_object` to [0, 1].
pub fn alpha(sim: f64, p_object: f64) -> f64 {
    let sim = sim.clamp(0.0, 1.0);
    let exponent = 1.0 - p_object.clamp(0.0, 1.0);
    if exponent == 0.0 {
        return 1.0;
    }
    let base = (1.0 - sim) / (1.0 + sim);
    if base == 0.0 {
        return 0.0;
    }
    base.powf(exponent).clamp(0.0, 1.0)
}

/// Revised probability `p_hypothesis ^ alpha`, computed as `exp(alpha * ln p)`.
///
/// The result is kept inside `[p_hypothesis, 1]`.
pub fn revise(p_hypothesis: f64, alpha: f64) -> f64 {
    let p = p_hypothesis.clamp(PROBABILITY_FLOOR, 1.0);
    if alpha >= 1.0 {
        return p;
    }
    if alpha <= 0.0 {
        return 1.0;
    }
    (alpha * p.ln()).exp().clamp(p, 1.0)
}

/// One caption-gender pair after revision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCaption {
    pub caption_id: String,
    pub gender: GenderClass,
    /// Sidecar key the hypothesis and caption vector were read from.
    pub key: String,
    pub p_hypothesis: f64,
    /// Object that drove the revision (max_sim only).
    pub object_label: Option<String>,
    pub p_object: Option<f64>,
    pub sim: Option<f64>,
    /// Effective exponent: `score == p_hypothesis ^ alpha`.
    pub alpha: f64,
    pub score: f64,
    pub objects_used: usize,
}

/// Sidecars consulted while scoring.
#[derive(Debug, Clone, Copy)]
pub struct Sidecars<'a> {
    pub embeddings: &'a EmbeddingStore,
    pub lm: &'a LmSidecar,
}

/// Hypothesis key of a caption for one gender: `<id>#<variant>` when masked, `<id>` otherwise.
pub fn hypothesis_key(record: &CaptionRecord, gender: GenderClass) -> Result<String> {
    if !record.mask_present() {
        return Ok(record.id.clone());
    }
    let suffix = gender
        .variant_suffix()
        .ok_or_else(|| Error::InvalidInput(format!("cannot score `{}` as mixed", record.id)))?;
    Ok(record.variant_key(suffix))
}

fn object_sim(caption_vec: &[f64], label: &str, embeddings: &EmbeddingStore) -> Result<f64> {
    let object_vec = embeddings
        .get(label)
        .ok_or_else(|| Error::MissingKey(label.to_string()))?;
    Ok(cosine(caption_vec, object_vec)?.clamp(0.0, 1.0))
}

/// Score one caption for one gender against its visual context.
pub fn score_caption(
    record: &CaptionRecord,
    gender: GenderClass,
    context: &VisualContext,
    sidecars: Sidecars<'_>,
    strategy: Strategy,
) -> Result<ScoredCaption> {
    let key = hypothesis_key(record, gender)?;
    score_hypothesis(&record.id, gender, key, context, sidecars, strategy)
}

/// Score an arbitrary sidecar key as the hypothesis for `caption_id` and `gender`.
pub fn score_hypothesis(
    caption_id: &str,
    gender: GenderClass,
    key: String,
    context: &VisualContext,
    sidecars: Sidecars<'_>,
    strategy: Strategy,
) -> Result<ScoredCaption> {
    let p = sidecars.lm.hypothesis_probability(&key)?;
    let mut scored = ScoredCaption {
        caption_id: caption_id.to_string(),
        gender,
        key,
        p_hypothesis: p,
        object_label: None,
        p_object: None,
        sim: None,
        alpha: 1.0,
        score: p,
        objects_used: 0,
    };
    if context.objects.is_empty() {
        return Ok(scored);
    }

    let caption_vec = sidecars
        .embeddings
        .get(&scored.key)
        .ok_or_else(|| Error::MissingKey(scored.key.clone()))?;
    let sims = context
        .objects
        .iter()
        .map(|o| object_sim(caption_vec, &o.label, sidecars.embeddings))
        .collect::<Result<Vec<f64>>>()?;
    scored.objects_used = sims.len();

    match strategy {
        Strategy::MaxSim => {
            let mut best = 0;
            for (i, s) in sims.iter().enumerate() {
                if *s > sims[best] {
                    best = i;
                }
            }
            let obj = &context.objects[best];
            let a = alpha(sims[best], obj.confidence);
            scored.object_label = Some(obj.label.clone());
            scored.p_object = Some(obj.confidence);
            scored.sim = Some(sims[best]);
            scored.alpha = a;
            scored.score = revise(p, a);
        }
        Strategy::MeanTopk => {
            let total: f64 = context
                .objects
                .iter()
                .zip(&sims)
                .map(|(o, s)| revise(p, alpha(*s, o.confidence)))
                .sum();
            let score = (total / sims.len() as f64).clamp(p, 1.0);
            scored.score = score;
            scored.alpha = if p < 1.0 {
                (score.ln() / p.ln()).clamp(0.0, 1.0)
            } else {
                1.0
            };
        }
    }
    Ok(scored)
}

/// Corpus average of revised scores for one gender.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderScoreAggregate {
    pub gender: GenderClass,
    /// `None` when no caption carries this gender.
    pub mean_score: Option<f64>,
    pub count: usize,
}

/// Mean score over the scored captions of `gender`, in slice order.
pub fn gender_score(scored: &[ScoredCaption], gender: GenderClass) -> GenderScoreAggregate {
    let (sum, count) = scored
        .iter()
        .filter(|s| s.gender == gender)
        .fold((0.0, 0usize), |(sum, n), s| (sum + s.score, n + 1));
    GenderScoreAggregate {
        gender,
        mean_score: (count > 0).then(|| sum / count as f64),
        count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub strategy: Strategy,
    /// Also score the `#person` fill of masked captions.
    pub include_neutral: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            strategy: Strategy::MaxSim,
            include_neutral: false,
        }
    }
}

/// Genders a caption is scored under: its label when unmasked, the fills when masked.
pub fn genders_for(
    record: &CaptionRecord,
    lexicon: &GenderLexicon,
    include_neutral: bool,
) -> Vec<GenderClass> {
    if record.mask_present() {
        let mut g = vec![GenderClass::Man, GenderClass::Woman];
        if include_neutral {
            g.push(GenderClass::Neutral);
        }
        g
    } else {
        match lexicon.label(&record.text) {
            GenderClass::Mixed => Vec::new(),
            class => vec![class],
        }
    }
}

/// Score every caption-gender pair in id order. Missing contexts count as empty.
pub fn score_dataset(
    captions: &[CaptionRecord],
    contexts: &ContextMap,
    sidecars: Sidecars<'_>,
    lexicon: &GenderLexicon,
    options: ScoreOptions,
) -> Result<Vec<ScoredCaption>> {
    let mut ordered: Vec<&CaptionRecord> = captions.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let nested: Vec<Vec<ScoredCaption>> = ordered
        .par_iter()
        .map(|record| {
            let empty = VisualContext::empty(record.image_id.clone());
            let ctx = contexts.get(&record.image_id).unwrap_or(&empty);
            genders_for(record, lexicon, options.include_neutral)
                .into_iter()
                .map(|g| score_caption(record, g, ctx, sidecars, options.strategy))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Corpus-level gender score row: per-class averages and their ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub strategy: Strategy,
    pub man: GenderScoreAggregate,
    pub woman: GenderScoreAggregate,
    pub person: GenderScoreAggregate,
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
    pub man_to_neutral: Option<f64>,
    pub woman_to_neutral: Option<f64>,
}

pub fn summarize(scored: &[ScoredCaption], strategy: Strategy) -> ScoreSummary {
    let man = gender_score(scored, GenderClass::Man);
    let woman = gender_score(scored, GenderClass::Woman);
    let person = gender_score(scored, GenderClass::Neutral);
    let pair = man.mean_score.zip(woman.mean_score);
    ScoreSummary {
        strategy,
        to_m: pair.and_then(|(m, w)| bias_ratio_to_m(m, w)),
        to_w: pair.and_then(|(m, w)| bias_ratio_to_m(w, m)),
        man_to_neutral: man
            .mean_score
            .zip(person.mean_score)
            .and_then(|(m, p)| ratio_to_neutral(m, p)),
        woman_to_neutral: woman
            .mean_score
            .zip(person.mean_score)
            .and_then(|(w, p)| ratio_to_neutral(w, p)),
        man,
        woman,
        person,
    }
}
