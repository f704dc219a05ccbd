//! Text-only gender score: the context is a keyword supplied with each
//! record instead of objects detected in an image.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{ContextObject, VisualContext};
use crate::distance::bias_ratio_to_m;
use crate::error::{Error, Result};
use crate::estimate::predict;
use crate::jsonl;
use crate::lexicon::GenderClass;
use crate::revision::{score_hypothesis, Sidecars, Strategy};

/// Confidence given to a keyword that carries none of its own.
///
/// A confidence of 1 would zero the informativeness exponent and disable revision.
pub const DEFAULT_KEYWORD_CONFIDENCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub keyword: Option<String>,
    #[serde(default)]
    pub confidence: Option<f64>,
    /// Ground-truth gender, when known.
    #[serde(default)]
    pub gender: Option<GenderClass>,
}

pub fn load_text_records(path: &Path) -> Result<Vec<TextRecord>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (line, r) in jsonl::read_records::<TextRecord>(path)? {
        if let Some(c) = r.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("confidence {c} outside [0, 1]"),
                ));
            }
        }
        if !seen.insert(r.id.clone()) {
            return Err(Error::DuplicateKey {
                path: path.to_path_buf(),
                key: r.id,
            });
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextScore {
    pub id: String,
    pub keyword: Option<String>,
    pub score_man: f64,
    pub score_woman: f64,
    pub predicted: GenderClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<GenderClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextSummary {
    pub records: usize,
    pub mean_man: Option<f64>,
    pub mean_woman: Option<f64>,
    /// Bias ratio over the mean gender scores.
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
    pub predicted_man: usize,
    pub predicted_woman: usize,
    pub predicted_neutral: usize,
    /// Ground-truth label counts and their ratio, when labels are present.
    pub gt_man: usize,
    pub gt_woman: usize,
    pub gt_to_m: Option<f64>,
    pub gt_to_w: Option<f64>,
}

fn keyword_context(record: &TextRecord, keyword_confidence: f64) -> VisualContext {
    let objects = record
        .keyword
        .as_deref()
        .filter(|k| !k.trim().is_empty())
        .map(|k| {
            vec![ContextObject::new(
                k,
                record.confidence.unwrap_or(keyword_confidence),
                "keyword",
            )]
        })
        .unwrap_or_default();
    VisualContext {
        image_id: record.id.clone(),
        objects,
    }
}

/// Score `<id>#man` and `<id>#woman` for one record with its keyword as context.
pub fn score_text(
    record: &TextRecord,
    sidecars: Sidecars<'_>,
    keyword_confidence: f64,
    tie_epsilon: f64,
) -> Result<TextScore> {
    let ctx = keyword_context(record, keyword_confidence);
    let score = |g: GenderClass| {
        let key = format!("{}#{}", record.id, g.variant_suffix().expect("gendered"));
        score_hypothesis(&record.id, g, key, &ctx, sidecars, Strategy::MaxSim).map(|s| s.score)
    };
    let man = score(GenderClass::Man)?;
    let woman = score(GenderClass::Woman)?;
    Ok(TextScore {
        id: record.id.clone(),
        keyword: record.keyword.clone(),
        score_man: man,
        score_woman: woman,
        predicted: predict(man, woman, tie_epsilon),
        gender: record.gender,
    })
}

/// Score every record in id order and summarize.
pub fn text_only_score(
    records: &[TextRecord],
    sidecars: Sidecars<'_>,
    keyword_confidence: f64,
    tie_epsilon: f64,
) -> Result<(Vec<TextScore>, TextSummary)> {
    let mut ordered: Vec<&TextRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let scores: Vec<TextScore> = ordered
        .par_iter()
        .map(|r| score_text(r, sidecars, keyword_confidence, tie_epsilon))
        .collect::<Result<_>>()?;

    let n = scores.len();
    let mean =
        |f: fn(&TextScore) -> f64| (n > 0).then(|| scores.iter().map(f).sum::<f64>() / n as f64);
    let mean_man = mean(|s| s.score_man);
    let mean_woman = mean(|s| s.score_woman);
    let count = |g| scores.iter().filter(|s| s.predicted == g).count();
    let gt = |g| scores.iter().filter(|s| s.gender == Some(g)).count();
    let (gt_man, gt_woman) = (gt(GenderClass::Man), gt(GenderClass::Woman));
    let pair = mean_man.zip(mean_woman);
    let summary = TextSummary {
        records: n,
        mean_man,
        mean_woman,
        to_m: pair.and_then(|(m, w)| bias_ratio_to_m(m, w)),
        to_w: pair.and_then(|(m, w)| bias_ratio_to_m(w, m)),
        predicted_man: count(GenderClass::Man),
        predicted_woman: count(GenderClass::Woman),
        predicted_neutral: count(GenderClass::Neutral),
        gt_man,
        gt_woman,
        gt_to_m: bias_ratio_to_m(gt_man as f64, gt_woman as f64),
        gt_to_w: bias_ratio_to_m(gt_woman as f64, gt_man as f64),
    };
    Ok((scores, summary))
}
