//! Gender estimation for masked captions: fill `<MASK>` with each gender,
//! score both fills with visual revision, and predict the argmax.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CaptionRecord, ContextMap, VisualContext};
use crate::distance::bias_ratio_to_m;
use crate::error::{Error, Result};
use crate::lexicon::GenderClass;
use crate::revision::{score_caption, Sidecars, Strategy};

pub const DEFAULT_TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub strategy: Strategy,
    /// Score differences at or below this are ties and predict `Neutral`.
    pub tie_epsilon: f64,
    /// Also score the `#person` fill (reported, not used for the prediction).
    pub include_neutral: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            strategy: Strategy::MaxSim,
            tie_epsilon: DEFAULT_TIE_EPSILON,
            include_neutral: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderPrediction {
    pub caption_id: String,
    pub score_man: f64,
    pub score_woman: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_person: Option<f64>,
    pub predicted: GenderClass,
    pub margin: f64,
    /// Externally supplied prediction for the same caption, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<GenderClass>,
}

/// Argmax of the two gendered scores with the tie policy applied.
pub fn predict(score_man: f64, score_woman: f64, tie_epsilon: f64) -> GenderClass {
    let delta = score_man - score_woman;
    if delta.abs() <= tie_epsilon {
        GenderClass::Neutral
    } else if delta > 0.0 {
        GenderClass::Man
    } else {
        GenderClass::Woman
    }
}

pub fn estimate_gender(
    record: &CaptionRecord,
    context: &VisualContext,
    sidecars: Sidecars<'_>,
    options: EstimateOptions,
) -> Result<GenderPrediction> {
    if !record.mask_present() {
        return Err(Error::InvalidInput(format!(
            "caption `{}` is not masked",
            record.id
        )));
    }
    let man = score_caption(
        record,
        GenderClass::Man,
        context,
        sidecars,
        options.strategy,
    )?
    .score;
    let woman = score_caption(
        record,
        GenderClass::Woman,
        context,
        sidecars,
        options.strategy,
    )?
    .score;
    let person = if options.include_neutral {
        Some(
            score_caption(
                record,
                GenderClass::Neutral,
                context,
                sidecars,
                options.strategy,
            )?
            .score,
        )
    } else {
        None
    };
    Ok(GenderPrediction {
        caption_id: record.id.clone(),
        score_man: man,
        score_woman: woman,
        score_person: person,
        predicted: predict(man, woman, options.tie_epsilon),
        margin: (man - woman).abs(),
        comparison: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFailure {
    pub caption_id: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Predictions that had an external counterpart.
    pub compared: usize,
    pub agree: usize,
    pub agreement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub man: usize,
    pub woman: usize,
    pub neutral: usize,
    pub to_m: Option<f64>,
    pub to_w: Option<f64>,
    pub failed: usize,
    pub skipped_unmasked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub predictions: Vec<GenderPrediction>,
    pub failures: Vec<RecordFailure>,
    pub summary: EstimateSummary,
}

/// Count predictions per class and compute the bias ratio over the gendered counts.
pub fn summarize_predictions(
    predictions: &[GenderPrediction],
    failed: usize,
    skipped_unmasked: usize,
) -> EstimateSummary {
    let count = |g| predictions.iter().filter(|p| p.predicted == g).count();
    let (man, woman, neutral) = (
        count(GenderClass::Man),
        count(GenderClass::Woman),
        count(GenderClass::Neutral),
    );
    let comparison = predictions.iter().any(|p| p.comparison.is_some()).then(|| {
        let compared: Vec<_> = predictions
            .iter()
            .filter_map(|p| p.comparison.map(|c| (p.predicted, c)))
            .collect();
        let agree = compared.iter().filter(|(a, b)| a == b).count();
        Comparison {
            compared: compared.len(),
            agree,
            agreement: (!compared.is_empty()).then(|| agree as f64 / compared.len() as f64),
        }
    });
    EstimateSummary {
        man,
        woman,
        neutral,
        to_m: bias_ratio_to_m(man as f64, woman as f64),
        to_w: bias_ratio_to_m(woman as f64, man as f64),
        failed,
        skipped_unmasked,
        comparison,
    }
}

/// Estimate every masked caption in id order.
///
/// Per-record failures are collected and excluded from the counts; unmasked
/// captions are skipped. `comparison` maps caption ids to external predictions.
pub fn estimation_report(
    captions: &[CaptionRecord],
    contexts: &ContextMap,
    sidecars: Sidecars<'_>,
    options: EstimateOptions,
    comparison: Option<&BTreeMap<String, GenderClass>>,
) -> EstimationReport {
    let mut masked: Vec<&CaptionRecord> = captions.iter().filter(|c| c.mask_present()).collect();
    masked.sort_by(|a, b| a.id.cmp(&b.id));
    let skipped_unmasked = captions.len() - masked.len();

    let results: Vec<Result<GenderPrediction>> = masked
        .par_iter()
        .map(|record| {
            let empty = VisualContext::empty(record.image_id.clone());
            let ctx = contexts.get(&record.image_id).unwrap_or(&empty);
            estimate_gender(record, ctx, sidecars, options)
        })
        .collect();

    let mut predictions = Vec::new();
    let mut failures = Vec::new();
    for (record, result) in masked.iter().zip(results) {
        match result {
            Ok(mut p) => {
                p.comparison = comparison.and_then(|m| m.get(&p.caption_id).copied());
                predictions.push(p);
            }
            Err(e) => {
                log::warn!("caption {}: {e}", record.id);
                failures.push(RecordFailure {
                    caption_id: record.id.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    let summary = summarize_predictions(&predictions, failures.len(), skipped_unmasked);
    EstimationReport {
        predictions,
        failures,
        summary,
    }
}
