//! Caption records, visual contexts, and the language-model sidecar.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;

pub const MASK_TOKEN: &str = "<MASK>";

/// Lower bound applied to every hypothesis probability.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Model,
    Human,
}

/// One caption of an image, either generated by a model or written by an annotator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionRecord {
    pub id: String,
    pub image_id: String,
    pub text: String,
    pub source: Source,
}

impl CaptionRecord {
    pub fn new(
        id: impl Into<String>,
        image_id: impl Into<String>,
        text: impl Into<String>,
        source: Source,
    ) -> Result<Self> {
        let record = CaptionRecord {
            id: id.into(),
            image_id: image_id.into(),
            text: text.into(),
            source,
        };
        record.check()?;
        Ok(record)
    }

    fn check(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidInput("caption id is empty".into()));
        }
        if self.text.trim().is_empty() {
            return Err(Error::InvalidInput(format!(
                "caption `{}` has empty text",
                self.id
            )));
        }
        if self.text.matches(MASK_TOKEN).count() > 1 {
            return Err(Error::InvalidInput(format!(
                "caption `{}` has more than one {MASK_TOKEN}",
                self.id
            )));
        }
        Ok(())
    }

    pub fn mask_present(&self) -> bool {
        self.text.contains(MASK_TOKEN)
    }

    /// Sidecar key for this caption filled with the given variant suffix.
    pub fn variant_key(&self, suffix: &str) -> String {
        format!("{}#{suffix}", self.id)
    }
}

/// Load a captions JSONL file, checking id uniqueness and the mask invariant.
pub fn load_captions(path: &Path) -> Result<Vec<CaptionRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, record) in jsonl::read_records::<CaptionRecord>(path)? {
        record
            .check()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateKey {
                path: path.to_path_buf(),
                key: record.id,
            });
        }
        out.push(record);
    }
    Ok(out)
}

/// A candidate object produced by an image classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextObject {
    pub label: String,
    pub confidence: f64,
    pub classifier: String,
}

impl ContextObject {
    pub fn new(label: impl Into<String>, confidence: f64, classifier: impl Into<String>) -> Self {
        ContextObject {
            label: label.into(),
            confidence,
            classifier: classifier.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualContext {
    pub image_id: String,
    pub objects: Vec<ContextObject>,
}

impl VisualContext {
    pub fn empty(image_id: impl Into<String>) -> Self {
        VisualContext {
            image_id: image_id.into(),
            objects: Vec::new(),
        }
    }
}

/// Contexts keyed by image id.
pub type ContextMap = BTreeMap<String, VisualContext>;

pub fn load_contexts(path: &Path) -> Result<ContextMap> {
    let mut out = ContextMap::new();
    for (line, ctx) in jsonl::read_records::<VisualContext>(path)? {
        for obj in &ctx.objects {
            if !obj.confidence.is_finite() || !(0.0..=1.0).contains(&obj.confidence) {
                return Err(Error::parse(
                    path,
                    line,
                    format!(
                        "confidence {} of `{}` outside [0, 1]",
                        obj.confidence, obj.label
                    ),
                ));
            }
            if obj.label.trim().is_empty() {
                return Err(Error::parse(path, line, "object label is empty"));
            }
        }
        if out.contains_key(&ctx.image_id) {
            return Err(Error::DuplicateKey {
                path: path.to_path_buf(),
                key: ctx.image_id,
            });
        }
        out.insert(ctx.image_id.clone(), ctx);
    }
    Ok(out)
}

/// One record of the language-model sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmRecord {
    pub key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_token_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<f64>>,
}

impl LmRecord {
    /// Mean token probability, floored at [`PROBABILITY_FLOOR`].
    pub fn probability(&self) -> Result<f64> {
        let p = match (&self.mean_token_prob, &self.token_logprobs) {
            (Some(p), _) => *p,
            (None, Some(lps)) if lps.is_empty() => {
                return Err(Error::InvalidInput(format!(
                    "`{}` has an empty token_logprobs list",
                    self.key
                )))
            }
            (None, Some(lps)) => lps.iter().map(|lp| lp.exp()).sum::<f64>() / lps.len() as f64,
            (None, None) => {
                return Err(Error::InvalidInput(format!(
                    "`{}` has neither mean_token_prob nor token_logprobs",
                    self.key
                )))
            }
        };
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "`{}` probability {p} outside [0, 1]",
                self.key
            )));
        }
        Ok(p.max(PROBABILITY_FLOOR))
    }
}

/// Hypothesis probabilities keyed by caption id or `<caption_id>#<variant>`.
#[derive(Debug, Clone, Default)]
pub struct LmSidecar {
    entries: HashMap<String, LmRecord>,
}

impl LmSidecar {
    pub fn load(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        for (line, record) in jsonl::read_records::<LmRecord>(path)? {
            if record.mean_token_prob.is_none() && record.token_logprobs.is_none() {
                return Err(Error::parse(
                    path,
                    line,
                    "record needs mean_token_prob or token_logprobs",
                ));
            }
            if entries.contains_key(&record.key) {
                return Err(Error::DuplicateKey {
                    path: path.to_path_buf(),
                    key: record.key,
                });
            }
            entries.insert(record.key.clone(), record);
        }
        Ok(LmSidecar { entries })
    }

    pub fn from_records(records: impl IntoIterator<Item = LmRecord>) -> Self {
        LmSidecar {
            entries: records.into_iter().map(|r| (r.key.clone(), r)).collect(),
        }
    }

    /// Convenience constructor from `(key, mean_token_prob)` pairs.
    pub fn from_probs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        LmSidecar::from_records(pairs.into_iter().map(|(k, p)| LmRecord {
            key: k.to_string(),
            mean_token_prob: Some(p),
            token_logprobs: None,
        }))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Initial bias P(g'_y) for a caption or filled variant.
    pub fn hypothesis_probability(&self, key: &str) -> Result<f64> {
        self.entries
            .get(key)
            .ok_or_else(|| Error::MissingKey(key.to_string()))?
            .probability()
    }
}
