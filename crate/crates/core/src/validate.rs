//! Schema and key-coverage checks over a set of input files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{load_captions, load_contexts, CaptionRecord, ContextMap, LmSidecar};
use crate::error::Error;
use crate::lexicon::{GenderClass, GenderLexicon};
use crate::revision::{genders_for, hypothesis_key};
use crate::text_only::{load_text_records, TextRecord};
use crate::vectors::EmbeddingStore;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub message: String,
}

impl Issue {
    fn from_error(file: &Path, err: &Error) -> Self {
        let (line, key) = match err {
            Error::Parse { line, .. } => (Some(*line), None),
            Error::DuplicateKey { key, .. } => (None, Some(key.clone())),
            Error::MissingKey(k) => (None, Some(k.clone())),
            _ => (None, None),
        };
        Issue {
            code: err.code().to_string(),
            file: Some(file.to_path_buf()),
            line,
            key,
            message: err.to_string(),
        }
    }

    fn missing(file: &Path, key: &str, message: String) -> Self {
        Issue {
            code: "missing_key".into(),
            file: Some(file.to_path_buf()),
            line: None,
            key: Some(key.to_string()),
            message,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub error_count: usize,
    pub warning_count: usize,
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
    /// Records loaded per input kind.
    pub counts: BTreeMap<String, usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, issue: Issue) {
        self.errors.push(issue);
        self.error_count = self.errors.len();
    }

    fn warn(&mut self, issue: Issue) {
        self.warnings.push(issue);
        self.warning_count = self.warnings.len();
    }
}

/// Paths to check. Absent inputs are skipped along with the checks that need them.
#[derive(Debug, Clone, Default)]
pub struct ValidationInputs {
    pub captions: Option<PathBuf>,
    pub contexts: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub sidecar_emb: Option<PathBuf>,
    pub sidecar_lm: Option<PathBuf>,
    pub text: Option<PathBuf>,
    /// Require `#person` fills as well.
    pub include_neutral: bool,
}

fn load<T>(
    report: &mut ValidationReport,
    path: &Option<PathBuf>,
    kind: &str,
    f: impl FnOnce(&Path) -> crate::Result<T>,
    count: impl Fn(&T) -> usize,
) -> Option<T> {
    let path = path.as_deref()?;
    match f(path) {
        Ok(v) => {
            report.counts.insert(kind.to_string(), count(&v));
            Some(v)
        }
        Err(e) => {
            report.error(Issue::from_error(path, &e));
            None
        }
    }
}

/// Check every supplied file and the coverage of sidecar keys.
///
/// Scoring needs an LM entry for every caption-gender hypothesis, and an
/// embedding for the hypothesis and each object whenever the caption's image
/// has a non-empty context. Missing anchors and uncovered sentence-level
/// captions only limit the distance subcommand and are warnings.
pub fn validate_inputs(inputs: &ValidationInputs, lexicon: &GenderLexicon) -> ValidationReport {
    let mut report = ValidationReport::default();
    let captions = load(
        &mut report,
        &inputs.captions,
        "captions",
        load_captions,
        Vec::len,
    );
    let contexts = load(
        &mut report,
        &inputs.contexts,
        "contexts",
        load_contexts,
        ContextMap::len,
    );
    let vectors = load(
        &mut report,
        &inputs.vectors,
        "word_vectors",
        EmbeddingStore::load_word_vectors,
        EmbeddingStore::len,
    );
    let emb = load(
        &mut report,
        &inputs.sidecar_emb,
        "sidecar_emb",
        EmbeddingStore::load_sidecar,
        EmbeddingStore::len,
    );
    let lm = load(
        &mut report,
        &inputs.sidecar_lm,
        "sidecar_lm",
        LmSidecar::load,
        LmSidecar::len,
    );
    let text = load(
        &mut report,
        &inputs.text,
        "text_records",
        load_text_records,
        Vec::len,
    );

    if let (Some(v), Some(path)) = (&vectors, &inputs.vectors) {
        for token in v.duplicates() {
            report.warn(Issue {
                code: "duplicate_token".into(),
                file: Some(path.clone()),
                line: None,
                key: Some(token.clone()),
                message: format!("token `{token}` repeated; the first vector is used"),
            });
        }
    }

    if let (Some(emb), Some(path)) = (&emb, &inputs.sidecar_emb) {
        for class in GenderClass::SCORABLE {
            if let Some(anchor) = lexicon.anchor(class) {
                if !emb.contains(anchor) {
                    report.warn(Issue {
                        code: "missing_anchor".into(),
                        file: Some(path.clone()),
                        line: None,
                        key: Some(anchor.to_string()),
                        message: format!(
                            "anchor `{anchor}` has no embedding; sentence-level distance will fail"
                        ),
                    });
                }
            }
        }
    }

    if let Some(captions) = &captions {
        check_captions(
            &mut report,
            inputs,
            lexicon,
            captions,
            contexts.as_ref(),
            emb.as_ref(),
            lm.as_ref(),
        );
    }
    if let Some(text) = &text {
        check_text(&mut report, inputs, text, emb.as_ref(), lm.as_ref());
    }
    report
}

fn check_captions(
    report: &mut ValidationReport,
    inputs: &ValidationInputs,
    lexicon: &GenderLexicon,
    captions: &[CaptionRecord],
    contexts: Option<&ContextMap>,
    emb: Option<&EmbeddingStore>,
    lm: Option<&LmSidecar>,
) {
    let mut ordered: Vec<&CaptionRecord> = captions.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut missing_labels = BTreeSet::new();
    for record in ordered {
        let has_context = contexts
            .and_then(|m| m.get(&record.image_id))
            .is_some_and(|c| !c.objects.is_empty());
        for gender in genders_for(record, lexicon, inputs.include_neutral) {
            let Ok(key) = hypothesis_key(record, gender) else {
                continue;
            };
            if let (Some(lm), Some(path)) = (lm, &inputs.sidecar_lm) {
                if !lm.contains(&key) {
                    report.error(Issue::missing(
                        path,
                        &key,
                        format!("no LM entry for `{key}`"),
                    ));
                }
            }
            if let (Some(emb), Some(path)) = (emb, &inputs.sidecar_emb) {
                if !emb.contains(&key) {
                    if has_context {
                        report.error(Issue::missing(
                            path,
                            &key,
                            format!("no embedding for `{key}`"),
                        ));
                    } else if !record.mask_present() {
                        report.warn(Issue::missing(
                            path,
                            &key,
                            format!("no embedding for `{key}`; sentence-level distance skips it"),
                        ));
                    }
                }
            }
        }
        if let (Some(emb), Some(ctx)) = (emb, contexts.and_then(|m| m.get(&record.image_id))) {
            if lexicon.label(&record.text) != GenderClass::Mixed || record.mask_present() {
                for obj in &ctx.objects {
                    if !emb.contains(&obj.label) {
                        missing_labels.insert(obj.label.clone());
                    }
                }
            }
        }
    }
    if let Some(path) = &inputs.sidecar_emb {
        for label in missing_labels {
            report.error(Issue::missing(
                path,
                &label,
                format!("no embedding for object `{label}`"),
            ));
        }
    }
}

fn check_text(
    report: &mut ValidationReport,
    inputs: &ValidationInputs,
    records: &[TextRecord],
    emb: Option<&EmbeddingStore>,
    lm: Option<&LmSidecar>,
) {
    let mut ordered: Vec<&TextRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    for r in ordered {
        let has_keyword = r.keyword.as_deref().is_some_and(|k| !k.trim().is_empty());
        for suffix in ["man", "woman"] {
            let key = format!("{}#{suffix}", r.id);
            if let (Some(lm), Some(path)) = (lm, &inputs.sidecar_lm) {
                if !lm.contains(&key) {
                    report.error(Issue::missing(
                        path,
                        &key,
                        format!("no LM entry for `{key}`"),
                    ));
                }
            }
            if let (Some(emb), Some(path), true) = (emb, &inputs.sidecar_emb, has_keyword) {
                if !emb.contains(&key) {
                    report.error(Issue::missing(
                        path,
                        &key,
                        format!("no embedding for `{key}`"),
                    ));
                }
            }
        }
        if let (Some(emb), Some(path), Some(k)) = (emb, &inputs.sidecar_emb, r.keyword.as_deref()) {
            if has_keyword && !emb.contains(k) {
                report.error(Issue::missing(
                    path,
                    k,
                    format!("no embedding for keyword `{k}`"),
                ));
            }
        }
    }
}
