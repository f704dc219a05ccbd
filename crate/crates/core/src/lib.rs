//! Gender bias audit toolkit for caption corpora.
//!
//! The crate measures how strongly captions tie gender to objects:
//!
//! - [`distance`]: cosine similarity between gender terms (or anchor
//!   phrases) and objects or captions, with bias ratios toward men and
//!   ratios to the neutral class.
//! - [`revision`]: the belief-revision gender score, which raises a
//!   language-model hypothesis toward 1 when a related, informative visual
//!   object is present.
//! - [`estimate`]: fill a `<MASK>` with each gender, score both fills and
//!   predict the stronger one.
//! - [`cooc`]: the co-occurrence counting baseline and leakage against
//!   human references.
//!
//! Inputs are plain files (JSONL captions and contexts, GloVe-style vectors,
//! embedding and language-model sidecars). The `biasaudit` binary wraps each
//! capability as a subcommand; see [`cli`].

pub mod cli;
pub mod context;
pub mod cooc;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod estimate;
pub mod jsonl;
pub mod lexicon;
pub mod report;
pub mod revision;
pub mod text_only;
pub mod validate;
pub mod vectors;

pub use context::{filter_context, ContextFilter};
pub use cooc::{cooc_counts, leakage, per_object_bias, BiasMethod};
pub use dataset::{CaptionRecord, ContextObject, LmSidecar, Source, VisualContext};
pub use distance::{aggregate_distance_table, bias_ratio_to_m, ratio_to_neutral, word_distance};
pub use error::{Error, Result};
pub use estimate::{estimate_gender, estimation_report, GenderPrediction};
pub use lexicon::{fill_mask, label_caption_gender, GenderClass, GenderLexicon};
pub use revision::{alpha, gender_score, revise, score_caption, ScoredCaption, Sidecars, Strategy};
pub use vectors::{cosine, EmbeddingStore};
