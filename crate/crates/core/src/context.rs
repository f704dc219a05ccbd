//! Visual-context filtering: confidence threshold, person-label removal,
//! cross-classifier voting by label similarity, and top-k selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::{ContextObject, VisualContext};
use crate::lexicon::GenderLexicon;
use crate::vectors::{cosine, EmbeddingStore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextFilter {
    /// Candidates strictly below this confidence are dropped.
    pub conf_threshold: f64,
    /// Label cosine at or above which a candidate is absorbed by a kept one.
    pub vote_threshold: f64,
    pub k: usize,
}

impl Default for ContextFilter {
    fn default() -> Self {
        ContextFilter {
            conf_threshold: 0.2,
            vote_threshold: 0.8,
            k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub context: VisualContext,
    /// Labels that had no vector, so voting could not compare them.
    pub missing_vectors: Vec<String>,
}

/// Canonical candidate order: confidence descending, then label, then classifier.
fn canonical_order(a: &ContextObject, b: &ContextObject) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| a.label.cmp(&b.label))
        .then_with(|| a.classifier.cmp(&b.classifier))
}

impl ContextFilter {
    pub fn filter(
        &self,
        image_id: &str,
        candidates: &[ContextObject],
        store: &EmbeddingStore,
        lexicon: &GenderLexicon,
    ) -> FilterOutcome {
        let mut pool: Vec<&ContextObject> = candidates
            .iter()
            .filter(|c| c.confidence >= self.conf_threshold)
            .filter(|c| !lexicon.is_person_label(&c.label))
            .collect();
        pool.sort_by(|a, b| canonical_order(a, b));

        let mut missing_vectors = Vec::new();
        let mut kept: Vec<(&ContextObject, Option<Vec<f64>>)> = Vec::new();
        for cand in pool {
            let vector = store.phrase_vector(&cand.label).map(|v| v.into_owned());
            if vector.is_none() && !missing_vectors.contains(&cand.label) {
                missing_vectors.push(cand.label.clone());
            }
            let absorbed = kept.iter().any(|(keeper, keeper_vec)| {
                if keeper.label == cand.label {
                    return true;
                }
                match (keeper_vec, &vector) {
                    (Some(a), Some(b)) => cosine(a, b).is_ok_and(|c| c >= self.vote_threshold),
                    _ => false,
                }
            });
            if !absorbed {
                kept.push((cand, vector));
            }
        }

        for label in &missing_vectors {
            log::warn!("image {image_id}: no vector for context label `{label}`; not voted");
        }

        FilterOutcome {
            context: VisualContext {
                image_id: image_id.to_string(),
                objects: kept
                    .into_iter()
                    .take(self.k)
                    .map(|(obj, _)| obj.clone())
                    .collect(),
            },
            missing_vectors,
        }
    }
}

/// Filter with default thresholds (0.2 confidence, 0.8 vote, top 3).
pub fn filter_context(
    image_id: &str,
    candidates: &[ContextObject],
    store: &EmbeddingStore,
    lexicon: &GenderLexicon,
) -> VisualContext {
    ContextFilter::default()
        .filter(image_id, candidates, store, lexicon)
        .context
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn store() -> EmbeddingStore {
        EmbeddingStore::from_pairs([
            ("dog", vec![1.0, 0.0, 0.0]),
            ("umbrella", vec![0.0, 1.0, 0.0]),
            ("motorcycle", vec![0.0, 0.0, 1.0]),
            ("motorbike", vec![0.0, 0.1, 0.99]),
            ("kite", vec![0.5, 0.5, 0.0]),
            ("surfboard", vec![0.2, -0.9, 0.1]),
            ("paddle", vec![-0.7, 0.1, 0.3]),
        ])
        .unwrap()
    }

    fn obj(label: &str, conf: f64, cls: &str) -> ContextObject {
        ContextObject::new(label, conf, cls)
    }

    #[test]
    fn drops_low_confidence() {
        let out = filter_context(
            "i",
            &[obj("dog", 0.15, "A")],
            &store(),
            &GenderLexicon::default(),
        );
        assert!(out.objects.is_empty());
    }

    #[test]
    fn drops_person_labels() {
        let out = filter_context(
            "i",
            &[obj("person", 0.9, "A"), obj("umbrella", 0.6, "B")],
            &store(),
            &GenderLexicon::default(),
        );
        assert_eq!(out.objects, vec![obj("umbrella", 0.6, "B")]);
    }

    #[test]
    fn keeps_top_three_by_confidence() {
        let cands = [
            obj("dog", 0.3, "A"),
            obj("umbrella", 0.9, "A"),
            obj("kite", 0.5, "B"),
            obj("surfboard", 0.7, "C"),
            obj("paddle", 0.4, "C"),
        ];
        let out = filter_context("i", &cands, &store(), &GenderLexicon::default());
        let labels: Vec<_> = out.objects.iter().map(|o| o.label.as_str()).collect();
        assert_eq!(labels, ["umbrella", "surfboard", "kite"]);
    }

    #[test]
    fn near_synonyms_vote_into_most_confident() {
        let cands = [
            obj("motorbike", 0.6, "A"),
            obj("motorcycle", 0.8, "B"),
            obj("dog", 0.5, "C"),
        ];
        let out = ContextFilter::default().filter("i", &cands, &store(), &GenderLexicon::default());
        let labels: Vec<_> = out
            .context
            .objects
            .iter()
            .map(|o| o.label.as_str())
            .collect();
        assert_eq!(labels, ["motorcycle", "dog"]);
        assert_eq!(out.context.objects[0].confidence, 0.8);
    }

    #[test]
    fn oov_labels_are_not_absorbed() {
        let cands = [
            obj("zebra", 0.6, "A"),
            obj("dog", 0.8, "B"),
            obj("zebra", 0.5, "C"),
        ];
        let out = ContextFilter::default().filter("i", &cands, &store(), &GenderLexicon::default());
        let labels: Vec<_> = out
            .context
            .objects
            .iter()
            .map(|o| o.label.as_str())
            .collect();
        // identical labels still merge
        assert_eq!(labels, ["dog", "zebra"]);
        assert_eq!(out.missing_vectors, vec!["zebra".to_string()]);
    }

    #[test]
    fn ties_break_by_label() {
        let cands = [obj("kite", 0.5, "A"), obj("dog", 0.5, "B")];
        let out = filter_context("i", &cands, &store(), &GenderLexicon::default());
        assert_eq!(out.objects[0].label, "dog");
    }

    const LABELS: [&str; 9] = [
        "dog",
        "umbrella",
        "motorcycle",
        "motorbike",
        "kite",
        "surfboard",
        "paddle",
        "zebra",
        "person",
    ];

    fn candidates() -> impl Strategy<Value = Vec<ContextObject>> {
        prop::collection::vec(
            (0usize..LABELS.len(), 0u8..=10, 0usize..3)
                .prop_map(|(l, c, k)| obj(LABELS[l], c as f64 / 10.0, ["A", "B", "C"][k])),
            0..10,
        )
    }

    proptest! {
        #[test]
        fn output_invariants(cands in candidates()) {
            let lex = GenderLexicon::default();
            let out = filter_context("i", &cands, &store(), &lex);
            prop_assert!(out.objects.len() <= 3);
            for o in &out.objects {
                prop_assert!(o.confidence >= 0.2);
                prop_assert!(!lex.is_person_label(&o.label));
                prop_assert!(cands.contains(o));
            }
            let again = filter_context("i", &out.objects, &store(), &lex);
            prop_assert_eq!(&again, &out);
        }

        #[test]
        fn order_independent(cands in candidates()) {
            let lex = GenderLexicon::default();
            let mut reversed = cands.clone();
            reversed.reverse();
            prop_assert_eq!(
                filter_context("i", &cands, &store(), &lex),
                filter_context("i", &reversed, &store(), &lex)
            );
        }
    }
}
