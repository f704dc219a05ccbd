//! Word-vector and sidecar embedding stores, and cosine similarity.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::jsonl;
use crate::lexicon::tokenize;

/// Key to vector lookup with a fixed dimensionality.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dim: usize,
    entries: HashMap<String, Vec<f64>>,
    duplicates: Vec<String>,
}

impl EmbeddingStore {
    /// Build a store from in-memory pairs. Later duplicates are rejected.
    pub fn from_pairs<K: Into<String>>(
        pairs: impl IntoIterator<Item = (K, Vec<f64>)>,
    ) -> Result<Self> {
        let mut store = EmbeddingStore::default();
        for (key, vector) in pairs {
            let key = key.into();
            store.check_vector(&key, &vector)?;
            if store.entries.contains_key(&key) {
                return Err(Error::InvalidInput(format!("duplicate key `{key}`")));
            }
            store.entries.insert(key, vector);
        }
        Ok(store)
    }

    fn check_vector(&mut self, key: &str, vector: &[f64]) -> Result<()> {
        if vector.is_empty() {
            return Err(Error::InvalidInput(format!("`{key}` has an empty vector")));
        }
        if self.entries.is_empty() && self.dim == 0 {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "`{key}` has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "`{key}` has non-finite component {bad}"
            )));
        }
        Ok(())
    }

    /// Load a GloVe-style text file: `token v1 v2 ... vd` per line.
    ///
    /// Dimensionality comes from the first line. Repeated tokens keep their
    /// first vector; the repeats are logged and listed in [`duplicates`](Self::duplicates).
    pub fn load_word_vectors(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut store = EmbeddingStore::default();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else {
                continue;
            };
            let vector = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, line_no, format!("`{token}`: {e}")))?;
            store
                .check_vector(token, &vector)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            if store.entries.contains_key(token) {
                log::warn!(
                    "{}:{line_no}: duplicate token `{token}`, keeping first",
                    path.display()
                );
                store.duplicates.push(token.to_string());
                continue;
            }
            store.entries.insert(token.to_string(), vector);
        }
        if store.entries.is_empty() {
            return Err(Error::EmptyFile {
                path: path.to_path_buf(),
            });
        }
        Ok(store)
    }

    /// Load a JSONL sidecar of `{"key": ..., "vector": [...]}` records.
    pub fn load_sidecar(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Record {
            key: String,
            vector: Vec<f64>,
        }

        let mut store = EmbeddingStore::default();
        for (line, record) in jsonl::read_records::<Record>(path)? {
            store
                .check_vector(&record.key, &record.vector)
                .map_err(|e| Error::parse(path, line, e.to_string()))?;
            if store.entries.contains_key(&record.key) {
                return Err(Error::DuplicateKey {
                    path: path.to_path_buf(),
                    key: record.key,
                });
            }
            store.entries.insert(record.key, record.vector);
        }
        if store.entries.is_empty() {
            return Err(Error::EmptyFile {
                path: path.to_path_buf(),
            });
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Tokens that appeared more than once in a word-vector file.
    pub fn duplicates(&self) -> &[String] {
        &self.duplicates
    }

    /// Vector for a possibly multi-word label.
    ///
    /// Tries the label verbatim, then lowercased, then falls back to the
    /// component-wise mean of its in-vocabulary tokens.
    pub fn phrase_vector(&self, label: &str) -> Option<Cow<'_, [f64]>> {
        if let Some(v) = self.get(label) {
            return Some(Cow::Borrowed(v));
        }
        let lower = label.to_lowercase();
        if let Some(v) = self.get(&lower) {
            return Some(Cow::Borrowed(v));
        }
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for token in tokenize(label) {
            if let Some(v) = self.get(&token) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        sum.iter_mut().for_each(|s| *s /= n as f64);
        Some(Cow::Owned(sum))
    }
}

/// Cosine similarity in double precision, clamped to [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
