//! TF-IDF retrieval over function signature/docstring sources.
//!
//! Documents are the raw `def ...` source blocks registered with the
//! [`crate::registry::Registry`]. Terms are lowercased alphanumeric runs;
//! term weight is raw count times smoothed inverse document frequency
//! `ln((1 + D) / (1 + df)) + 1`; document and query vectors are
//! L2-normalized and scored by cosine similarity with an exhaustive scan.
//! Ties break toward the lower registration index, so rankings are
//! deterministic.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

use crate::prompts;
use crate::registry::Registry;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("cannot build an index over zero documents")]
    EmptyCorpus,
    #[error("k must be nonzero")]
    ZeroK,
    #[error("k = {k} exceeds document count {n}")]
    KTooLarge { k: usize, n: usize },
}

/// Sparse L2-normalized document vector: sorted (term id, weight) pairs.
type SparseVec = Vec<(usize, f64)>;

/// Inverted TF-IDF index over a fixed document list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfIdfIndex {
    vocab: HashMap<String, usize>,
    idf: Vec<f64>,
    docs: Vec<SparseVec>,
}

/// Lowercased alphanumeric term stream.
fn terms(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
}

fn l2_normalize(v: &mut SparseVec) {
    let norm: f64 = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in v.iter_mut() {
            *w /= norm;
        }
    }
}

impl TfIdfIndex {
    /// Builds an index over `documents`, in order.
    pub fn build(documents: &[String]) -> Result<Self, RetrievalError> {
        if documents.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        let mut vocab: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<usize> = Vec::new();
        let mut counts: Vec<HashMap<usize, usize>> = Vec::with_capacity(documents.len());
        for doc in documents {
            let mut tf: HashMap<usize, usize> = HashMap::new();
            for term in terms(doc) {
                let next_id = vocab.len();
                let id = *vocab.entry(term).or_insert(next_id);
                if id == df.len() {
                    df.push(0);
                }
                *tf.entry(id).or_insert(0) += 1;
            }
            for &id in tf.keys() {
                df[id] += 1;
            }
            counts.push(tf);
        }
        let d = documents.len() as f64;
        let idf: Vec<f64> = df
            .iter()
            .map(|&n| ((1.0 + d) / (1.0 + n as f64)).ln() + 1.0)
            .collect();
        let docs = counts
            .into_iter()
            .map(|tf| {
                let mut v: SparseVec = tf
                    .into_iter()
                    .map(|(id, n)| (id, n as f64 * idf[id]))
                    .collect();
                v.sort_by_key(|&(id, _)| id);
                l2_normalize(&mut v);
                v
            })
            .collect();
        Ok(TfIdfIndex { vocab, idf, docs })
    }

    /// Builds the index over a registry's function descriptions, one vector
    /// per registered function in registration order.
    pub fn from_registry(registry: &Registry) -> Result<Self, RetrievalError> {
        let docs: Vec<String> = (0..registry.len())
            .map(|i| registry.spec_at(i).expect("index in range").description.clone())
            .collect();
        TfIdfIndex::build(&docs)
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    /// TF-IDF vector of a query, L2-normalized; unseen terms are dropped.
    fn query_vec(&self, query: &str) -> SparseVec {
        let mut tf: HashMap<usize, usize> = HashMap::new();
        for term in terms(query) {
            if let Some(&id) = self.vocab.get(&term) {
                *tf.entry(id).or_insert(0) += 1;
            }
        }
        let mut v: SparseVec = tf
            .into_iter()
            .map(|(id, n)| (id, n as f64 * self.idf[id]))
            .collect();
        v.sort_by_key(|&(id, _)| id);
        l2_normalize(&mut v);
        v
    }

    fn cosine(a: &SparseVec, b: &SparseVec) -> f64 {
        // Both sides are sorted by term id and L2-normalized.
        let mut i = 0;
        let mut j = 0;
        let mut dot = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }

    /// Top-`k` document indices by cosine similarity, exhaustive scan,
    /// descending score with ties broken by lower index.
    pub fn top_k(&self, query: &str, k: usize) -> Result<Vec<(usize, f64)>, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        if k > self.docs.len() {
            return Err(RetrievalError::KTooLarge {
                k,
                n: self.docs.len(),
            });
        }
        let qv = self.query_vec(query);
        let mut scored: Vec<(usize, f64)> = self
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| (i, Self::cosine(&qv, d)))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }
}

/// Retrieves `k` candidates for `query` and assembles the candidate-style
/// prompt from their raw sources. Returns the prompt and the retrieved
/// registry indices in rank order.
pub fn assemble_rag_prompt(
    registry: &Registry,
    index: &TfIdfIndex,
    query: &str,
    k: usize,
) -> Result<(String, Vec<usize>), RetrievalError> {
    let hits = index.top_k(query, k)?;
    let indices: Vec<usize> = hits.iter().map(|&(i, _)| i).collect();
    let sources: Vec<String> = indices
        .iter()
        .map(|&i| registry.source_at(i).expect("index in range"))
        .collect();
    Ok((prompts::rag_prompt(&sources, query), indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn corpus() -> Vec<String> {
        vec![
            "take a photo with the camera front or back resolution".into(),
            "make a phone call to the given number".into(),
            "set an alarm at a specific time".into(),
            "get the weather forecast for a location".into(),
            "play music media on a smart device in a room".into(),
        ]
    }

    /// Dense brute-force oracle: recompute TF-IDF cosine from scratch with a
    /// separate implementation and compare rankings.
    fn oracle_scores(docs: &[String], query: &str) -> Vec<f64> {
        let tokenize = |s: &str| -> Vec<String> {
            s.split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(|t| t.to_lowercase())
                .collect()
        };
        let mut vocab: Vec<String> = docs
            .iter()
            .flat_map(|d| tokenize(d))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        vocab.sort();
        let dense = |text: &str, idf: &[f64]| -> Vec<f64> {
            let toks = tokenize(text);
            let mut v: Vec<f64> = vocab
                .iter()
                .enumerate()
                .map(|(i, t)| toks.iter().filter(|x| *x == t).count() as f64 * idf[i])
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            v
        };
        let d = docs.len() as f64;
        let idf: Vec<f64> = vocab
            .iter()
            .map(|t| {
                let df = docs
                    .iter()
                    .filter(|doc| tokenize(doc).contains(t))
                    .count() as f64;
                ((1.0 + d) / (1.0 + df)).ln() + 1.0
            })
            .collect();
        let qv = dense(query, &idf);
        docs.iter()
            .map(|doc| {
                let dv = dense(doc, &idf);
                qv.iter().zip(&dv).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    #[test]
    fn matches_dense_oracle() {
        let docs = corpus();
        let index = TfIdfIndex::build(&docs).unwrap();
        for query in [
            "take a photo",
            "what is the weather",
            "call my mom on the phone",
            "play some music",
            "unrelated gibberish zzz",
        ] {
            let got = index.top_k(query, docs.len()).unwrap();
            let oracle = oracle_scores(&docs, query);
            for &(i, score) in &got {
                assert!(
                    (score - oracle[i]).abs() < 1e-9,
                    "doc {i}: {score} vs oracle {}",
                    oracle[i]
                );
            }
            // Ranking is descending with index tiebreak.
            for w in got.windows(2) {
                assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
            }
        }
    }

    #[test]
    fn relevant_doc_ranks_first() {
        let index = TfIdfIndex::build(&corpus()).unwrap();
        assert_eq!(index.top_k("take a photo with the camera", 1).unwrap()[0].0, 0);
        assert_eq!(index.top_k("weather forecast please", 1).unwrap()[0].0, 3);
    }

    #[test]
    fn unseen_terms_score_zero() {
        let index = TfIdfIndex::build(&corpus()).unwrap();
        let hits = index.top_k("zzz qqq xyzzy", 3).unwrap();
        assert!(hits.iter().all(|&(_, s)| s == 0.0));
        // Zero ties resolve by index.
        assert_eq!(hits.iter().map(|&(i, _)| i).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn registry_index_covers_all_functions() {
        let registry = Registry::builtin();
        let index = TfIdfIndex::from_registry(&registry).unwrap();
        assert_eq!(index.n_docs(), registry.len());
        // A near-verbatim query should retrieve its own function first.
        let hits = index.top_k("adjust the device volume by a difference", 5).unwrap();
        let name = registry.spec_at(hits[0].0).unwrap().name.clone();
        assert_eq!(name, "adjust_volume");
    }

    #[test]
    fn rag_prompt_embeds_retrieved_sources() {
        let registry = Registry::builtin();
        let index = TfIdfIndex::from_registry(&registry).unwrap();
        let (prompt, indices) =
            assemble_rag_prompt(&registry, &index, "set an alarm for 7am", 5).unwrap();
        assert_eq!(indices.len(), 5);
        for &i in &indices {
            let src = registry.source_at(i).unwrap();
            assert!(prompt.contains(&src));
        }
        assert!(prompt.contains("5 candidate functions"));
    }

    #[test]
    fn serialization_round_trip() {
        let index = TfIdfIndex::build(&corpus()).unwrap();
        let json = serde_json::to_string(&index).unwrap();
        let back: TfIdfIndex = serde_json::from_str(&json).unwrap();
        let a = index.top_k("take a photo", 5).unwrap();
        let b = back.top_k("take a photo", 5).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.0, y.0);
            assert!((x.1 - y.1).abs() < 1e-12);
        }
    }

    #[test]
    fn k_bounds_enforced() {
        let index = TfIdfIndex::build(&corpus()).unwrap();
        assert!(matches!(index.top_k("x", 0), Err(RetrievalError::ZeroK)));
        assert!(matches!(
            index.top_k("x", 6),
            Err(RetrievalError::KTooLarge { k: 6, n: 5 })
        ));
    }

    #[test]
    fn verbatim_description_query_scores_one() {
        let registry = Registry::builtin();
        let index = TfIdfIndex::from_registry(&registry).unwrap();
        for i in 0..registry.len() {
            let desc = registry.spec_at(i).unwrap().description.clone();
            let hits = index.top_k(&desc, registry.len()).unwrap();
            let (top, score) = hits[0];
            assert_eq!(top, i, "description of {i} retrieved {top}");
            assert!((score - 1.0).abs() < 1e-9, "self-score {score}");
        }
    }

    #[test]
    fn full_k_is_a_permutation() {
        let index = TfIdfIndex::build(&corpus()).unwrap();
        let hits = index.top_k("weather phone camera", 5).unwrap();
        let mut ids: Vec<usize> = hits.iter().map(|&(i, _)| i).collect();
        ids.sort();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn injecting_distinctive_terms_never_lowers_rank() {
        let docs = corpus();
        let index = TfIdfIndex::build(&docs).unwrap();
        let base_query = "do the thing at a specific time";
        for (i, doc) in docs.iter().enumerate() {
            let rank_of = |hits: &[(usize, f64)]| {
                hits.iter().position(|&(d, _)| d == i).unwrap()
            };
            let before = rank_of(&index.top_k(base_query, docs.len()).unwrap());
            let boosted = format!("{base_query} {doc}");
            let after = rank_of(&index.top_k(&boosted, docs.len()).unwrap());
            assert!(after <= before, "doc {i}: rank {before} -> {after}");
        }
    }
}
