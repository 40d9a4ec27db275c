use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use reqwest::blocking::Client;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("embedder unavailable: {0}")]
    Unavailable(String),
    #[error("embedder protocol error: {0}")]
    Protocol(String),
}

pub trait Embedder: Send + Sync {
    /// Cosine similarity of the two texts' embeddings, in `[0, 1]` for the
    /// native embedder.
    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError>;
}

/// Sparse L2-normalized character-trigram vector, sorted by trigram.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector(pub Vec<([char; 3], f64)>);

impl SparseVector {
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Character-trigram frequencies of the lowercased text, L2-normalized.
/// Texts shorter than three characters map to the zero vector.
pub fn embed_native(text: &str) -> SparseVector {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut grams: Vec<[char; 3]> = chars.windows(3).map(|w| [w[0], w[1], w[2]]).collect();
    grams.sort_unstable();
    let mut counts: Vec<([char; 3], f64)> = Vec::new();
    for g in grams {
        match counts.last_mut() {
            Some((last, c)) if *last == g => *c += 1.0,
            _ => counts.push((g, 1.0)),
        }
    }
    let norm = counts.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
    for (_, c) in &mut counts {
        *c /= norm;
    }
    SparseVector(counts)
}

pub fn cosine_native(a: &str, b: &str) -> f64 {
    if a == b && !a.is_empty() {
        return if embed_native(a).is_zero() { 0.0 } else { 1.0 };
    }
    embed_native(a).dot(&embed_native(b)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrigramEmbedder;

impl Embedder for TrigramEmbedder {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError> {
        Ok(cosine_native(a, b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalEmbedderConfig {
    pub url: String,
    pub timeout: Duration,
    /// Fall back to the trigram embedder when the service cannot be reached.
    pub fallback: bool,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

/// Client for a model service speaking the `/embed` protocol.
pub struct ExternalEmbedder {
    http: Client,
    config: ExternalEmbedderConfig,
    warned: AtomicBool,
}

impl ExternalEmbedder {
    pub fn new(config: ExternalEmbedderConfig) -> Result<Self, EmbedError> {
        let http = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| EmbedError::Unavailable(e.to_string()))?;
        Ok(Self {
            http,
            config,
            warned: AtomicBool::new(false),
        })
    }

    pub fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let url = format!("{}/embed", self.config.url.trim_end_matches('/'));
        let response = self
            .http
            .post(url)
            .json(&EmbedRequest { texts })
            .send()
            .map_err(|e| EmbedError::Unavailable(e.to_string()))?;
        let status = response.status();
        if status == reqwest::StatusCode::SERVICE_UNAVAILABLE {
            return Err(EmbedError::Unavailable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(EmbedError::Protocol(format!("HTTP {status}")));
        }
        let body: EmbedResponse = response.json().map_err(|e| EmbedError::Protocol(e.to_string()))?;
        if body.vectors.len() != texts.len() || body.vectors.iter().any(|v| v.len() != body.dim) {
            return Err(EmbedError::Protocol(format!(
                "expected {} vectors of dim {}",
                texts.len(),
                body.dim
            )));
        }
        Ok(body.vectors)
    }
}

fn cosine_dense(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

impl Embedder for ExternalEmbedder {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError> {
        match self.embed(&[a, b]) {
            Ok(v) => Ok(cosine_dense(&v[0], &v[1])),
            Err(EmbedError::Unavailable(reason)) if self.config.fallback => {
                if !self.warned.swap(true, Ordering::Relaxed) {
                    log::warn!("embedding service unavailable ({reason}); using trigram similarity");
                }
                Ok(cosine_native(a, b))
            }
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateResult {
    pub pass: bool,
    pub similarity: f64,
}

pub fn similarity_gate(original: &str, candidate: &str, embedder: &dyn Embedder, threshold: f64) -> Result<GateResult, EmbedError> {
    let similarity = embedder.similarity(original, candidate)?;
    Ok(GateResult {
        pass: similarity >= threshold,
        similarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_orthogonality() {
        assert_eq!(cosine_native("this is good", "this is good"), 1.0);
        assert_eq!(cosine_native("aaaa", "bbbb"), 0.0);
        assert_eq!(cosine_native("", "abc"), 0.0);
        assert_eq!(cosine_native("ab", "ab"), 0.0);
    }

    #[test]
    fn vector_is_unit_norm() {
        let v = embed_native("The build is green again!");
        let n: f64 = v.0.iter().map(|(_, c)| c * c).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_is_ignored() {
        assert_eq!(cosine_native("Hello World", "hello world"), 1.0);
    }

    #[test]
    fn strict_threshold_rejects_any_change() {
        let long = "the parser now handles nested generics without recursion limits";
        let changed = "the parser now handles nested generics without recursion bounds";
        let gate = similarity_gate(long, changed, &TrigramEmbedder, 1.0).unwrap();
        assert!(!gate.pass && gate.similarity < 1.0);
        let gate = similarity_gate(long, long, &TrigramEmbedder, 1.0).unwrap();
        assert!(gate.pass && gate.similarity == 1.0);
    }
}
