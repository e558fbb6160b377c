//! Description embeddings, cross-task similarity, top-M neighborhoods with
//! normalized weights, and semantic volatility.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::Dfa;
use crate::distill::KnowledgePack;

pub const HASHED_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("embedding `{text}` failed: {message}")]
    Provider { text: String, message: String },
    #[error("no fixture vector for `{0}`")]
    Missing(String),
    #[error("embedding service: {0}")]
    Http(String),
    #[error("bad fixture: {0}")]
    Fixture(String),
}

/// Deterministic text → vector map.
pub trait EmbeddingProvider: Send + Sync {
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError>;
}

/// Lowercase bag-of-words hashed into buckets with FNV-1a, L2-normalized.
#[derive(Debug, Clone)]
pub struct HashedBowProvider {
    dim: usize,
}

impl Default for HashedBowProvider {
    fn default() -> Self {
        Self { dim: HASHED_DIM }
    }
}

impl HashedBowProvider {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn embed_one(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for token in tokenize(text) {
            v[(fnv1a(token.as_bytes()) % self.dim as u64) as usize] += 1.0;
        }
        l2_normalize(&mut v);
        v
    }
}

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn l2_normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

impl EmbeddingProvider for HashedBowProvider {
    fn id(&self) -> String {
        format!("hashed-bow-{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

/// Precomputed vectors loaded from a JSON map text → vector.
///
/// With a fallback, unknown texts embed into a separate block of coordinates,
/// so they are orthogonal to every fixture vector.
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    id: String,
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    fallback: Option<HashedBowProvider>,
}

impl FixtureProvider {
    pub fn new(
        id: &str,
        vectors: HashMap<String, Vec<f64>>,
        fallback: Option<HashedBowProvider>,
    ) -> Result<Self, EmbedError> {
        let mut dims = vectors.values().map(Vec::len);
        let dim = dims.next().unwrap_or(0);
        if dims.any(|d| d != dim) {
            return Err(EmbedError::Fixture("vectors differ in dimension".into()));
        }
        if vectors.values().flatten().any(|x| !x.is_finite()) {
            return Err(EmbedError::Fixture("non-finite entry".into()));
        }
        Ok(Self {
            id: id.to_string(),
            dim,
            vectors,
            fallback,
        })
    }

    pub fn from_json(id: &str, text: &str, fallback: Option<HashedBowProvider>) -> Result<Self, EmbedError> {
        let vectors: HashMap<String, Vec<f64>> =
            serde_json::from_str(text).map_err(|e| EmbedError::Fixture(e.to_string()))?;
        Self::new(id, vectors, fallback)
    }

    pub fn load(path: &Path, fallback: Option<HashedBowProvider>) -> Result<Self, EmbedError> {
        let text = std::fs::read_to_string(path).map_err(|e| EmbedError::Fixture(e.to_string()))?;
        let id = path
            .file_stem()
            .map_or_else(|| "fixture".to_string(), |s| s.to_string_lossy().into_owned());
        Self::from_json(&format!("fixture:{id}"), &text, fallback)
    }

    fn embed_one(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let extra = self.fallback.as_ref().map_or(0, |f| f.dim);
        let mut out = vec![0.0; self.dim + extra];
        match (self.vectors.get(text), &self.fallback) {
            (Some(v), _) => out[..self.dim].copy_from_slice(v),
            (None, Some(f)) => out[self.dim..].copy_from_slice(&f.embed_one(text)),
            (None, None) => return Err(EmbedError::Missing(text.to_string())),
        }
        Ok(out)
    }
}

impl EmbeddingProvider for FixtureProvider {
    fn id(&self) -> String {
        match &self.fallback {
            Some(f) => format!("{}+{}", self.id, f.id()),
            None => self.id.clone(),
        }
    }

    fn dim(&self) -> usize {
        self.dim + self.fallback.as_ref().map_or(0, |f| f.dim)
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts.iter().map(|t| self.embed_one(t)).collect()
    }
}

/// Client for an embedding service speaking `{"texts"}` → `{"vectors"}`.
#[derive(Debug)]
pub struct HttpEmbeddingProvider {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    dim: Mutex<Option<usize>>,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

impl HttpEmbeddingProvider {
    pub fn new(endpoint: &str, model: &str, api_key: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        Self {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key,
            agent,
            dim: Mutex::new(None),
        }
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn id(&self) -> String {
        format!("http:{}#{}", self.endpoint, self.model)
    }

    fn dim(&self) -> usize {
        self.dim.lock().expect("dim lock").unwrap_or(0)
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let fail = |message: String| EmbedError::Provider {
            text: texts.first().cloned().unwrap_or_default(),
            message,
        };
        let resp: EmbedResponse = req
            .send_json(EmbedRequest { texts })
            .map_err(|e| fail(e.to_string()))?
            .body_mut()
            .read_json()
            .map_err(|e| fail(e.to_string()))?;
        if resp.vectors.len() != texts.len() {
            return Err(EmbedError::Http(format!(
                "expected {} vectors, got {}",
                texts.len(),
                resp.vectors.len()
            )));
        }
        let mut dim = self.dim.lock().expect("dim lock");
        for (t, v) in texts.iter().zip(&resp.vectors) {
            if v.iter().any(|x| !x.is_finite()) || dim.is_some_and(|d| d != v.len()) {
                return Err(EmbedError::Provider {
                    text: t.clone(),
                    message: "malformed vector".into(),
                });
            }
            *dim = Some(v.len());
        }
        Ok(resp.vectors)
    }
}

/// Memoizes a provider by (provider id, text).
pub struct CachedEmbedder {
    provider: Arc<dyn EmbeddingProvider>,
    cache: Mutex<HashMap<(String, String), Vec<f64>>>,
    calls: AtomicUsize,
}

impl CachedEmbedder {
    pub fn new(provider: Arc<dyn EmbeddingProvider>) -> Self {
        Self {
            provider,
            cache: Mutex::new(HashMap::new()),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn provider_id(&self) -> String {
        self.provider.id()
    }

    pub fn dim(&self) -> usize {
        self.provider.dim()
    }

    /// Number of texts forwarded to the underlying provider.
    pub fn provider_calls(&self) -> usize {
        self.calls.load(AtomicOrdering::Relaxed)
    }

    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let id = self.provider.id();
        let missing: Vec<String> = {
            let cache = self.cache.lock().expect("cache lock");
            let mut m: Vec<String> = texts
                .iter()
                .filter(|t| !cache.contains_key(&(id.clone(), (*t).clone())))
                .cloned()
                .collect();
            m.sort();
            m.dedup();
            m
        };
        if !missing.is_empty() {
            let vectors = self.provider.embed(&missing)?;
            self.calls.fetch_add(missing.len(), AtomicOrdering::Relaxed);
            let mut cache = self.cache.lock().expect("cache lock");
            for (t, v) in missing.into_iter().zip(vectors) {
                cache.insert((id.clone(), t), v);
            }
        }
        let cache = self.cache.lock().expect("cache lock");
        Ok(texts.iter().map(|t| cache[&(id.clone(), t.clone())].clone()).collect())
    }
}

/// One vector per automaton state, in state order.
pub fn embed_all(dfa: &Dfa, embedder: &CachedEmbedder) -> Result<Vec<Vec<f64>>, EmbedError> {
    embedder.embed(dfa.descriptions())
}

/// Cosine similarity clamped to [−1, 1]; 0.0 when either vector is zero.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "embedding dimensions differ");
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        log::warn!("cosine similarity with a zero vector; using 0.0");
        return 0.0;
    }
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborEntry {
    /// Index into the pack list.
    pub source: usize,
    pub source_id: String,
    pub state: usize,
    pub state_name: String,
    pub similarity: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighborhood {
    pub target: usize,
    pub entries: Vec<NeighborEntry>,
    /// No usable source: empty, or every similarity ≤ 0.
    pub degenerate: bool,
}

/// Embedded description set of one source pack.
#[derive(Debug, Clone)]
pub struct SourceEmbeddings {
    pub source_id: String,
    pub state_names: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

impl SourceEmbeddings {
    pub fn from_pack(pack: &KnowledgePack, embedder: &CachedEmbedder) -> Result<Self, EmbedError> {
        Ok(Self {
            source_id: pack.source_id.clone(),
            state_names: pack.dfa.states().to_vec(),
            vectors: embed_all(&pack.dfa, embedder)?,
        })
    }
}

fn rank(a: &NeighborEntry, b: &NeighborEntry) -> Ordering {
    b.similarity
        .total_cmp(&a.similarity)
        .then_with(|| a.source_id.cmp(&b.source_id))
        .then_with(|| a.state_name.cmp(&b.state_name))
}

/// Keeps the `m` best candidates by similarity, ties broken by
/// (source id, state id); weights are left at zero.
pub fn select_top(target: usize, mut candidates: Vec<NeighborEntry>, m: usize) -> Neighborhood {
    assert!(m >= 1, "neighborhood size must be positive");
    candidates.sort_by(rank);
    candidates.truncate(m);
    Neighborhood {
        target,
        degenerate: candidates.is_empty(),
        entries: candidates,
    }
}

pub fn build_neighborhood(
    target: usize,
    target_vector: &[f64],
    sources: &[SourceEmbeddings],
    m: usize,
) -> Neighborhood {
    let candidates = sources
        .iter()
        .enumerate()
        .flat_map(|(si, src)| {
            src.vectors.iter().enumerate().map(move |(state, v)| NeighborEntry {
                source: si,
                source_id: src.source_id.clone(),
                state,
                state_name: src.state_names[state].clone(),
                similarity: cosine_similarity(target_vector, v),
                weight: 0.0,
            })
        })
        .collect();
    select_top(target, candidates, m)
}

/// Clamp-then-normalize weights; all-nonpositive similarities fall back to
/// uniform weights and mark the neighborhood degenerate.
pub fn compute_weights(mut n: Neighborhood) -> Neighborhood {
    if n.entries.is_empty() {
        n.degenerate = true;
        return n;
    }
    let total: f64 = n.entries.iter().map(|e| e.similarity.max(0.0)).sum();
    if total > 0.0 {
        for e in &mut n.entries {
            e.weight = e.similarity.max(0.0) / total;
        }
        n.degenerate = false;
    } else {
        let w = 1.0 / n.entries.len() as f64;
        for e in &mut n.entries {
            e.weight = w;
        }
        n.degenerate = true;
    }
    n
}

/// 1 − best similarity to any source state, clamped to [0, 2]; 1.0 without sources.
pub fn semantic_volatility(target_vector: &[f64], sources: &[SourceEmbeddings]) -> f64 {
    let best = sources
        .iter()
        .flat_map(|s| s.vectors.iter())
        .map(|v| cosine_similarity(target_vector, v))
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
    match best {
        Some(b) => (1.0 - b).clamp(0.0, 2.0),
        None => 1.0,
    }
}

/// Mean similarity over every (target state, source state) pair.
pub fn mean_pairwise_similarity(target: &[Vec<f64>], source: &SourceEmbeddings) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for t in target {
        for s in &source.vectors {
            sum += cosine_similarity(t, s);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Pack index with the highest mean pairwise description similarity; ties go to the lower index.
pub fn best_aligned_source(target: &[Vec<f64>], sources: &[SourceEmbeddings]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in sources.iter().enumerate() {
        let score = mean_pairwise_similarity(target, s);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// Per-target-state neighborhoods and volatilities, computed once per
/// (target automaton, pack set).
#[derive(Debug, Clone, Serialize)]
pub struct SemanticIndex {
    pub neighborhoods: Vec<Neighborhood>,
    pub v_sem: Vec<f64>,
}

impl SemanticIndex {
    pub fn build(target: &Dfa, packs: &[&KnowledgePack], embedder: &CachedEmbedder, m: usize) -> Result<Self, EmbedError> {
        let sources = packs
            .iter()
            .map(|p| SourceEmbeddings::from_pack(p, embedder))
            .collect::<Result<Vec<_>, _>>()?;
        let targets = embed_all(target, embedder)?;
        Ok(Self::from_embeddings(&targets, &sources, m))
    }

    pub fn from_embeddings(targets: &[Vec<f64>], sources: &[SourceEmbeddings], m: usize) -> Self {
        let neighborhoods = targets
            .iter()
            .enumerate()
            .map(|(i, v)| compute_weights(build_neighborhood(i, v, sources, m)))
            .collect();
        let v_sem = targets.iter().map(|v| semantic_volatility(v, sources)).collect();
        Self { neighborhoods, v_sem }
    }

    /// One empty, degenerate neighborhood per state; volatility 1.0.
    pub fn empty(num_states: usize) -> Self {
        Self {
            neighborhoods: (0..num_states)
                .map(|target| Neighborhood {
                    target,
                    entries: Vec::new(),
                    degenerate: true,
                })
                .collect(),
            v_sem: vec![1.0; num_states],
        }
    }
}
