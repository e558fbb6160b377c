//! Prompting a language model for a task automaton, with a replay mode for
//! offline runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dfa::{validate_dfa, Dfa, DfaError, NONE_SYMBOL};

pub const DEFAULT_ATTEMPTS: usize = 3;

pub const DFA_SCHEMA: &str = r#"Answer with one JSON object of this shape and nothing else:
{
  "states": ["ω0", "ω1", ...],
  "alphabet": ["<symbol>", ..., "none"],
  "initial": "ω0",
  "accepting": ["<state>", ...],
  "transitions": [{"from": "<state>", "symbol": "<symbol>", "to": "<state>"}, ...],
  "descriptions": {"<state>": "<short description of the progress it represents>", ...}
}
Pairs (state, symbol) without a listed transition stay in the same state.
Use only symbols from the labeling vocabulary, plus "none"."#;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("task description is empty")]
    EmptyDescription,
    #[error("labeling vocabulary is empty")]
    EmptyVocabulary,
    #[error("no JSON object found in response")]
    NoJson,
    #[error("response is not a valid DFA: {0}")]
    Schema(#[from] DfaError),
    #[error("DFA failed validation: {0}")]
    Invalid(String),
    #[error("unknown symbol `{0}` (not in the labeling vocabulary)")]
    UnknownSymbol(String),
    #[error("endpoint failure: {0}")]
    Endpoint(String),
    #[error("no recorded response for prompt {0}")]
    ReplayMiss(String),
    #[error("replay fixture: {0}")]
    Fixture(String),
    #[error("replay mode requires a fixture path")]
    MissingFixture,
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: usize, last: Box<LlmError> },
}

impl LlmError {
    /// Errors that a corrected answer could fix.
    fn is_retryable(&self) -> bool {
        matches!(
            self,
            LlmError::NoJson | LlmError::Schema(_) | LlmError::Invalid(_) | LlmError::UnknownSymbol(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub task_description: String,
    pub vocabulary: Vec<String>,
    #[serde(default = "default_schema")]
    pub schema: String,
}

fn default_schema() -> String {
    DFA_SCHEMA.to_string()
}

impl PromptSpec {
    pub fn new(task_description: &str, vocabulary: &[&str]) -> Self {
        Self {
            task_description: task_description.to_string(),
            vocabulary: vocabulary.iter().map(|s| s.to_string()).collect(),
            schema: default_schema(),
        }
    }
}

pub fn build_prompt(spec: &PromptSpec) -> Result<String, LlmError> {
    if spec.task_description.trim().is_empty() {
        return Err(LlmError::EmptyDescription);
    }
    if spec.vocabulary.is_empty() {
        return Err(LlmError::EmptyVocabulary);
    }
    let mut out = String::new();
    out.push_str("You translate a task description into a deterministic finite automaton.\n\n");
    out.push_str("Task description:\n");
    out.push_str(spec.task_description.trim());
    out.push_str("\n\nInstructions:\n");
    out.push_str("1. Extract the key subgoals and the temporal dependencies between them.\n");
    out.push_str("2. Define automaton states that represent task-progress milestones.\n");
    out.push_str("3. Specify a deterministic transition function over the labeling vocabulary.\n");
    out.push_str("4. Designate the initial state and the accepting states.\n");
    out.push_str("5. Provide a short semantic description for every state.\n\n");
    out.push_str("Labeling vocabulary: ");
    out.push_str(&spec.vocabulary.join(", "));
    out.push_str("\n\n");
    out.push_str(spec.schema.trim());
    out.push('\n');
    Ok(out)
}

/// Hex SHA-256 of the prompt text.
pub fn prompt_hash(prompt: &str) -> String {
    Sha256::digest(prompt.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn retry_prompt(base: &str, error: &LlmError) -> String {
    format!(
        "{base}\nYour previous answer was rejected: {error}\nReturn a corrected JSON object.\n"
    )
}

/// Parses the first well-formed DFA object in `text`. Later DFA objects are
/// ignored with a warning.
pub fn parse_llm_response(text: &str) -> Result<Dfa, LlmError> {
    let mut found: Option<Dfa> = None;
    let mut first_error: Option<DfaError> = None;
    let mut pos = 0;
    while let Some(offset) = text[pos..].find('{') {
        let start = pos + offset;
        let mut stream = serde_json::Deserializer::from_str(&text[start..]).into_iter::<serde_json::Value>();
        match stream.next() {
            Some(Ok(value)) if value.is_object() => {
                pos = start + stream.byte_offset();
                match Dfa::from_value(value) {
                    Ok(dfa) if found.is_none() => found = Some(dfa),
                    Ok(_) => {
                        warn!("response holds more than one DFA object; using the first");
                        break;
                    }
                    Err(e) => {
                        first_error.get_or_insert(e);
                    }
                }
            }
            _ => pos = start + 1,
        }
    }
    match (found, first_error) {
        (Some(dfa), _) => Ok(dfa),
        (None, Some(e)) => Err(LlmError::Schema(e)),
        (None, None) => Err(LlmError::NoJson),
    }
}

/// Parses, then checks the vocabulary and the validator.
fn accept_response(text: &str, vocabulary: &[String]) -> Result<Dfa, LlmError> {
    let dfa = parse_llm_response(text)?;
    if let Some(sym) = dfa
        .alphabet()
        .iter()
        .find(|s| s.as_str() != NONE_SYMBOL && !vocabulary.contains(s))
    {
        return Err(LlmError::UnknownSymbol(sym.clone()));
    }
    let report = validate_dfa(&dfa);
    if !report.is_ok() {
        return Err(LlmError::Invalid(report.error_text()));
    }
    Ok(dfa)
}

/// Something that answers a prompt.
pub trait ChatBackend {
    fn model(&self) -> String;
    fn complete(&self, prompt: &str) -> Result<String, LlmError>;
}

/// Answers from a JSON map prompt-hash → response text.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    pub responses: BTreeMap<String, String>,
    pub model: String,
}

impl ReplayBackend {
    pub fn from_json(text: &str, model: &str) -> Result<Self, LlmError> {
        let responses = serde_json::from_str(text).map_err(|e| LlmError::Fixture(e.to_string()))?;
        Ok(Self {
            responses,
            model: model.to_string(),
        })
    }

    pub fn load(path: &Path, model: &str) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::Fixture(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, model)
    }
}

impl ChatBackend for ReplayBackend {
    fn model(&self) -> String {
        self.model.clone()
    }

    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let hash = prompt_hash(prompt);
        self.responses
            .get(&hash)
            .cloned()
            .ok_or(LlmError::ReplayMiss(hash))
    }
}

/// Chat-completion client: `{"model", "messages", "temperature"}` in, first choice out.
#[derive(Debug)]
pub struct HttpChatBackend {
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReply,
}

#[derive(Deserialize)]
struct ChatReply {
    content: String,
}

impl HttpChatBackend {
    pub fn new(endpoint: &str, model: &str, temperature: f64, api_key: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Self {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            temperature,
            api_key,
            agent,
        }
    }
}

impl ChatBackend for HttpChatBackend {
    fn model(&self) -> String {
        self.model.clone()
    }

    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let body = ChatRequest {
            model: &self.model,
            messages: vec![ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: self.temperature,
        };
        let resp: ChatResponse = req
            .send_json(&body)
            .map_err(|e| LlmError::Endpoint(e.to_string()))?
            .body_mut()
            .read_json()
            .map_err(|e| LlmError::Endpoint(e.to_string()))?;
        resp.choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| LlmError::Endpoint("response has no choices".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmMode {
    Live,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmClientConfig {
    #[serde(default)]
    pub endpoint: String,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    pub mode: LlmMode,
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    #[serde(default)]
    pub api_key: Option<String>,
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
}

fn default_model() -> String {
    "replay".to_string()
}

fn default_attempts() -> usize {
    DEFAULT_ATTEMPTS
}

impl LlmClientConfig {
    pub fn replay(fixture: impl Into<PathBuf>) -> Self {
        Self {
            endpoint: String::new(),
            model: default_model(),
            temperature: 0.0,
            mode: LlmMode::Replay,
            fixture: Some(fixture.into()),
            api_key: None,
            max_attempts: DEFAULT_ATTEMPTS,
        }
    }

    pub fn live(endpoint: &str, model: &str, api_key: Option<String>) -> Self {
        Self {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            temperature: 0.0,
            mode: LlmMode::Live,
            fixture: None,
            api_key,
            max_attempts: DEFAULT_ATTEMPTS,
        }
    }

    pub fn backend(&self) -> Result<Box<dyn ChatBackend>, LlmError> {
        Ok(match self.mode {
            LlmMode::Replay => {
                let path = self.fixture.as_ref().ok_or(LlmError::MissingFixture)?;
                Box::new(ReplayBackend::load(path, &self.model)?)
            }
            LlmMode::Live => Box::new(HttpChatBackend::new(
                &self.endpoint,
                &self.model,
                self.temperature,
                self.api_key.clone(),
            )),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Hash of the first prompt.
    pub prompt_hash: String,
    pub model: String,
    pub attempts: usize,
    /// Every raw response, in order.
    pub responses: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GeneratedDfa {
    pub dfa: Dfa,
    pub raw: String,
    pub provenance: Provenance,
}

pub fn generate_dfa(spec: &PromptSpec, cfg: &LlmClientConfig) -> Result<GeneratedDfa, LlmError> {
    let backend = cfg.backend()?;
    generate_with(spec, backend.as_ref(), cfg.max_attempts)
}

/// Prompts, validates, and re-prompts with the validator's complaint.
pub fn generate_with(
    spec: &PromptSpec,
    backend: &dyn ChatBackend,
    max_attempts: usize,
) -> Result<GeneratedDfa, LlmError> {
    let base = build_prompt(spec)?;
    let mut prompt = base.clone();
    let mut responses = Vec::new();
    let mut last = None;
    for attempt in 1..=max_attempts.max(1) {
        let raw = backend.complete(&prompt)?;
        responses.push(raw.clone());
        match accept_response(&raw, &spec.vocabulary) {
            Ok(dfa) => {
                return Ok(GeneratedDfa {
                    dfa,
                    raw,
                    provenance: Provenance {
                        prompt_hash: prompt_hash(&base),
                        model: backend.model(),
                        attempts: attempt,
                        responses,
                    },
                })
            }
            Err(e) if e.is_retryable() => {
                warn!("attempt {attempt} rejected: {e}");
                prompt = retry_prompt(&base, &e);
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(LlmError::Exhausted {
        attempts: responses.len(),
        last: Box::new(last.expect("at least one attempt")),
    })
}

/// Builds a replay map for a scripted sequence of responses, following the
/// same prompts `generate_with` would send.
pub fn record_replay(spec: &PromptSpec, responses: &[&str]) -> Result<BTreeMap<String, String>, LlmError> {
    let base = build_prompt(spec)?;
    let mut prompt = base.clone();
    let mut out = BTreeMap::new();
    for raw in responses {
        out.insert(prompt_hash(&prompt), raw.to_string());
        match accept_response(raw, &spec.vocabulary) {
            Ok(_) => break,
            Err(e) => prompt = retry_prompt(&base, &e),
        }
    }
    Ok(out)
}
