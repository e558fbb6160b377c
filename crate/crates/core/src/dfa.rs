//! Deterministic finite automata with per-state natural-language descriptions.
//!
//! Automata are read from and written to the DFA-JSON document format:
//!
//! ```json
//! {
//!   "states": ["w0", "w1"],
//!   "alphabet": ["key", "none"],
//!   "initial": "w0",
//!   "accepting": ["w1"],
//!   "transitions": [{"from": "w0", "symbol": "key", "to": "w1"}],
//!   "descriptions": {"w0": "start", "w1": "collect key"}
//! }
//! ```
//!
//! Any `(state, symbol)` pair without a declared transition is a self-loop, so
//! the transition function is total once parsed. The reserved symbol `none`
//! is always part of the alphabet.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Symbol emitted by a labeling function when nothing happened.
pub const NONE_SYMBOL: &str = "none";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DfaError {
    #[error("malformed DFA document: {0}")]
    Malformed(String),
    #[error("DFA has no states")]
    NoStates,
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("missing initial state `{0}`")]
    MissingInitial(String),
    #[error("nondeterministic transitions from `{state}` on `{symbol}`")]
    Nondeterministic { state: String, symbol: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

/// Wire form of a DFA. Field order matches the documented schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDocument {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub descriptions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Vec<String>,
    /// Dense `states × alphabet` successor table.
    table: Vec<usize>,
    initial: usize,
    accepting: Vec<bool>,
    descriptions: Vec<String>,
    state_index: HashMap<String, usize>,
    symbol_index: HashMap<String, usize>,
}

impl Dfa {
    pub fn from_document(doc: DfaDocument) -> Result<Self, DfaError> {
        if doc.states.is_empty() {
            return Err(DfaError::NoStates);
        }
        let mut state_index = HashMap::with_capacity(doc.states.len());
        for (i, s) in doc.states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(DfaError::DuplicateState(s.clone()));
            }
        }
        let mut alphabet = doc.alphabet.clone();
        if !alphabet.iter().any(|s| s == NONE_SYMBOL) {
            alphabet.push(NONE_SYMBOL.to_string());
        }
        let mut symbol_index = HashMap::with_capacity(alphabet.len());
        for (i, s) in alphabet.iter().enumerate() {
            if symbol_index.insert(s.clone(), i).is_some() {
                return Err(DfaError::DuplicateSymbol(s.clone()));
            }
        }
        let initial = *state_index
            .get(&doc.initial)
            .ok_or_else(|| DfaError::MissingInitial(doc.initial.clone()))?;

        let mut accepting = vec![false; doc.states.len()];
        for s in &doc.accepting {
            let i = state_index
                .get(s)
                .ok_or_else(|| DfaError::UnknownState(s.clone()))?;
            accepting[*i] = true;
        }

        let n_sym = alphabet.len();
        let mut table: Vec<usize> = (0..doc.states.len() * n_sym).map(|i| i / n_sym).collect();
        let mut declared: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &doc.transitions {
            let from = *state_index
                .get(&t.from)
                .ok_or_else(|| DfaError::UnknownState(t.from.clone()))?;
            let to = *state_index
                .get(&t.to)
                .ok_or_else(|| DfaError::UnknownState(t.to.clone()))?;
            let sym = *symbol_index
                .get(&t.symbol)
                .ok_or_else(|| DfaError::UnknownSymbol(t.symbol.clone()))?;
            match declared.insert((from, sym), to) {
                Some(prev) if prev != to => {
                    return Err(DfaError::Nondeterministic {
                        state: t.from.clone(),
                        symbol: t.symbol.clone(),
                    })
                }
                _ => {}
            }
            table[from * n_sym + sym] = to;
        }

        let mut descriptions = vec![String::new(); doc.states.len()];
        for (s, text) in doc.descriptions {
            let i = state_index.get(&s).ok_or(DfaError::UnknownState(s))?;
            descriptions[*i] = text;
        }

        Ok(Self {
            states: doc.states,
            alphabet,
            table,
            initial,
            accepting,
            descriptions,
            state_index,
            symbol_index,
        })
    }

    /// Parses a DFA-JSON document.
    pub fn parse(text: &str) -> Result<Self, DfaError> {
        let doc: DfaDocument =
            serde_json::from_str(text).map_err(|e| DfaError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, DfaError> {
        let doc: DfaDocument =
            serde_json::from_value(value).map_err(|e| DfaError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    /// Document form. Only non-self-loop transitions are listed.
    pub fn to_document(&self) -> DfaDocument {
        let mut transitions = Vec::new();
        for (from, fname) in self.states.iter().enumerate() {
            for (sym, sname) in self.alphabet.iter().enumerate() {
                let to = self.table[from * self.alphabet.len() + sym];
                if to != from {
                    transitions.push(TransitionDoc {
                        from: fname.clone(),
                        symbol: sname.clone(),
                        to: self.states[to].clone(),
                    });
                }
            }
        }
        DfaDocument {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initial: self.states[self.initial].clone(),
            accepting: self
                .states
                .iter()
                .zip(&self.accepting)
                .filter(|(_, a)| **a)
                .map(|(s, _)| s.clone())
                .collect(),
            transitions,
            descriptions: self
                .states
                .iter()
                .cloned()
                .zip(self.descriptions.iter().cloned())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("DFA document serializes")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_name(&self) -> &str {
        &self.states[self.initial]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbol_index.get(name).copied()
    }

    pub fn state_name(&self, idx: usize) -> &str {
        &self.states[idx]
    }

    pub fn description(&self, idx: usize) -> &str {
        &self.descriptions[idx]
    }

    pub fn descriptions(&self) -> &[String] {
        &self.descriptions
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| i)
    }

    /// Index-based transition; both indices must be in range.
    #[inline]
    pub fn step_index(&self, state: usize, symbol: usize) -> usize {
        self.table[state * self.alphabet.len() + symbol]
    }

    #[inline]
    pub fn is_accepting_index(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// `δ(state, symbol)` by name.
    pub fn step(&self, state: &str, symbol: &str) -> Result<&str, DfaError> {
        let s = self
            .state_index(state)
            .ok_or_else(|| DfaError::UnknownState(state.to_string()))?;
        let a = self
            .symbol_index(symbol)
            .ok_or_else(|| DfaError::UnknownSymbol(symbol.to_string()))?;
        Ok(&self.states[self.step_index(s, a)])
    }

    pub fn is_accepting(&self, state: &str) -> Result<bool, DfaError> {
        let s = self
            .state_index(state)
            .ok_or_else(|| DfaError::UnknownState(state.to_string()))?;
        Ok(self.accepting[s])
    }

    /// Non-self transitions `(from, to)` with the symbols that fire them.
    pub fn progress_edges(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for from in 0..self.states.len() {
            for sym in 0..self.alphabet.len() {
                let to = self.step_index(from, sym);
                if to != from {
                    out.entry((from, to)).or_default().push(sym);
                }
            }
        }
        out
    }

    fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for sym in 0..self.alphabet.len() {
                let t = self.step_index(s, sym);
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: String,
    pub message: String,
}

impl Finding {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfaValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
    pub reachable_states: BTreeSet<String>,
    pub accepting_reachable: bool,
}

impl DfaValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error_text(&self) -> String {
        self.errors
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn validate_dfa(d: &Dfa) -> DfaValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let n_sym = d.alphabet.len();
    if d.table.len() != d.states.len() * n_sym {
        errors.push(Finding::new("not_total", "transition table does not cover states x alphabet"));
    }
    if d.table.iter().any(|&t| t >= d.states.len()) {
        errors.push(Finding::new("bad_target", "transition target out of range"));
    }
    if !errors.is_empty() {
        return DfaValidationReport {
            errors,
            warnings,
            reachable_states: BTreeSet::new(),
            accepting_reachable: false,
        };
    }

    let reachable = d.reachable();
    for (i, name) in d.states.iter().enumerate() {
        if !reachable.contains(&i) {
            warnings.push(Finding::new("unreachable", format!("unreachable({name})")));
        }
        if d.descriptions[i].trim().is_empty() {
            warnings.push(Finding::new(
                "empty_description",
                format!("state `{name}` has no description"),
            ));
        }
    }
    let accepting_reachable = d.accepting_states().any(|s| reachable.contains(&s));
    if d.accepting_states().next().is_none() {
        errors.push(Finding::new("no_accepting", "DFA declares no accepting state"));
    } else if !accepting_reachable {
        errors.push(Finding::new(
            "accepting_unreachable",
            "no accepting state is reachable from the initial state",
        ));
    }

    DfaValidationReport {
        errors,
        warnings,
        reachable_states: reachable.into_iter().map(|i| d.states[i].clone()).collect(),
        accepting_reachable,
    }
}
