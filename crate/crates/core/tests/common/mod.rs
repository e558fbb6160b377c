//! Helpers shared by the integration test targets.

use std::collections::BTreeMap;

use lantern_core::dfa::{DfaDocument, TransitionDoc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "collect", "key", "shield", "open", "chest", "dragon", "gather", "wood", "craft", "deliver",
    "mine", "ore", "smelt", "harvest", "plant", "seeds", "rescue", "victim", "map", "clue",
    "décoder", "寶藏", "goal",
];

/// Random well-formed DFA documents: 1 to 8 states, up to 6 symbols, partial
/// transition tables, optional descriptions.
#[allow(dead_code)]
pub fn dfa_corpus(count: usize, seed: u64) -> Vec<DfaDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_document(&mut rng)).collect()
}

fn random_document(rng: &mut ChaCha8Rng) -> DfaDocument {
    let n = rng.random_range(1..=8);
    let states: Vec<String> = (0..n).map(|i| format!("ω{i}")).collect();
    let mut alphabet: Vec<String> = (0..rng.random_range(0..=6)).map(|i| format!("e{i}")).collect();
    if rng.random_bool(0.5) {
        alphabet.push("none".into());
    }
    let mut transitions = Vec::new();
    for from in &states {
        for sym in &alphabet {
            if rng.random_bool(0.4) {
                transitions.push(TransitionDoc {
                    from: from.clone(),
                    symbol: sym.clone(),
                    to: states.choose(rng).unwrap().clone(),
                });
            }
        }
    }
    let accepting = states.iter().filter(|_| rng.random_bool(0.3)).cloned().collect();
    let mut descriptions = BTreeMap::new();
    for s in &states {
        if rng.random_bool(0.8) {
            let words: Vec<&str> = (0..rng.random_range(1..4)).map(|_| *WORDS.choose(rng).unwrap()).collect();
            descriptions.insert(s.clone(), words.join(" "));
        }
    }
    DfaDocument {
        initial: states.choose(rng).unwrap().clone(),
        states,
        alphabet,
        accepting,
        transitions,
        descriptions,
    }
}
