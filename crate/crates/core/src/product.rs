//! Product of a gridworld with a task automaton, with progress-shaped reward.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dfa::{Dfa, NONE_SYMBOL};
use crate::env::{Action, EnvError, EnvState, GridEnv, StateKey};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProductConfig {
    pub terminal_reward: f64,
    pub transition_reward: f64,
    pub step_penalty: f64,
    pub episode_cap: u32,
}

impl Default for ProductConfig {
    fn default() -> Self {
        Self {
            terminal_reward: 1.0,
            transition_reward: 0.1,
            step_penalty: -0.001,
            episode_cap: 200,
        }
    }
}

impl ProductConfig {
    /// Largest one-step reward magnitude.
    pub fn max_abs_reward(&self) -> f64 {
        self.step_penalty.abs() + self.terminal_reward.abs().max(self.transition_reward.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub env: EnvState,
    pub auto: usize,
}

/// Markov key of a product state; used to index tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductKey {
    pub env: StateKey,
    pub auto: u16,
}

impl ProductState {
    pub fn key(&self) -> ProductKey {
        ProductKey {
            env: self.env.key(),
            auto: self.auto as u16,
        }
    }
}

impl fmt::Display for ProductKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.env, self.auto)
    }
}

impl FromStr for ProductKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (env, auto) = s.rsplit_once('#').ok_or_else(|| format!("bad product key `{s}`"))?;
        Ok(ProductKey {
            env: env.parse()?,
            auto: auto.parse().map_err(|_| format!("bad product key `{s}`"))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next: ProductState,
    pub reward: f64,
    /// Episode over: accepting state reached or step cap hit.
    pub done: bool,
    /// Accepting state reached; the only case where bootstrapping stops.
    pub terminal: bool,
    /// Symbol index that drove the automaton.
    pub symbol: usize,
}

impl StepOutcome {
    pub fn progressed(&self, prev: &ProductState) -> bool {
        self.next.auto != prev.auto
    }
}

/// A gridworld and automaton bound together with precomputed label lookups.
#[derive(Debug, Clone)]
pub struct ProductMdp<'a> {
    pub env: &'a GridEnv,
    pub dfa: &'a Dfa,
    pub cfg: ProductConfig,
    item_symbols: Vec<usize>,
    none_symbol: usize,
}

impl<'a> ProductMdp<'a> {
    /// Environment labels missing from the automaton alphabet act as `none`.
    pub fn new(env: &'a GridEnv, dfa: &'a Dfa, cfg: ProductConfig) -> Self {
        let none_symbol = dfa
            .symbol_index(NONE_SYMBOL)
            .expect("alphabet always carries the none symbol");
        let item_symbols = env
            .items
            .iter()
            .map(|it| dfa.symbol_index(&it.label).unwrap_or(none_symbol))
            .collect();
        Self {
            env,
            dfa,
            cfg,
            item_symbols,
            none_symbol,
        }
    }

    pub fn initial_state(&self) -> ProductState {
        ProductState {
            env: self.env.reset(),
            auto: self.dfa.initial(),
        }
    }

    pub fn step(&self, p: &ProductState, a: Action) -> StepOutcome {
        let t = self.env.step(&p.env, a);
        let symbol = t.event.map_or(self.none_symbol, |i| self.item_symbols[i]);
        let auto = self.dfa.step_index(p.auto, symbol);
        let terminal = self.dfa.is_accepting_index(auto);
        let mut reward = self.cfg.step_penalty;
        if terminal {
            reward += self.cfg.terminal_reward;
        } else if auto != p.auto {
            reward += self.cfg.transition_reward;
        }
        StepOutcome {
            next: ProductState { env: t.state, auto },
            reward,
            done: terminal || t.state.step_count >= self.cfg.episode_cap,
            terminal,
            symbol,
        }
    }

    /// Every (environment state, automaton state) pair.
    pub fn enumerate(&self, bound: usize) -> Result<Vec<ProductState>, EnvError> {
        let n = self.dfa.num_states();
        let env_bound = bound / n.max(1);
        let states = self.env.enumerate_states_bounded(env_bound).map_err(|e| match e {
            EnvError::StateBoundExceeded { size, .. } => EnvError::StateBoundExceeded {
                size: size * n as u128,
                bound,
            },
            other => other,
        })?;
        Ok(states
            .into_iter()
            .flat_map(|env| (0..n).map(move |auto| ProductState { env, auto }))
            .collect())
    }
}

pub fn initial_product_state(env: &GridEnv, dfa: &Dfa) -> ProductState {
    ProductState {
        env: env.reset(),
        auto: dfa.initial(),
    }
}

pub fn product_step(
    env: &GridEnv,
    dfa: &Dfa,
    cfg: &ProductConfig,
    p: &ProductState,
    a: Action,
) -> StepOutcome {
    ProductMdp::new(env, dfa, *cfg).step(p, a)
}
