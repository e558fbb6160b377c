//! Experience volatility and the composite trust gate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::product::ProductKey;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown automaton state {0}")]
    UnknownState(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateParams {
    pub eta: f64,
    pub k_exp: f64,
    pub k_sem: f64,
    pub theta_exp: f64,
    pub theta_sem: f64,
    pub v_exp_init: f64,
    /// Flip the semantic factor to σ(+k(v − θ)).
    pub semantic_inversion: bool,
}

impl Default for GateParams {
    fn default() -> Self {
        Self {
            eta: 0.01,
            k_exp: 5.0,
            k_sem: 5.0,
            theta_exp: 0.5,
            theta_sem: 0.3,
            v_exp_init: 1.0,
            semantic_inversion: false,
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// σ(−k(v − θ)).
pub fn trust_from_volatility(v: f64, k: f64, theta: f64) -> f64 {
    sigmoid(-k * (v - theta))
}

#[derive(Debug, Clone)]
pub struct TrustGateState {
    pub params: GateParams,
    v_exp: HashMap<(ProductKey, u8), f64>,
    v_sem: Vec<f64>,
    degenerate: Vec<bool>,
    /// When false the gate uses the experience factor alone.
    pub use_semantic: bool,
}

impl TrustGateState {
    pub fn new(params: GateParams, v_sem: Vec<f64>, degenerate: Vec<bool>) -> Self {
        assert_eq!(v_sem.len(), degenerate.len());
        Self {
            params,
            v_exp: HashMap::new(),
            v_sem,
            degenerate,
            use_semantic: true,
        }
    }

    pub fn experience_only(mut self) -> Self {
        self.use_semantic = false;
        self
    }

    pub fn v_exp(&self, key: &ProductKey, a: usize) -> f64 {
        self.v_exp
            .get(&(*key, a as u8))
            .copied()
            .unwrap_or(self.params.v_exp_init)
    }

    /// v ← (1 − η)·v + η·|δ|.
    pub fn update_exp_volatility(&mut self, key: ProductKey, a: usize, delta: f64) -> f64 {
        let eta = self.params.eta;
        let init = self.params.v_exp_init;
        let v = self.v_exp.entry((key, a as u8)).or_insert(init);
        *v = (1.0 - eta) * *v + eta * delta.abs();
        *v
    }

    pub fn trust_exp(&self, key: &ProductKey, a: usize) -> f64 {
        trust_from_volatility(self.v_exp(key, a), self.params.k_exp, self.params.theta_exp)
    }

    pub fn trust_sem(&self, auto: usize) -> Result<f64, GateError> {
        let v = *self.v_sem.get(auto).ok_or(GateError::UnknownState(auto))?;
        let t = trust_from_volatility(v, self.params.k_sem, self.params.theta_sem);
        Ok(if self.params.semantic_inversion { 1.0 - t } else { t })
    }

    pub fn is_degenerate(&self, auto: usize) -> bool {
        self.degenerate.get(auto).copied().unwrap_or(true)
    }

    /// τ_exp · τ_sem, or exactly 1 for a degenerate neighborhood.
    pub fn composite_trust(&self, key: &ProductKey, auto: usize, a: usize) -> Result<f64, GateError> {
        if auto >= self.v_sem.len() {
            return Err(GateError::UnknownState(auto));
        }
        if self.is_degenerate(auto) {
            return Ok(1.0);
        }
        let exp = self.trust_exp(key, a);
        if !self.use_semantic {
            return Ok(exp);
        }
        Ok(exp * self.trust_sem(auto)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Cell, StateKey};

    fn key() -> ProductKey {
        ProductKey {
            env: StateKey {
                agent: Cell::new(0, 0),
                inventory: [0; 4],
                consumed: 0,
                depleted: 0,
            },
            auto: 0,
        }
    }

    fn gate(v_sem: Vec<f64>) -> TrustGateState {
        let n = v_sem.len();
        TrustGateState::new(GateParams::default(), v_sem, vec![false; n])
    }

    fn sigma(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn volatility_updates() {
        let mut g = gate(vec![0.0]);
        assert!((g.update_exp_volatility(key(), 0, 0.0) - 0.99).abs() < 1e-15);
        let mut g0 = TrustGateState::new(
            GateParams {
                v_exp_init: 0.0,
                ..GateParams::default()
            },
            vec![0.0],
            vec![false],
        );
        assert!((g0.update_exp_volatility(key(), 0, 2.0) - 0.02).abs() < 1e-15);
        for _ in 1..100 {
            g.update_exp_volatility(key(), 0, 0.0);
        }
        assert!((g.v_exp(&key(), 0) - 0.99f64.powi(100)).abs() < 1e-12);
        assert!((g.v_exp(&key(), 0) - 0.366).abs() < 1e-3);
    }

    #[test]
    fn trust_values() {
        assert_eq!(trust_from_volatility(0.5, 5.0, 0.5), 0.5);
        assert!((trust_from_volatility(1.0, 5.0, 0.5) - sigma(-2.5)).abs() < 1e-15);
        assert!((sigma(-2.5) - 0.0759).abs() < 1e-4);
        assert!((trust_from_volatility(0.0, 5.0, 0.5) - 0.9241).abs() < 1e-4);
        let g = gate(vec![0.3, 0.0, 1.0]);
        assert_eq!(g.trust_sem(0).unwrap(), 0.5);
        assert!((g.trust_sem(1).unwrap() - sigma(1.5)).abs() < 1e-15);
        assert!((g.trust_sem(1).unwrap() - 0.8176).abs() < 1e-4);
        assert!((g.trust_sem(2).unwrap() - 0.0293).abs() < 1e-4);
        assert_eq!(g.trust_sem(3), Err(GateError::UnknownState(3)));
    }

    #[test]
    fn composite_rules() {
        let mut g = TrustGateState::new(
            GateParams {
                v_exp_init: 0.5,
                ..GateParams::default()
            },
            vec![0.3, 0.0, 0.0],
            vec![false, false, true],
        );
        assert_eq!(g.composite_trust(&key(), 0, 0).unwrap(), 0.25);
        let t = g.composite_trust(&key(), 1, 0).unwrap();
        assert!((t - 0.5 * sigma(1.5)).abs() < 1e-15);
        assert!((t - 0.4088).abs() < 1e-4);
        assert_eq!(g.composite_trust(&key(), 2, 0).unwrap(), 1.0);
        g.use_semantic = false;
        assert_eq!(g.composite_trust(&key(), 1, 0).unwrap(), 0.5);
    }

    #[test]
    fn inversion_switch() {
        let mut g = gate(vec![0.0]);
        let t = g.trust_sem(0).unwrap();
        g.params.semantic_inversion = true;
        assert!((g.trust_sem(0).unwrap() - (1.0 - t)).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert!((sigmoid(0.3) + sigmoid(-0.3) - 1.0).abs() < 1e-15);
    }
}
