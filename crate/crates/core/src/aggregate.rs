//! Neighborhood-weighted strategic values and teacher policies, including the
//! mapping from target states to source-state contexts.

use std::collections::HashMap;

use serde::Serialize;

use crate::distill::{KnowledgePack, UNIFORM};
use crate::env::{Cell, EnvState, GridEnv, StateKey, MAX_RESOURCES, NUM_ACTIONS};
use crate::semantic::Neighborhood;

/// Source-side context: agent cell plus the inventory features shared with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextKey {
    pub cell: Cell,
    pub inventory: [u8; MAX_RESOURCES],
}

/// Coordinate scaling and inventory matching for one (target, source) pair.
///
/// Inventory features match by slot position: every environment orders its
/// resources by task stage, so slot i plays the same role across tasks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextMap {
    pub target_dims: (u16, u16),
    pub source_dims: (u16, u16),
    /// Per target resource: matching source resource and its cap.
    pub inventory: Vec<Option<(usize, u8)>>,
    /// Target features with no source counterpart.
    pub dropped: Vec<String>,
    /// Source resources that the target can speak about.
    kept_source: [bool; MAX_RESOURCES],
}

impl ContextMap {
    pub fn new(target: &GridEnv, source: &GridEnv) -> Self {
        let mut kept_source = [false; MAX_RESOURCES];
        let mut dropped = Vec::new();
        let inventory = target
            .resources
            .iter()
            .enumerate()
            .map(|(i, r)| match source.resources.get(i) {
                Some(src) => {
                    kept_source[i] = true;
                    Some((i, src.cap))
                }
                None => {
                    dropped.push(r.name.clone());
                    None
                }
            })
            .collect();
        dropped.push("consumed".into());
        Self {
            target_dims: (target.width, target.height),
            source_dims: (source.width, source.height),
            inventory,
            dropped,
            kept_source,
        }
    }

    fn scale(v: u16, from: u16, to: u16) -> u16 {
        ((v as u32 * to as u32) / from as u32).min(to as u32 - 1) as u16
    }

    /// Maps a target state into source coordinates and inventory.
    pub fn map_context(&self, s: &EnvState) -> ContextKey {
        let cell = Cell::new(
            Self::scale(s.agent.x, self.target_dims.0, self.source_dims.0),
            Self::scale(s.agent.y, self.target_dims.1, self.source_dims.1),
        );
        let mut inventory = [0u8; MAX_RESOURCES];
        for (t, m) in self.inventory.iter().enumerate() {
            if let Some((j, cap)) = m {
                inventory[*j] = s.inventory[t].min(*cap);
            }
        }
        ContextKey { cell, inventory }
    }

    /// Projects a source state onto the features this map keeps.
    pub fn project_source(&self, k: &StateKey) -> ContextKey {
        let mut inventory = [0u8; MAX_RESOURCES];
        for j in 0..MAX_RESOURCES {
            if self.kept_source[j] {
                inventory[j] = k.inventory[j];
            }
        }
        ContextKey {
            cell: k.agent,
            inventory,
        }
    }
}

/// A pack's teacher policy marginalized onto mapped contexts, visit-weighted.
#[derive(Debug, Clone)]
pub struct PackView {
    pub context: ContextMap,
    rows: HashMap<(ContextKey, u16), [f64; NUM_ACTIONS]>,
}

impl PackView {
    pub fn new(target: &GridEnv, pack: &KnowledgePack) -> Self {
        let context = ContextMap::new(target, &pack.env);
        let mut acc: HashMap<(ContextKey, u16), ([f64; NUM_ACTIONS], f64)> = HashMap::new();
        for (k, row) in &pack.teacher_policy {
            let w = row.visits.max(1) as f64;
            let e = acc
                .entry((context.project_source(&k.env), k.auto))
                .or_insert(([0.0; NUM_ACTIONS], 0.0));
            for (a, p) in row.probs.iter().enumerate() {
                e.0[a] += w * p;
            }
            e.1 += w;
        }
        let rows = acc
            .into_iter()
            .map(|(k, (sum, w))| (k, sum.map(|x| x / w)))
            .collect();
        Self { context, rows }
    }

    /// Teacher distribution at the mapped context of `s` in source state `auto`.
    pub fn policy(&self, s: &EnvState, auto: usize) -> [f64; NUM_ACTIONS] {
        self.rows
            .get(&(self.context.map_context(s), auto as u16))
            .copied()
            .unwrap_or(UNIFORM)
    }
}

/// Σ wᵢ · summary(sourceᵢ, stateᵢ). Missing summaries contribute zero without renormalizing.
pub fn aggregate_strategic(n: &Neighborhood, packs: &[&KnowledgePack]) -> f64 {
    n.entries
        .iter()
        .map(|e| {
            let summary = packs
                .get(e.source)
                .and_then(|p| p.q_ad_state.get(e.state))
                .copied()
                .unwrap_or(0.0);
            e.weight * summary
        })
        .sum()
}

/// Σ wᵢ · πᵢ(· | mapped s, stateᵢ), renormalized. Empty neighborhoods give uniform.
pub fn aggregate_tactical(n: &Neighborhood, views: &[PackView], s: &EnvState) -> [f64; NUM_ACTIONS] {
    if n.entries.is_empty() {
        return UNIFORM;
    }
    let mut out = [0.0; NUM_ACTIONS];
    for e in &n.entries {
        let row = views.get(e.source).map_or(UNIFORM, |v| v.policy(s, e.state));
        for (o, p) in out.iter_mut().zip(row) {
            *o += e.weight * p;
        }
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        for o in &mut out {
            *o /= total;
        }
        out
    } else {
        UNIFORM
    }
}
