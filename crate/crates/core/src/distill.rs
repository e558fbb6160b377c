//! Knowledge packs: automaton-transition values, per-state strategic
//! summaries and a softmax teacher policy distilled from a trained teacher.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::{Dfa, DfaDocument, DfaError};
use crate::env::{Action, GridEnv, NUM_ACTIONS};
use crate::product::{ProductConfig, ProductKey, ProductMdp, ProductState};
use crate::qlearn::{select_action, QTable};

pub const PACK_FORMAT: &str = "lantern-pack";
pub const PACK_VERSION: u32 = 1;
pub const DEFAULT_REACHABLE_BOUND: usize = 2_000_000;
pub const DEFAULT_SAMPLE_STEPS: u64 = 100_000;
const SAMPLE_EPSILON: f64 = 0.1;

#[derive(Debug, Error)]
pub enum PackError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt pack: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error("unsupported pack format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("pack automaton: {0}")]
    Dfa(#[from] DfaError),
    #[error("pack field: {0}")]
    Field(String),
}

/// How the triggering sets were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Exhaustive over every product state reachable from the start.
    Enumerated,
    /// Distinct triggering pairs seen along teacher rollouts.
    Sampled { steps: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyRow {
    pub probs: [f64; NUM_ACTIONS],
    pub visits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgePack {
    pub source_id: String,
    pub dfa: Dfa,
    pub env: GridEnv,
    /// Mean teacher value over pairs triggering each non-self transition.
    pub q_ad: BTreeMap<(usize, usize), f64>,
    /// Per automaton state, indexed like `dfa.states()`.
    pub q_ad_state: Vec<f64>,
    pub teacher_policy: BTreeMap<ProductKey, PolicyRow>,
    pub temperature: f64,
    pub estimator: Estimator,
}

pub const UNIFORM: [f64; NUM_ACTIONS] = [1.0 / NUM_ACTIONS as f64; NUM_ACTIONS];

impl KnowledgePack {
    pub fn description(&self, state: usize) -> &str {
        self.dfa.description(state)
    }

    pub fn policy(&self, key: &ProductKey) -> [f64; NUM_ACTIONS] {
        self.teacher_policy.get(key).map_or(UNIFORM, |r| r.probs)
    }

    pub fn save(&self, path: &Path) -> Result<(), PackError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PackError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let name = |i: usize| self.dfa.state_name(i).to_string();
        let doc = PackDoc {
            format: PACK_FORMAT.into(),
            version: PACK_VERSION,
            source_id: self.source_id.clone(),
            estimator: self.estimator,
            temperature: self.temperature,
            dfa: self.dfa.to_document(),
            env: self.env.clone(),
            q_ad: self
                .q_ad
                .iter()
                .map(|(&(f, t), &value)| QAdDoc {
                    from: name(f),
                    to: name(t),
                    value,
                })
                .collect(),
            q_ad_state: self.q_ad_state.clone(),
            policy: self
                .teacher_policy
                .iter()
                .map(|(k, r)| {
                    (
                        k.to_string(),
                        PolicyDoc {
                            p: r.probs,
                            n: r.visits,
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("pack serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PackError> {
        let doc: PackDoc = serde_json::from_str(text)?;
        if doc.format != PACK_FORMAT || doc.version != PACK_VERSION {
            return Err(PackError::Version {
                format: doc.format,
                version: doc.version,
            });
        }
        let dfa = Dfa::from_document(doc.dfa)?;
        let idx = |name: &str| {
            dfa.state_index(name)
                .ok_or_else(|| PackError::Field(format!("unknown state `{name}` in q_ad")))
        };
        let mut q_ad = BTreeMap::new();
        for e in doc.q_ad {
            q_ad.insert((idx(&e.from)?, idx(&e.to)?), e.value);
        }
        if doc.q_ad_state.len() != dfa.num_states() {
            return Err(PackError::Field("q_ad_state length mismatch".into()));
        }
        let mut teacher_policy = BTreeMap::new();
        for (k, r) in doc.policy {
            let key: ProductKey = k.parse().map_err(PackError::Field)?;
            teacher_policy.insert(
                key,
                PolicyRow {
                    probs: r.p,
                    visits: r.n,
                },
            );
        }
        Ok(Self {
            source_id: doc.source_id,
            dfa,
            env: doc.env,
            q_ad,
            q_ad_state: doc.q_ad_state,
            teacher_policy,
            temperature: doc.temperature,
            estimator: doc.estimator,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct QAdDoc {
    from: String,
    to: String,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct PolicyDoc {
    p: [f64; NUM_ACTIONS],
    n: u32,
}

#[derive(Serialize, Deserialize)]
struct PackDoc {
    format: String,
    version: u32,
    source_id: String,
    estimator: Estimator,
    temperature: f64,
    dfa: DfaDocument,
    env: GridEnv,
    q_ad: Vec<QAdDoc>,
    q_ad_state: Vec<f64>,
    policy: BTreeMap<String, PolicyDoc>,
}

/// Numerically stable softmax of `values / temperature`.
pub fn softmax(values: &[f64; NUM_ACTIONS], temperature: f64) -> [f64; NUM_ACTIONS] {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_ACTIONS];
    let mut sum = 0.0;
    for (o, v) in out.iter_mut().zip(values) {
        *o = ((v - max) / temperature).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// Product states reachable from the start, treating accepting states as
/// absorbing. `None` when more than `bound` states are reachable.
pub fn reachable_states(mdp: &ProductMdp<'_>, bound: usize) -> Option<Vec<ProductState>> {
    let start = canonical(mdp.initial_state());
    let mut seen = HashSet::from([start.key()]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        if mdp.dfa.is_accepting_index(p.auto) {
            continue;
        }
        for a in Action::ALL {
            let next = canonical(mdp.step(&p, a).next);
            if seen.insert(next.key()) {
                if order.len() >= bound {
                    return None;
                }
                order.push(next);
                queue.push_back(next);
            }
        }
    }
    Some(order)
}

fn canonical(mut p: ProductState) -> ProductState {
    p.env.step_count = 0;
    p
}

fn mean_per_transition(sums: HashMap<(usize, usize), (f64, usize)>) -> BTreeMap<(usize, usize), f64> {
    sums.into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect()
}

/// Unweighted mean teacher value over the state-action pairs that trigger each
/// non-self automaton transition.
pub fn compute_q_ad(
    teacher_q: &QTable,
    mdp: &ProductMdp<'_>,
    bound: usize,
    sample_steps: u64,
    seed: u64,
) -> (BTreeMap<(usize, usize), f64>, Estimator) {
    match reachable_states(mdp, bound) {
        Some(states) => (q_ad_over(teacher_q, mdp, &states), Estimator::Enumerated),
        None => (
            q_ad_sampled(teacher_q, mdp, sample_steps, seed),
            Estimator::Sampled {
                steps: sample_steps,
            },
        ),
    }
}

/// Triggering sets taken over an explicit list of product states.
pub fn q_ad_over(
    teacher_q: &QTable,
    mdp: &ProductMdp<'_>,
    states: &[ProductState],
) -> BTreeMap<(usize, usize), f64> {
    let mut sums: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
    for p in states {
        for a in Action::ALL {
            let next = mdp.step(p, a).next.auto;
            if next != p.auto {
                let e = sums.entry((p.auto, next)).or_default();
                e.0 += teacher_q.get(&p.key(), a.index());
                e.1 += 1;
            }
        }
    }
    mean_per_transition(sums)
}

/// Trajectory estimator: distinct triggering pairs met along ε-greedy teacher rollouts.
pub fn q_ad_sampled(
    teacher_q: &QTable,
    mdp: &ProductMdp<'_>,
    steps: u64,
    seed: u64,
) -> BTreeMap<(usize, usize), f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<(ProductKey, usize)> = HashSet::new();
    let mut sums: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
    let mut p = mdp.initial_state();
    for _ in 0..steps {
        let key = p.key();
        let a = select_action(teacher_q, &key, SAMPLE_EPSILON, &mut rng);
        let out = mdp.step(&p, a);
        if out.next.auto != p.auto && seen.insert((key, a.index())) {
            let e = sums.entry((p.auto, out.next.auto)).or_default();
            e.0 += teacher_q.get(&key, a.index());
            e.1 += 1;
        }
        p = if out.done { mdp.initial_state() } else { out.next };
    }
    mean_per_transition(sums)
}

/// Mean of a state's outgoing transition values; 0.0 for states with none.
pub fn summarize_state(q_ad: &BTreeMap<(usize, usize), f64>, num_states: usize) -> Vec<f64> {
    let mut sums = vec![(0.0, 0usize); num_states];
    for (&(from, _), &v) in q_ad {
        sums[from].0 += v;
        sums[from].1 += 1;
    }
    sums.into_iter()
        .map(|(s, n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect()
}

/// Softmax policy over every visited teacher row.
pub fn extract_teacher_policy(teacher_q: &QTable, temperature: f64) -> BTreeMap<ProductKey, PolicyRow> {
    assert!(temperature > 0.0, "temperature must be positive");
    teacher_q
        .iter()
        .filter_map(|(k, row)| {
            let visits: u32 = row.visits.iter().sum();
            (visits > 0).then(|| {
                (
                    *k,
                    PolicyRow {
                        probs: softmax(&row.values, temperature),
                        visits,
                    },
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistillConfig {
    pub temperature: f64,
    pub reachable_bound: usize,
    pub sample_steps: u64,
    pub seed: u64,
}

impl Default for DistillConfig {
    fn default() -> Self {
        Self {
            temperature: 1.0,
            reachable_bound: DEFAULT_REACHABLE_BOUND,
            sample_steps: DEFAULT_SAMPLE_STEPS,
            seed: 0,
        }
    }
}

pub fn distill(
    source_id: &str,
    teacher_q: &QTable,
    env: &GridEnv,
    dfa: &Dfa,
    product: ProductConfig,
    cfg: &DistillConfig,
) -> KnowledgePack {
    let mdp = ProductMdp::new(env, dfa, product);
    let (q_ad, estimator) =
        compute_q_ad(teacher_q, &mdp, cfg.reachable_bound, cfg.sample_steps, cfg.seed);
    let q_ad_state = summarize_state(&q_ad, dfa.num_states());
    KnowledgePack {
        source_id: source_id.to_string(),
        dfa: dfa.clone(),
        env: env.clone(),
        q_ad,
        q_ad_state,
        teacher_policy: extract_teacher_policy(teacher_q, cfg.temperature),
        temperature: cfg.temperature,
        estimator,
    }
}
