//! Sparse tabular Q-learning over product states and an exact value-iteration oracle.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Action, EnvError, NUM_ACTIONS};
use crate::metrics::{EpisodeRecord, RunMetrics};
use crate::product::{ProductKey, ProductMdp};

pub const QTABLE_FORMAT: &str = "lantern-qtable";
pub const QTABLE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum QTableError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported q-table format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("bad row key: {0}")]
    Key(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon0: f64,
    pub epsilon_decay: f64,
    pub epsilon_min: f64,
    pub episodes: u32,
    pub max_steps: u32,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            gamma: 0.95,
            epsilon0: 1.0,
            epsilon_decay: 0.9995,
            epsilon_min: 0.05,
            episodes: 600,
            max_steps: 200,
            seed: 0,
        }
    }
}

impl LearnerConfig {
    /// Exploration rate for a given episode; decays once per episode.
    pub fn epsilon_at(&self, episode: u32) -> f64 {
        (self.epsilon0 * self.epsilon_decay.powi(episode as i32)).max(self.epsilon_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QRow {
    pub values: [f64; NUM_ACTIONS],
    pub visits: [u32; NUM_ACTIONS],
}

/// Sparse Q-table; unseen entries read as exactly 0.0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QTable {
    rows: HashMap<ProductKey, QRow>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, key: &ProductKey, a: usize) -> f64 {
        self.rows.get(key).map_or(0.0, |r| r.values[a])
    }

    pub fn values(&self, key: &ProductKey) -> [f64; NUM_ACTIONS] {
        self.rows.get(key).map_or([0.0; NUM_ACTIONS], |r| r.values)
    }

    pub fn visits(&self, key: &ProductKey, a: usize) -> u32 {
        self.rows.get(key).map_or(0, |r| r.visits[a])
    }

    pub fn row(&self, key: &ProductKey) -> Option<&QRow> {
        self.rows.get(key)
    }

    pub fn set(&mut self, key: ProductKey, a: usize, v: f64) {
        self.rows.entry(key).or_default().values[a] = v;
    }

    pub fn max_value(&self, key: &ProductKey) -> f64 {
        self.values(key).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action; ties go to the lowest index.
    pub fn argmax(&self, key: &ProductKey) -> usize {
        argmax(&self.values(key))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProductKey, &QRow)> {
        self.rows.iter()
    }

    /// Smallest and largest stored value, if any entry has been visited.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        self.rows
            .values()
            .flat_map(|r| r.values.iter().zip(r.visits).filter(|(_, n)| *n > 0).map(|(v, _)| *v))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    pub fn to_json(&self, config: &LearnerConfig) -> String {
        let rows: BTreeMap<String, QRowDoc> = self
            .rows
            .iter()
            .map(|(k, r)| {
                (
                    k.to_string(),
                    QRowDoc {
                        q: r.values,
                        n: r.visits,
                    },
                )
            })
            .collect();
        let doc = QTableDoc {
            format: QTABLE_FORMAT.into(),
            version: QTABLE_VERSION,
            config: *config,
            rows,
        };
        serde_json::to_string(&doc).expect("q-table serializes")
    }

    pub fn from_json(text: &str) -> Result<(Self, LearnerConfig), QTableError> {
        let doc: QTableDoc = serde_json::from_str(text)?;
        if doc.format != QTABLE_FORMAT || doc.version != QTABLE_VERSION {
            return Err(QTableError::Version {
                format: doc.format,
                version: doc.version,
            });
        }
        let mut rows = HashMap::with_capacity(doc.rows.len());
        for (k, r) in doc.rows {
            rows.insert(
                k.parse().map_err(QTableError::Key)?,
                QRow {
                    values: r.q,
                    visits: r.n,
                },
            );
        }
        Ok((Self { rows }, doc.config))
    }
}

#[derive(Serialize, Deserialize)]
struct QRowDoc {
    q: [f64; NUM_ACTIONS],
    n: [u32; NUM_ACTIONS],
}

#[derive(Serialize, Deserialize)]
struct QTableDoc {
    format: String,
    version: u32,
    config: LearnerConfig,
    rows: BTreeMap<String, QRowDoc>,
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// r + γ·max Q(p′,·)·[¬terminal] − Q(p,a).
pub fn td_error(
    q: &QTable,
    gamma: f64,
    p: &ProductKey,
    a: usize,
    r: f64,
    next: &ProductKey,
    terminal: bool,
) -> f64 {
    let bootstrap = if terminal { 0.0 } else { gamma * q.max_value(next) };
    r + bootstrap - q.get(p, a)
}

/// Adds `increment` to Q(p,a) and counts the visit.
pub fn apply_increment(q: &mut QTable, p: ProductKey, a: usize, increment: f64) {
    let row = q.rows.entry(p).or_default();
    row.values[a] += increment;
    row.visits[a] += 1;
}

pub fn plain_update(q: &mut QTable, alpha: f64, p: ProductKey, a: usize, delta: f64) {
    apply_increment(q, p, a, alpha * delta);
}

/// ε-greedy. Always draws the exploration coin, draws an action only when exploring.
pub fn select_action<R: Rng>(q: &QTable, p: &ProductKey, epsilon: f64, rng: &mut R) -> Action {
    if rng.random::<f64>() < epsilon {
        Action::from_index(rng.random_range(0..NUM_ACTIONS))
    } else {
        Action::from_index(q.argmax(p))
    }
}

/// Analytic bound on |Q| for the product reward scheme.
pub fn q_bound(mdp: &ProductMdp<'_>, gamma: f64) -> f64 {
    mdp.cfg.max_abs_reward() / (1.0 - gamma)
}

/// ε-greedy Q-learning on the product MDP.
pub fn train_teacher(mdp: &ProductMdp<'_>, cfg: &LearnerConfig) -> (QTable, RunMetrics) {
    let mut q = QTable::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut metrics = RunMetrics::new("teacher", cfg.seed);
    let bound = q_bound(mdp, cfg.gamma);
    for episode in 0..cfg.episodes {
        let epsilon = cfg.epsilon_at(episode);
        let mut p = mdp.initial_state();
        let mut total = 0.0;
        let mut steps = 0;
        let mut success = false;
        while steps < cfg.max_steps {
            let key = p.key();
            let a = select_action(&q, &key, epsilon, &mut rng);
            let out = mdp.step(&p, a);
            let next = out.next.key();
            let delta = td_error(&q, cfg.gamma, &key, a.index(), out.reward, &next, out.terminal);
            plain_update(&mut q, cfg.alpha, key, a.index(), delta);
            if q.get(&key, a.index()).abs() > bound {
                metrics.bound_violations += 1;
            }
            total += out.reward;
            steps += 1;
            p = out.next;
            if out.done {
                success = out.terminal;
                break;
            }
        }
        metrics.episodes.push(EpisodeRecord {
            episode,
            reward: total,
            steps,
            success,
            mean_tau: 1.0,
            epsilon,
        });
    }
    (q, metrics)
}

/// Greedy rollout; returns the number of steps to acceptance, if reached.
pub fn greedy_rollout(mdp: &ProductMdp<'_>, q: &QTable, max_steps: u32) -> Option<u32> {
    let mut p = mdp.initial_state();
    for t in 1..=max_steps {
        let out = mdp.step(&p, Action::from_index(q.argmax(&p.key())));
        if out.terminal {
            return Some(t);
        }
        p = out.next;
    }
    None
}

#[derive(Debug, Clone)]
pub struct ValueIteration {
    pub q: HashMap<ProductKey, [f64; NUM_ACTIONS]>,
    /// Max Bellman residual after each sweep.
    pub residuals: Vec<f64>,
}

impl ValueIteration {
    pub fn values(&self, key: &ProductKey) -> Option<&[f64; NUM_ACTIONS]> {
        self.q.get(key)
    }

    /// Actions within `tol` of the optimum.
    pub fn optimal_actions(&self, key: &ProductKey, tol: f64) -> Vec<usize> {
        let Some(row) = self.q.get(key) else {
            return Vec::new();
        };
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..NUM_ACTIONS).filter(|&a| row[a] >= best - tol).collect()
    }
}

/// Jacobi value iteration on the enumerated product (no step cap) until the
/// max residual falls below 1e-10.
pub fn value_iteration(
    mdp: &ProductMdp<'_>,
    gamma: f64,
    bound: usize,
) -> Result<ValueIteration, EnvError> {
    let states = mdp.enumerate(bound)?;
    let index: HashMap<ProductKey, usize> =
        states.iter().enumerate().map(|(i, p)| (p.key(), i)).collect();
    let n = states.len();
    let mut succ = vec![(0usize, 0.0f64, false); n * NUM_ACTIONS];
    for (i, p) in states.iter().enumerate() {
        for a in Action::ALL {
            let out = mdp.step(p, a);
            let j = index[&out.next.key()];
            succ[i * NUM_ACTIONS + a.index()] = (j, out.reward, out.terminal);
        }
    }
    let mut q = vec![0.0f64; n * NUM_ACTIONS];
    let mut v = vec![0.0f64; n];
    let mut residuals = Vec::new();
    loop {
        let mut residual: f64 = 0.0;
        let mut next_q = vec![0.0f64; n * NUM_ACTIONS];
        for (k, &(j, r, terminal)) in succ.iter().enumerate() {
            let target = r + if terminal { 0.0 } else { gamma * v[j] };
            residual = residual.max((target - q[k]).abs());
            next_q[k] = target;
        }
        q = next_q;
        for i in 0..n {
            v[i] = q[i * NUM_ACTIONS..(i + 1) * NUM_ACTIONS]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
        }
        residuals.push(residual);
        if residual < 1e-10 {
            break;
        }
    }
    let q = states
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = [0.0; NUM_ACTIONS];
            row.copy_from_slice(&q[i * NUM_ACTIONS..(i + 1) * NUM_ACTIONS]);
            (p.key(), row)
        })
        .collect();
    Ok(ValueIteration { q, residuals })
}
