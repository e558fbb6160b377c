//! Student training on the target product MDP under each transfer method.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::{aggregate_strategic, aggregate_tactical, PackView};
use crate::distill::{softmax, KnowledgePack};
use crate::env::{Action, EnvState, NUM_ACTIONS};
use crate::gating::{GateError, GateParams, TrustGateState};
use crate::metrics::{EpisodeRecord, RunMetrics};
use crate::product::{ProductKey, ProductMdp, ProductState, StepOutcome};
use crate::qlearn::{apply_increment, q_bound, select_action, td_error, LearnerConfig, QTable};
use crate::semantic::{
    best_aligned_source, embed_all, CachedEmbedder, EmbedError, SemanticIndex, SourceEmbeddings,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NoTransfer,
    Ad,
    Cadent,
    LarmLite,
    Lantern,
    NoSemanticGating,
    SingleSource,
    StrategicOnly,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::NoTransfer,
        Method::Ad,
        Method::Cadent,
        Method::LarmLite,
        Method::Lantern,
        Method::NoSemanticGating,
        Method::SingleSource,
        Method::StrategicOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::NoTransfer => "no_transfer",
            Method::Ad => "ad",
            Method::Cadent => "cadent",
            Method::LarmLite => "larm_lite",
            Method::Lantern => "lantern",
            Method::NoSemanticGating => "no_semantic_gating",
            Method::SingleSource => "single_source",
            Method::StrategicOnly => "strategic_only",
        }
    }

    /// Uses only the best-aligned pack.
    pub fn single_pack(self) -> bool {
        matches!(
            self,
            Method::Ad | Method::Cadent | Method::LarmLite | Method::SingleSource
        )
    }
}

impl FromStr for Method {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| TrainError::UnknownMethod(s.to_string()))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    pub lambda_ad: f64,
    pub lambda_pd: f64,
    pub m: usize,
    /// Per-episode decay of the AD shaping bonus.
    pub rho: f64,
    pub student_temperature: f64,
    pub learner: LearnerConfig,
    pub gate: GateParams,
}

impl MethodConfig {
    pub fn new(method: Method, learner: LearnerConfig) -> Self {
        Self {
            method,
            lambda_ad: 0.15,
            lambda_pd: 0.7,
            m: 3,
            rho: 0.99,
            student_temperature: 1.0,
            learner,
            gate: GateParams::default(),
        }
    }
}

/// One observed product transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRecord {
    pub state: EnvState,
    pub key: ProductKey,
    pub auto: usize,
    pub action: usize,
    pub reward: f64,
    pub next_key: ProductKey,
    pub next_auto: usize,
    pub terminal: bool,
}

impl TransitionRecord {
    pub fn new(p: &ProductState, a: Action, out: &StepOutcome) -> Self {
        Self {
            state: p.env,
            key: p.key(),
            auto: p.auto,
            action: a.index(),
            reward: out.reward,
            next_key: out.next.key(),
            next_auto: out.next.auto,
            terminal: out.terminal,
        }
    }

    pub fn progressed(&self) -> bool {
        self.auto != self.next_auto
    }
}

/// Neighborhoods, aggregated summaries and policy views for the selected packs.
#[derive(Debug, Clone)]
pub struct TransferContext<'a> {
    pub packs: Vec<&'a KnowledgePack>,
    pub index: SemanticIndex,
    pub views: Vec<PackView>,
    /// Aggregated strategic value per target automaton state.
    pub strategic: Vec<f64>,
}

impl<'a> TransferContext<'a> {
    pub fn new(mdp: &ProductMdp<'_>, packs: Vec<&'a KnowledgePack>, index: SemanticIndex) -> Self {
        let views = packs.iter().map(|p| PackView::new(mdp.env, p)).collect();
        let strategic = index
            .neighborhoods
            .iter()
            .map(|n| aggregate_strategic(n, &packs))
            .collect();
        Self {
            packs,
            index,
            views,
            strategic,
        }
    }

    pub fn empty(mdp: &ProductMdp<'_>) -> Self {
        Self::new(mdp, Vec::new(), SemanticIndex::empty(mdp.dfa.num_states()))
    }

    /// Every entry gets weight 1 and the neighborhood counts as usable;
    /// for baselines without a semantic filter.
    pub fn force_unit_weights(mut self) -> Self {
        for n in &mut self.index.neighborhoods {
            for e in &mut n.entries {
                e.weight = 1.0;
            }
            n.degenerate = n.entries.is_empty();
        }
        let packs = &self.packs;
        self.strategic = self
            .index
            .neighborhoods
            .iter()
            .map(|n| aggregate_strategic(n, packs))
            .collect();
        self
    }

    pub fn teacher_policy(&self, s: &EnvState, auto: usize) -> [f64; NUM_ACTIONS] {
        aggregate_tactical(&self.index.neighborhoods[auto], &self.views, s)
    }

    pub fn usable(&self, auto: usize) -> bool {
        !self.index.neighborhoods[auto].degenerate
    }
}

/// λ_AD·r_AD + λ_PD·(π_teacher(a) − π_student(a)).
pub fn guidance(
    ctx: &TransferContext<'_>,
    q: &QTable,
    rec: &TransitionRecord,
    lambda_ad: f64,
    lambda_pd: f64,
    student_temperature: f64,
) -> f64 {
    if ctx.index.neighborhoods[rec.auto].entries.is_empty() {
        return 0.0;
    }
    let r_ad = if rec.progressed() { ctx.strategic[rec.auto] } else { 0.0 };
    let mut g = lambda_ad * r_ad;
    if lambda_pd != 0.0 {
        let teacher = ctx.teacher_policy(&rec.state, rec.auto)[rec.action];
        let student = softmax(&q.values(&rec.key), student_temperature)[rec.action];
        g += lambda_pd * (teacher - student);
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedUpdate {
    pub delta: f64,
    pub tau: f64,
    pub increment: f64,
}

/// Gated update: volatility is refreshed with the current TD error before the
/// gate is read. `forced_tau` overrides the gate.
pub fn lantern_update(
    q: &mut QTable,
    gate: &mut TrustGateState,
    rec: &TransitionRecord,
    g: f64,
    alpha: f64,
    gamma: f64,
    forced_tau: Option<f64>,
) -> Result<AppliedUpdate, GateError> {
    let delta = td_error(q, gamma, &rec.key, rec.action, rec.reward, &rec.next_key, rec.terminal);
    gate.update_exp_volatility(rec.key, rec.action, delta);
    let tau = match forced_tau {
        Some(t) => t,
        None => gate.composite_trust(&rec.key, rec.auto, rec.action)?,
    };
    let increment = alpha * (tau * delta + (1.0 - tau) * g);
    apply_increment(q, rec.key, rec.action, increment);
    Ok(AppliedUpdate {
        delta,
        tau,
        increment,
    })
}

/// How a method turns a transition into a Q increment.
enum Rule<'a> {
    Plain,
    Gated {
        ctx: TransferContext<'a>,
        gate: TrustGateState,
        lambda_ad: f64,
        lambda_pd: f64,
        temperature: f64,
    },
    /// Reward shaping on automaton progress: λ·decay^episode·bonus(ω, ω′).
    Shaped {
        bonus: Vec<Vec<f64>>,
        lambda: f64,
        decay: f64,
    },
}

/// The bonus table used by AD: target states map onto source states by ordinal position.
fn ad_bonus(num_target: usize, pack: &KnowledgePack) -> Vec<Vec<f64>> {
    let n_src = pack.dfa.num_states();
    let src = |w: usize| w.min(n_src - 1);
    (0..num_target)
        .map(|from| {
            (0..num_target)
                .map(|to| {
                    pack.q_ad
                        .get(&(src(from), src(to)))
                        .copied()
                        .unwrap_or(pack.q_ad_state[src(from)])
                })
                .collect()
        })
        .collect()
}

pub struct StudentRun {
    pub q: QTable,
    pub metrics: RunMetrics,
    /// Pack ids actually used.
    pub sources: Vec<String>,
}

/// Builds neighborhoods for the method's pack selection and trains.
pub fn train_student(
    mdp: &ProductMdp<'_>,
    packs: &[KnowledgePack],
    embedder: &CachedEmbedder,
    cfg: &MethodConfig,
) -> Result<StudentRun, TrainError> {
    let selected: Vec<&KnowledgePack> = if cfg.method == Method::NoTransfer || packs.is_empty() {
        Vec::new()
    } else if cfg.method.single_pack() {
        let targets = embed_all(mdp.dfa, embedder)?;
        let sources = packs
            .iter()
            .map(|p| SourceEmbeddings::from_pack(p, embedder))
            .collect::<Result<Vec<_>, _>>()?;
        best_aligned_source(&targets, &sources)
            .map(|i| vec![&packs[i]])
            .unwrap_or_default()
    } else {
        packs.iter().collect()
    };
    let m = match cfg.method {
        Method::Cadent | Method::LarmLite => 1,
        _ => cfg.m,
    };
    let ctx = if selected.is_empty() {
        TransferContext::empty(mdp)
    } else {
        let index = SemanticIndex::build(mdp.dfa, &selected, embedder, m)?;
        TransferContext::new(mdp, selected, index)
    };
    run_student(mdp, ctx, cfg)
}

/// Trains with a prepared transfer context.
pub fn run_student<'a>(
    mdp: &ProductMdp<'_>,
    ctx: TransferContext<'a>,
    cfg: &MethodConfig,
) -> Result<StudentRun, TrainError> {
    let sources = ctx.packs.iter().map(|p| p.source_id.clone()).collect();
    let num_states = mdp.dfa.num_states();
    let has_packs = !ctx.packs.is_empty();
    let gate_for = |ctx: &TransferContext<'_>| {
        TrustGateState::new(
            cfg.gate,
            ctx.index.v_sem.clone(),
            ctx.index.neighborhoods.iter().map(|n| n.degenerate).collect(),
        )
    };
    let rule = match cfg.method {
        _ if !has_packs => Rule::Plain,
        Method::NoTransfer => Rule::Plain,
        Method::Ad => Rule::Shaped {
            bonus: ad_bonus(num_states, ctx.packs[0]),
            lambda: cfg.lambda_ad,
            decay: cfg.rho,
        },
        Method::LarmLite => {
            let ctx = ctx.force_unit_weights();
            let bonus = ctx
                .strategic
                .iter()
                .map(|&v| vec![v; num_states])
                .collect();
            Rule::Shaped {
                bonus,
                lambda: cfg.lambda_ad,
                decay: 1.0,
            }
        }
        Method::Cadent => {
            let ctx = ctx.force_unit_weights();
            let gate = gate_for(&ctx).experience_only();
            Rule::Gated {
                ctx,
                gate,
                lambda_ad: cfg.lambda_ad,
                lambda_pd: cfg.lambda_pd,
                temperature: cfg.student_temperature,
            }
        }
        Method::Lantern | Method::SingleSource | Method::NoSemanticGating | Method::StrategicOnly => {
            let mut gate = gate_for(&ctx);
            if cfg.method == Method::NoSemanticGating {
                gate = gate.experience_only();
            }
            let lambda_pd = if cfg.method == Method::StrategicOnly { 0.0 } else { cfg.lambda_pd };
            Rule::Gated {
                ctx,
                gate,
                lambda_ad: cfg.lambda_ad,
                lambda_pd,
                temperature: cfg.student_temperature,
            }
        }
    };
    let (q, mut metrics) = run_episodes(mdp, rule, cfg)?;
    metrics.method = cfg.method.as_str().to_string();
    Ok(StudentRun { q, metrics, sources })
}

fn run_episodes(mdp: &ProductMdp<'_>, mut rule: Rule<'_>, cfg: &MethodConfig) -> Result<(QTable, RunMetrics), TrainError> {
    let lcfg = &cfg.learner;
    let mut q = QTable::new();
    let mut rng = ChaCha8Rng::seed_from_u64(lcfg.seed);
    let mut metrics = RunMetrics::new(cfg.method.as_str(), lcfg.seed);
    let guidance_bound = match &rule {
        Rule::Plain => 0.0,
        Rule::Gated { ctx, lambda_ad, lambda_pd, .. } => {
            lambda_ad * ctx.strategic.iter().fold(0.0f64, |m, v| m.max(v.abs())) + lambda_pd
        }
        Rule::Shaped { bonus, lambda, .. } => {
            lambda * bonus.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
        }
    };
    let bound = q_bound(mdp, lcfg.gamma) + guidance_bound;
    let lambdas_vanish = matches!(rule, Rule::Gated { lambda_ad, lambda_pd, .. } if lambda_ad == 0.0 && lambda_pd == 0.0);

    for episode in 0..lcfg.episodes {
        let epsilon = lcfg.epsilon_at(episode);
        let mut p = mdp.initial_state();
        let mut total = 0.0;
        let mut tau_sum = 0.0;
        let mut steps = 0;
        let mut success = false;
        while steps < lcfg.max_steps {
            let key = p.key();
            let a = select_action(&q, &key, epsilon, &mut rng);
            let out = mdp.step(&p, a);
            let rec = TransitionRecord::new(&p, a, &out);
            let tau = match &mut rule {
                Rule::Plain => {
                    plain_step(&mut q, &rec, rec.reward, lcfg);
                    1.0
                }
                Rule::Shaped { bonus, lambda, decay } => {
                    let shaping = if rec.progressed() {
                        *lambda * decay.powi(episode as i32) * bonus[rec.auto][rec.next_auto]
                    } else {
                        0.0
                    };
                    plain_step(&mut q, &rec, rec.reward + shaping, lcfg);
                    1.0
                }
                Rule::Gated { ctx, gate, lambda_ad, lambda_pd, temperature } => {
                    if lambdas_vanish || !ctx.usable(rec.auto) {
                        // No usable guidance: the gate is pinned open.
                        let up = lantern_update(&mut q, gate, &rec, 0.0, lcfg.alpha, lcfg.gamma, Some(1.0))?;
                        up.tau
                    } else {
                        let g = guidance(ctx, &q, &rec, *lambda_ad, *lambda_pd, *temperature);
                        let up = lantern_update(&mut q, gate, &rec, g, lcfg.alpha, lcfg.gamma, None)?;
                        up.tau
                    }
                }
            };
            let updated = q.get(&rec.key, rec.action);
            if !updated.is_finite() || updated.abs() > bound {
                metrics.bound_violations += 1;
            }
            tau_sum += tau;
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
            mean_tau: if steps == 0 { 1.0 } else { tau_sum / steps as f64 },
            epsilon,
        });
    }
    Ok((q, metrics))
}

fn plain_step(q: &mut QTable, rec: &TransitionRecord, reward: f64, lcfg: &LearnerConfig) {
    let delta = td_error(q, lcfg.gamma, &rec.key, rec.action, reward, &rec.next_key, rec.terminal);
    apply_increment(q, rec.key, rec.action, lcfg.alpha * delta);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use crate::dfa::Dfa;
    use crate::distill::{Estimator, PolicyRow};
    use crate::env::{make_env, make_env_sized, EnvName, GridEnv};
    use crate::product::ProductConfig;
    use crate::qlearn::train_teacher;
    use crate::semantic::{HashedBowProvider, NeighborEntry, Neighborhood};

    fn dungeon() -> (GridEnv, Dfa) {
        (
            make_env_sized(EnvName::DungeonQuest, 3, Some(6)).unwrap(),
            Dfa::parse(include_str!("../fixtures/dfa/dungeon_quest.json")).unwrap(),
        )
    }

    fn learner(episodes: u32) -> LearnerConfig {
        LearnerConfig {
            episodes,
            max_steps: 150,
            epsilon_decay: 0.99,
            seed: 5,
            ..LearnerConfig::default()
        }
    }

    /// A pack over the rescue env whose every policy row is `row`.
    fn scripted_pack(row: [f64; 5], summary: f64) -> KnowledgePack {
        let env = make_env(EnvName::RescueMission, 3).unwrap();
        let dfa = Dfa::parse(include_str!("../fixtures/dfa/rescue_mission.json")).unwrap();
        let mut policy = BTreeMap::new();
        for s in env.enumerate_states().unwrap() {
            if s.consumed == 0 && s.inventory == [0; 4] {
                for auto in 0..5u16 {
                    policy.insert(ProductKey { env: s.key(), auto }, PolicyRow { probs: row, visits: 1 });
                }
            }
        }
        KnowledgePack {
            source_id: "scripted".into(),
            dfa,
            env,
            q_ad: BTreeMap::new(),
            q_ad_state: vec![summary; 5],
            teacher_policy: policy,
            temperature: 1.0,
            estimator: Estimator::Enumerated,
        }
    }

    fn single_entry_index(num_states: usize) -> SemanticIndex {
        SemanticIndex {
            neighborhoods: (0..num_states)
                .map(|t| Neighborhood {
                    target: t,
                    entries: vec![NeighborEntry {
                        source: 0,
                        source_id: "scripted".into(),
                        state: 0,
                        state_name: "ω0".into(),
                        similarity: 0.9,
                        weight: 1.0,
                    }],
                    degenerate: false,
                })
                .collect(),
            v_sem: vec![0.1; num_states],
        }
    }

    fn record(mdp: &ProductMdp<'_>, a: Action) -> TransitionRecord {
        let p = mdp.initial_state();
        let out = mdp.step(&p, a);
        TransitionRecord::new(&p, a, &out)
    }

    #[test]
    fn guidance_scalar_cases() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let pack = scripted_pack([0.7, 0.1, 0.1, 0.05, 0.05], 0.8);
        let ctx = TransferContext::new(&mdp, vec![&pack], single_entry_index(5));
        let rec = record(&mdp, Action::Up);
        assert!(!rec.progressed());
        // Student all-zero row: softmax gives 0.2.
        let g = guidance(&ctx, &QTable::new(), &rec, 0.15, 0.7, 1.0);
        assert!((g - 0.7 * (0.7 - 0.2)).abs() < 1e-12);
        assert!((g - 0.35).abs() < 1e-12);

        let mut progressed = rec;
        progressed.next_auto = 1;
        let uniform = scripted_pack([0.2; 5], 0.8);
        let ctx = TransferContext::new(&mdp, vec![&uniform], single_entry_index(5));
        let g = guidance(&ctx, &QTable::new(), &progressed, 0.15, 0.7, 1.0);
        assert!((g - 0.15 * 0.8).abs() < 1e-12);

        let empty = TransferContext::empty(&mdp);
        assert_eq!(guidance(&empty, &QTable::new(), &rec, 0.15, 0.7, 1.0), 0.0);
    }

    #[test]
    fn forced_gate_limits() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let rec = record(&mdp, Action::Right);
        let mut q = QTable::new();
        q.set(rec.key, rec.action, 0.3);
        q.set(rec.next_key, 2, 0.6);
        let mut gate = TrustGateState::new(GateParams::default(), vec![0.0; 5], vec![false; 5]);
        let delta = td_error(&q, 0.95, &rec.key, rec.action, rec.reward, &rec.next_key, rec.terminal);

        let mut q1 = q.clone();
        let up = lantern_update(&mut q1, &mut gate, &rec, 0.42, 0.6, 0.95, Some(1.0)).unwrap();
        assert!((up.increment - 0.6 * delta).abs() < 1e-12);

        let mut q0 = q.clone();
        let (pt, ps) = (0.7, softmax(&q.values(&rec.key), 1.0)[rec.action]);
        let g = 0.7 * (pt - ps);
        let up = lantern_update(&mut q0, &mut gate, &rec, g, 0.6, 0.95, Some(0.0)).unwrap();
        assert!((up.increment - 0.6 * 0.7 * (pt - ps)).abs() < 1e-12);
    }

    #[test]
    fn volatility_refreshes_before_gate() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let rec = record(&mdp, Action::Right);
        let mut gate = TrustGateState::new(GateParams::default(), vec![0.3; 5], vec![false; 5]);
        let mut q = QTable::new();
        let up = lantern_update(&mut q, &mut gate, &rec, 0.0, 0.6, 0.95, None).unwrap();
        let v = 0.99 + 0.01 * up.delta.abs();
        let expected = crate::gating::trust_from_volatility(v, 5.0, 0.5) * 0.5;
        assert!((up.tau - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_packs_match_no_transfer() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let embedder = CachedEmbedder::new(Arc::new(HashedBowProvider::default()));
        let base = train_student(&mdp, &[], &embedder, &MethodConfig::new(Method::NoTransfer, learner(60))).unwrap();
        for m in Method::ALL {
            let run = train_student(&mdp, &[], &embedder, &MethodConfig::new(m, learner(60))).unwrap();
            assert_eq!(run.metrics.episodes, base.metrics.episodes, "{m}");
            assert_eq!(run.q, base.q);
        }
    }

    #[test]
    fn no_transfer_equals_teacher_loop() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let embedder = CachedEmbedder::new(Arc::new(HashedBowProvider::default()));
        let cfg = learner(40);
        let run = train_student(&mdp, &[], &embedder, &MethodConfig::new(Method::NoTransfer, cfg)).unwrap();
        let (q, m) = train_teacher(&mdp, &cfg);
        assert_eq!(run.q, q);
        assert_eq!(run.metrics.episodes, m.episodes);
    }

    #[test]
    fn vanishing_lambdas_reproduce_plain_learning() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let pack = scripted_pack([0.7, 0.1, 0.1, 0.05, 0.05], 0.8);
        let ctx = TransferContext::new(&mdp, vec![&pack], single_entry_index(5));
        let mut cfg = MethodConfig::new(Method::Lantern, learner(40));
        cfg.lambda_ad = 0.0;
        cfg.lambda_pd = 0.0;
        let run = run_student(&mdp, ctx, &cfg).unwrap();
        let (q, m) = train_teacher(&mdp, &cfg.learner);
        assert_eq!(run.q, q);
        assert_eq!(run.metrics.rewards(), m.rewards());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("larm_lite".parse::<Method>().unwrap(), Method::LarmLite);
        assert!(matches!("dqn".parse::<Method>(), Err(TrainError::UnknownMethod(_))));
    }

    #[test]
    fn ad_decay_schedule() {
        assert!((0.99f64.powi(459) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn seeds_are_reproducible_with_packs() {
        let (env, dfa) = dungeon();
        let mdp = ProductMdp::new(&env, &dfa, ProductConfig::default());
        let pack = scripted_pack([0.1, 0.1, 0.1, 0.1, 0.6], 0.5);
        let run = |m| {
            let ctx = TransferContext::new(&mdp, vec![&pack], single_entry_index(5));
            run_student(&mdp, ctx, &MethodConfig::new(m, learner(30))).unwrap().metrics
        };
        for m in [Method::Lantern, Method::Cadent, Method::Ad, Method::LarmLite] {
            assert_eq!(run(m), run(m));
        }
    }
}
