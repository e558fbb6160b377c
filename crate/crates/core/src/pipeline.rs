//! Teacher → pack → student wiring and the bundled experiment profiles.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::{Dfa, DfaError};
use crate::distill::{distill, DistillConfig, KnowledgePack};
use crate::env::{make_env_sized, EnvError, EnvName, GridEnv, NUM_ACTIONS};
use crate::fixtures::builtin_dfa;
use crate::metrics::RunMetrics;
use crate::product::{ProductConfig, ProductMdp};
use crate::qlearn::{train_teacher, LearnerConfig, QTable};
use crate::semantic::CachedEmbedder;
use crate::trainer::{train_student, Method, MethodConfig, TrainError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// One environment at a given size and layout seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub name: EnvName,
    pub size: Option<u16>,
}

impl EnvSpec {
    pub fn new(name: EnvName, size: Option<u16>) -> Self {
        Self { name, size }
    }

    pub fn build(&self, layout_seed: u64) -> Result<GridEnv, EnvError> {
        make_env_sized(self.name, layout_seed, self.size)
    }
}

/// Trains a teacher on a source task and distills it.
pub fn train_pack(
    source: &EnvSpec,
    layout_seed: u64,
    learner: &LearnerConfig,
    product: ProductConfig,
    distill_cfg: &DistillConfig,
) -> Result<(KnowledgePack, QTable, RunMetrics), PipelineError> {
    let env = source.build(layout_seed)?;
    let dfa = builtin_dfa(source.name)?;
    let mdp = ProductMdp::new(&env, &dfa, product);
    let (q, metrics) = train_teacher(&mdp, learner);
    let pack = distill(source.name.as_str(), &q, &env, &dfa, product, distill_cfg);
    Ok((pack, q, metrics))
}

/// Replaces every state description with a random letter string.
pub fn scramble_descriptions(dfa: &Dfa, seed: u64) -> Result<Dfa, DfaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = dfa.to_document();
    for state in &doc.states {
        let words: Vec<String> = (0..3)
            .map(|_| {
                let len = rng.random_range(4..9);
                (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
            })
            .collect();
        doc.descriptions.insert(state.clone(), words.join(" "));
    }
    Dfa::from_document(doc)
}

/// Same keys and visit counts, action values drawn uniformly from the table's range.
pub fn scramble_q(q: &QTable, seed: u64) -> QTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = q.value_range().unwrap_or((0.0, 1.0));
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let mut out = q.clone();
    let keys: Vec<_> = q.iter().map(|(k, _)| *k).collect();
    for key in keys {
        for a in 0..NUM_ACTIONS {
            out.set(key, a, rng.random_range(lo..hi));
        }
    }
    out
}

/// A misaligned pack: random descriptions and a teacher with random values.
pub fn adversarial_pack(
    pack: &KnowledgePack,
    teacher_q: &QTable,
    product: ProductConfig,
    distill_cfg: &DistillConfig,
    seed: u64,
) -> Result<KnowledgePack, DfaError> {
    let dfa = scramble_descriptions(&pack.dfa, seed)?;
    let q = scramble_q(teacher_q, seed ^ 0x5eed);
    let mut out = distill(&pack.source_id, &q, &pack.env, &dfa, product, distill_cfg);
    out.source_id = format!("{}-adversarial", pack.source_id);
    Ok(out)
}

/// Target, sources and schedules for one experiment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub target: EnvSpec,
    pub sources: Vec<EnvSpec>,
    pub layout_seed: u64,
    pub product: ProductConfig,
    pub teacher: LearnerConfig,
    pub student: LearnerConfig,
    pub distill: DistillConfig,
    pub seeds: Vec<u64>,
}

impl Profile {
    fn build(name: &str, target: EnvSpec, sources: Vec<EnvSpec>, teacher_episodes: u32, student_episodes: u32, cap: u32) -> Self {
        let product = ProductConfig {
            episode_cap: cap,
            ..ProductConfig::default()
        };
        let teacher = LearnerConfig {
            episodes: teacher_episodes,
            max_steps: cap,
            ..LearnerConfig::default()
        };
        let student = LearnerConfig {
            episodes: student_episodes,
            max_steps: cap,
            ..LearnerConfig::default()
        };
        Self {
            name: name.to_string(),
            target,
            sources,
            layout_seed: 7,
            product,
            teacher,
            student,
            distill: DistillConfig::default(),
            seeds: vec![1, 2, 3, 4, 5],
        }
    }

    pub fn desk_dungeon() -> Self {
        Self::build(
            "desk-dungeon",
            EnvSpec::new(EnvName::DungeonQuest, Some(10)),
            vec![
                EnvSpec::new(EnvName::RescueMission, None),
                EnvSpec::new(EnvName::TreasureHunt, None),
            ],
            600,
            800,
            400,
        )
    }

    pub fn desk_craftsman() -> Self {
        Self::build(
            "desk-craftsman",
            EnvSpec::new(EnvName::BlindCraftsman, Some(12)),
            vec![
                EnvSpec::new(EnvName::MiningOperation, None),
                EnvSpec::new(EnvName::FarmingOperation, None),
            ],
            600,
            1000,
            600,
        )
    }

    /// Full-size dungeon with the reference schedule.
    pub fn full_dungeon() -> Self {
        Self::build(
            "full-dungeon",
            EnvSpec::new(EnvName::DungeonQuest, None),
            vec![
                EnvSpec::new(EnvName::RescueMission, None),
                EnvSpec::new(EnvName::TreasureHunt, None),
            ],
            600,
            2000,
            1500,
        )
    }

    pub fn full_craftsman() -> Self {
        Self::build(
            "full-craftsman",
            EnvSpec::new(EnvName::BlindCraftsman, None),
            vec![
                EnvSpec::new(EnvName::MiningOperation, None),
                EnvSpec::new(EnvName::FarmingOperation, None),
            ],
            600,
            1000,
            2500,
        )
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "desk-dungeon" => Some(Self::desk_dungeon()),
            "desk-craftsman" => Some(Self::desk_craftsman()),
            "full-dungeon" => Some(Self::full_dungeon()),
            "full-craftsman" => Some(Self::full_craftsman()),
            _ => None,
        }
    }

    pub fn target_env(&self) -> Result<GridEnv, EnvError> {
        self.target.build(self.layout_seed)
    }

    pub fn target_dfa(&self) -> Result<Dfa, DfaError> {
        builtin_dfa(self.target.name)
    }

    /// Trains every source teacher; teacher seed k+1 for source k.
    pub fn train_packs(&self) -> Result<Vec<(KnowledgePack, QTable)>, PipelineError> {
        self.sources
            .iter()
            .enumerate()
            .map(|(i, src)| {
                let learner = LearnerConfig {
                    seed: i as u64 + 1,
                    ..self.teacher
                };
                let (pack, q, _) = train_pack(src, self.layout_seed, &learner, self.product, &self.distill)?;
                Ok((pack, q))
            })
            .collect()
    }

    pub fn method_config(&self, method: Method, seed: u64) -> MethodConfig {
        MethodConfig::new(
            method,
            LearnerConfig {
                seed,
                ..self.student
            },
        )
    }
}

/// Trains one (method, seed) cell on the profile's target.
pub fn run_cell(
    target_env: &GridEnv,
    target_dfa: &Dfa,
    product: ProductConfig,
    packs: &[KnowledgePack],
    embedder: &CachedEmbedder,
    cfg: &MethodConfig,
) -> Result<RunMetrics, PipelineError> {
    let mdp = ProductMdp::new(target_env, target_dfa, product);
    Ok(train_student(&mdp, packs, embedder, cfg)?.metrics)
}
