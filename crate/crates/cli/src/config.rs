//! Declarative experiment file (TOML).

use std::path::{Path, PathBuf};

use lantern_core::distill::DistillConfig;
use lantern_core::env::EnvName;
use lantern_core::gating::GateParams;
use lantern_core::pipeline::{EnvSpec, Profile};
use lantern_core::product::ProductConfig;
use lantern_core::qlearn::LearnerConfig;
use lantern_core::trainer::{Method, MethodConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    #[serde(default = "default_layout_seed")]
    pub layout_seed: u64,
    pub target: TargetConfig,
    #[serde(default)]
    pub dfa: DfaSource,
    #[serde(default)]
    pub packs: Vec<PackSource>,
    #[serde(default)]
    pub learner: LearnerConfig,
    #[serde(default)]
    pub teacher: LearnerConfig,
    #[serde(default)]
    pub product: ProductConfig,
    #[serde(default)]
    pub distill: DistillConfig,
    #[serde(default)]
    pub method: MethodParams,
    #[serde(default)]
    pub gate: GateParams,
    #[serde(default)]
    pub embedding: EmbeddingSource,
    #[serde(default)]
    pub report: ReportConfig,
}

fn default_layout_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub env: EnvName,
    #[serde(default)]
    pub size: Option<u16>,
}

/// Where the target automaton comes from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DfaSource {
    /// The bundled automaton for the target environment.
    #[default]
    Builtin,
    File { path: PathBuf },
    LlmReplay {
        fixture: PathBuf,
        #[serde(default)]
        model: Option<String>,
    },
    LlmLive {
        /// Falls back to `LANTERN_LLM_ENDPOINT`.
        #[serde(default)]
        endpoint: Option<String>,
        model: String,
        #[serde(default)]
        temperature: f64,
    },
}

/// A pack file on disk, or a source task to train a teacher for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PackSource {
    File {
        path: PathBuf,
    },
    Train {
        env: EnvName,
        #[serde(default)]
        size: Option<u16>,
        #[serde(default = "default_teacher_seed")]
        seed: u64,
    },
}

fn default_teacher_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    pub lambda_ad: f64,
    pub lambda_pd: f64,
    pub m: usize,
    pub rho: f64,
    pub student_temperature: f64,
}

impl Default for MethodParams {
    fn default() -> Self {
        let d = MethodConfig::new(Method::Lantern, LearnerConfig::default());
        Self {
            lambda_ad: d.lambda_ad,
            lambda_pd: d.lambda_pd,
            m: d.m,
            rho: d.rho,
            student_temperature: d.student_temperature,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EmbeddingSource {
    /// Bundled concept vectors with a hashed fallback.
    #[default]
    Concepts,
    Hashed {
        #[serde(default = "default_hashed_dim")]
        dim: usize,
    },
    File { path: PathBuf },
    Http {
        /// Falls back to `LANTERN_EMBED_ENDPOINT`.
        #[serde(default)]
        endpoint: Option<String>,
        model: String,
    },
}

fn default_hashed_dim() -> usize {
    256
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub final_window: usize,
    pub early_window: usize,
    pub threshold: f64,
    pub threshold_window: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            final_window: 100,
            early_window: 500,
            threshold: 1.0,
            threshold_window: 100,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates; relative paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok((Self::from_toml(&text, base)?, text))
    }

    pub fn from_profile(profile: &Profile, output_dir: PathBuf) -> Self {
        Self {
            output_dir,
            seeds: profile.seeds.clone(),
            methods: vec![Method::NoTransfer, Method::Lantern],
            layout_seed: profile.layout_seed,
            target: TargetConfig {
                env: profile.target.name,
                size: profile.target.size,
            },
            dfa: DfaSource::Builtin,
            packs: profile
                .sources
                .iter()
                .enumerate()
                .map(|(i, s)| PackSource::Train {
                    env: s.name,
                    size: s.size,
                    seed: i as u64 + 1,
                })
                .collect(),
            learner: profile.student,
            teacher: profile.teacher,
            product: profile.product,
            distill: profile.distill,
            method: MethodParams::default(),
            gate: GateParams::default(),
            embedding: EmbeddingSource::Concepts,
            report: ReportConfig::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("experiment config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        match &mut self.dfa {
            DfaSource::File { path } => fix(path),
            DfaSource::LlmReplay { fixture, .. } => fix(fixture),
            _ => {}
        }
        for p in &mut self.packs {
            if let PackSource::File { path } = p {
                fix(path);
            }
        }
        if let EmbeddingSource::File { path } = &mut self.embedding {
            fix(path);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::Config("seeds must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("methods must not be empty".into()));
        }
        let mut files: Vec<&Path> = Vec::new();
        match &self.dfa {
            DfaSource::File { path } => files.push(path),
            DfaSource::LlmReplay { fixture, .. } => files.push(fixture),
            _ => {}
        }
        for p in &self.packs {
            if let PackSource::File { path } = p {
                files.push(path);
            }
        }
        if let EmbeddingSource::File { path } = &self.embedding {
            files.push(path);
        }
        if let Some(missing) = files.iter().find(|p| !p.exists()) {
            return Err(CliError::Config(format!("referenced file {} does not exist", missing.display())));
        }
        if self.method.m == 0 {
            return Err(CliError::Config("method.m must be at least 1".into()));
        }
        Ok(())
    }

    pub fn target_spec(&self) -> EnvSpec {
        EnvSpec::new(self.target.env, self.target.size)
    }

    pub fn method_config(&self, method: Method, seed: u64) -> MethodConfig {
        let mut cfg = MethodConfig::new(method, LearnerConfig { seed, ..self.learner });
        cfg.lambda_ad = self.method.lambda_ad;
        cfg.lambda_pd = self.method.lambda_pd;
        cfg.m = self.method.m;
        cfg.rho = self.method.rho;
        cfg.student_temperature = self.method.student_temperature;
        cfg.gate = self.gate;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
output_dir = "out"
seeds = [1, 2]
methods = ["no_transfer", "lantern"]

[target]
env = "dungeon_quest"
size = 10

[[packs]]
env = "rescue_mission"

[[packs]]
env = "treasure_hunt"
seed = 2

[learner]
episodes = 50
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL, Path::new("/tmp/x")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/x/out"));
        assert_eq!(cfg.layout_seed, 7);
        assert_eq!(cfg.dfa, DfaSource::Builtin);
        assert_eq!(cfg.learner.episodes, 50);
        assert_eq!(cfg.learner.alpha, 0.6);
        assert_eq!(cfg.method.lambda_pd, 0.7);
        assert_eq!(cfg.report.early_window, 500);
        assert_eq!(
            cfg.packs[1],
            PackSource::Train {
                env: EnvName::TreasureHunt,
                size: None,
                seed: 2
            }
        );
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::from_profile(&Profile::desk_dungeon(), PathBuf::from("/tmp/out"));
        let back = ExperimentConfig::from_toml(&cfg.to_toml(), Path::new("/")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let empty_seeds = MINIMAL.replace("seeds = [1, 2]", "seeds = []");
        assert!(ExperimentConfig::from_toml(&empty_seeds, Path::new(".")).is_err());
        let bad_env = MINIMAL.replace("\"dungeon_quest\"", "\"castle\"");
        assert!(ExperimentConfig::from_toml(&bad_env, Path::new(".")).is_err());
        let missing = format!("{MINIMAL}\n[dfa]\nsource = \"file\"\npath = \"nope.json\"\n");
        let err = ExperimentConfig::from_toml(&missing, Path::new("/nonexistent")).unwrap_err();
        assert!(err.to_string().contains("does not exist"), "{err}");
        let unknown = MINIMAL.replace("[learner]", "[learnr]");
        assert!(ExperimentConfig::from_toml(&unknown, Path::new(".")).is_err());
    }

    #[test]
    fn shipped_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        for name in ["desk-dungeon.toml", "desk-craftsman-ablations.toml"] {
            let (cfg, _) = ExperimentConfig::load(&dir.join(name)).unwrap();
            assert_eq!(cfg.seeds.len(), 5);
        }
        // Pack files are produced separately, so only the syntax is checked here.
        let text = std::fs::read_to_string(dir.join("dungeon-from-replay.toml")).unwrap();
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        assert!(matches!(cfg.dfa, DfaSource::LlmReplay { .. }));
        assert!(matches!(cfg.packs[0], PackSource::File { .. }));
    }
}
