use std::path::{Path, PathBuf};
use std::sync::Arc;

use lantern_core::dfa::{validate_dfa, Dfa};
use lantern_core::distill::{distill, DistillConfig, KnowledgePack};
use lantern_core::env::EnvName;
use lantern_core::fixtures::{builtin_dfa, concept_embedder, prompt_spec};
use lantern_core::llm::{generate_dfa, LlmClientConfig, Provenance};
use lantern_core::metrics::RunMetrics;
use lantern_core::pipeline::{run_cell, train_pack, EnvSpec};
use lantern_core::product::ProductConfig;
use lantern_core::qlearn::{LearnerConfig, QTable};
use lantern_core::semantic::{CachedEmbedder, FixtureProvider, HashedBowProvider, HttpEmbeddingProvider};
use lantern_core::trainer::Method;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{DfaSource, EmbeddingSource, ExperimentConfig, PackSource, ReportConfig};
use crate::error::CliError;
use crate::plot::learning_curves_svg;
use crate::summary::{csv_name, load_runs, summarize, SummaryTable, RUNS_DIR};

pub const LLM_ENDPOINT_VAR: &str = "LANTERN_LLM_ENDPOINT";
pub const EMBED_ENDPOINT_VAR: &str = "LANTERN_EMBED_ENDPOINT";
pub const API_KEY_VAR: &str = "LANTERN_LLM_API_KEY";

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

pub fn parse_env(name: &str) -> Result<EnvName, CliError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = EnvName::ALL.iter().map(|n| n.as_str()).collect();
        CliError::Config(format!("unknown environment `{name}` (expected one of {})", known.join(", ")))
    })
}

pub struct TeacherJob {
    pub source: EnvSpec,
    pub layout_seed: u64,
    pub learner: LearnerConfig,
    pub product: ProductConfig,
    pub distill: DistillConfig,
}

/// Trains a teacher, distills it, and writes the pack and the raw Q-table.
pub fn train_teacher(job: &TeacherJob, pack_path: &Path, qtable_path: Option<&Path>) -> Result<KnowledgePack, CliError> {
    let (pack, q, metrics) = train_pack(&job.source, job.layout_seed, &job.learner, job.product, &job.distill)?;
    info!(
        "teacher {} trained: {} episodes, {} states, {} successes",
        job.source.name,
        metrics.episodes.len(),
        q.len(),
        metrics.episodes.iter().filter(|e| e.success).count()
    );
    write(pack_path, &pack.to_json())?;
    if let Some(path) = qtable_path {
        write(path, &q.to_json(&job.learner))?;
    }
    Ok(pack)
}

/// Distills a saved teacher Q-table against a source environment.
pub fn distill_qtable(
    qtable: &Path,
    source: &EnvSpec,
    layout_seed: u64,
    product: ProductConfig,
    cfg: &DistillConfig,
    out: &Path,
) -> Result<KnowledgePack, CliError> {
    let text = std::fs::read_to_string(qtable).map_err(|e| CliError::io(format!("reading {}", qtable.display()), e))?;
    let (q, _): (QTable, LearnerConfig) = QTable::from_json(&text)?;
    let env = source.build(layout_seed).map_err(lantern_core::pipeline::PipelineError::from)?;
    let dfa = builtin_dfa(source.name).map_err(lantern_core::pipeline::PipelineError::from)?;
    let pack = distill(source.name.as_str(), &q, &env, &dfa, product, cfg);
    write(out, &pack.to_json())?;
    Ok(pack)
}

#[derive(Debug, Serialize)]
struct DfaRecord<'a> {
    provenance: &'a Provenance,
    raw: &'a str,
}

pub fn generate(env: EnvName, llm: &LlmClientConfig, out: &Path, provenance_out: Option<&Path>) -> Result<Dfa, CliError> {
    let spec = prompt_spec(env).map_err(lantern_core::pipeline::PipelineError::from)?;
    let generated = generate_dfa(&spec, llm)?;
    write(out, &generated.dfa.to_json())?;
    if let Some(path) = provenance_out {
        let record = DfaRecord {
            provenance: &generated.provenance,
            raw: &generated.raw,
        };
        write(path, &(serde_json::to_string_pretty(&record).expect("provenance serializes") + "\n"))?;
    }
    info!(
        "automaton for {env}: {} states after {} attempt(s), prompt {}",
        generated.dfa.num_states(),
        generated.provenance.attempts,
        generated.provenance.prompt_hash
    );
    Ok(generated.dfa)
}

pub fn live_llm(endpoint: Option<String>, model: &str, temperature: f64) -> Result<LlmClientConfig, CliError> {
    let endpoint = endpoint
        .or_else(|| env_var(LLM_ENDPOINT_VAR))
        .ok_or_else(|| CliError::Config(format!("live mode needs an endpoint (set {LLM_ENDPOINT_VAR})")))?;
    let mut cfg = LlmClientConfig::live(&endpoint, model, env_var(API_KEY_VAR));
    cfg.temperature = temperature;
    Ok(cfg)
}

fn resolve_dfa(cfg: &ExperimentConfig) -> Result<Dfa, CliError> {
    let env = cfg.target.env;
    let llm = match &cfg.dfa {
        DfaSource::Builtin => return builtin_dfa(env).map_err(|e| CliError::Config(e.to_string())),
        DfaSource::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            let dfa = Dfa::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let report = validate_dfa(&dfa);
            if !report.is_ok() {
                return Err(CliError::Config(format!("{}: {}", path.display(), report.error_text())));
            }
            return Ok(dfa);
        }
        DfaSource::LlmReplay { fixture, model } => {
            let mut llm = LlmClientConfig::replay(fixture);
            if let Some(m) = model {
                llm.model = m.clone();
            }
            llm
        }
        DfaSource::LlmLive { endpoint, model, temperature } => live_llm(endpoint.clone(), model, *temperature)?,
    };
    let spec = prompt_spec(env).map_err(lantern_core::pipeline::PipelineError::from)?;
    Ok(generate_dfa(&spec, &llm)?.dfa)
}

pub fn build_embedder(source: &EmbeddingSource) -> Result<CachedEmbedder, CliError> {
    Ok(match source {
        EmbeddingSource::Concepts => concept_embedder()?,
        EmbeddingSource::Hashed { dim } => CachedEmbedder::new(Arc::new(HashedBowProvider::new(*dim))),
        EmbeddingSource::File { path } => {
            CachedEmbedder::new(Arc::new(FixtureProvider::load(path, Some(HashedBowProvider::default()))?))
        }
        EmbeddingSource::Http { endpoint, model } => {
            let endpoint = endpoint
                .clone()
                .or_else(|| env_var(EMBED_ENDPOINT_VAR))
                .ok_or_else(|| CliError::Config(format!("http embeddings need an endpoint (set {EMBED_ENDPOINT_VAR})")))?;
            CachedEmbedder::new(Arc::new(HttpEmbeddingProvider::new(&endpoint, model, env_var(API_KEY_VAR))))
        }
    })
}

fn resolve_packs(cfg: &ExperimentConfig) -> Result<Vec<KnowledgePack>, CliError> {
    cfg.packs
        .par_iter()
        .map(|src| match src {
            PackSource::File { path } => Ok(KnowledgePack::load(path)?),
            PackSource::Train { env, size, seed } => {
                let dir = cfg.output_dir.join("packs");
                let stem = format!("{env}-seed{seed}");
                let job = TeacherJob {
                    source: EnvSpec::new(*env, *size),
                    layout_seed: cfg.layout_seed,
                    learner: LearnerConfig { seed: *seed, ..cfg.teacher },
                    product: cfg.product,
                    distill: cfg.distill,
                };
                train_teacher(
                    &job,
                    &dir.join(format!("{stem}.json")),
                    Some(&dir.join(format!("{stem}.qtable.json"))),
                )
            }
        })
        .collect()
}

pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
struct CellRecord {
    method: Method,
    seed: u64,
    csv: String,
    bound_violations: u64,
}

#[derive(Debug, Serialize)]
struct Manifest {
    config_hash: String,
    target: String,
    packs: Vec<String>,
    cells: Vec<CellRecord>,
}

/// Runs every (method, seed) cell, then writes the summary, the plot and a manifest.
pub fn run(cfg: &ExperimentConfig, config_text: &str, jobs: usize) -> Result<SummaryTable, CliError> {
    let out = &cfg.output_dir;
    write(&out.join("config.toml"), config_text)?;
    let hash = config_hash(config_text);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;

    let (env, dfa, packs, embedder) = pool.install(|| -> Result<_, CliError> {
        let env = cfg.target_spec().build(cfg.layout_seed).map_err(lantern_core::pipeline::PipelineError::from)?;
        let dfa = resolve_dfa(cfg)?;
        let packs = resolve_packs(cfg)?;
        Ok((env, dfa, packs, build_embedder(&cfg.embedding)?))
    })?;
    if packs.is_empty() && cfg.methods.iter().any(|m| *m != Method::NoTransfer) {
        warn!("no packs configured: transfer methods reduce to plain Q-learning");
    }

    let cells: Vec<(Method, u64)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let runs_dir = out.join(RUNS_DIR);
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|&(method, seed)| -> Result<CellRecord, CliError> {
                let mcfg = cfg.method_config(method, seed);
                let mut metrics: RunMetrics = run_cell(&env, &dfa, cfg.product, &packs, &embedder, &mcfg)?;
                metrics.config_hash = hash.clone();
                let name = csv_name(method.as_str(), seed);
                let mut buf = Vec::new();
                metrics.write_csv(&mut buf)?;
                write(&runs_dir.join(&name), &String::from_utf8(buf).expect("csv is utf-8"))?;
                if metrics.bound_violations > 0 {
                    warn!("{name}: {} Q-value bound violations", metrics.bound_violations);
                }
                info!("{name} done");
                Ok(CellRecord {
                    method,
                    seed,
                    csv: format!("{RUNS_DIR}/{name}"),
                    bound_violations: metrics.bound_violations,
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let manifest = Manifest {
        config_hash: hash,
        target: format!("{} {}x{}", env.name, env.width, env.height),
        packs: packs.iter().map(|p| p.source_id.clone()).collect(),
        cells: records,
    };
    write(
        &out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;
    compare(out, cfg.report, &format!("{} ({} seeds)", env.name, cfg.seeds.len()))
}

/// Recomputes the summary from the CSVs under `dir` and rewrites the report files.
pub fn compare(dir: &Path, report: ReportConfig, title: &str) -> Result<SummaryTable, CliError> {
    let runs = load_runs(dir)?;
    let table = summarize(&runs, report);
    write(&dir.join("summary.csv"), &table.to_csv())?;
    write(&dir.join("summary.md"), &table.render())?;
    write(&dir.join("curves.svg"), &learning_curves_svg(&runs, title))?;
    Ok(table)
}

pub fn default_output(name: &str) -> PathBuf {
    PathBuf::from("runs").join(name)
}
