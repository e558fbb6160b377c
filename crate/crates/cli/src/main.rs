mod commands;
mod config;
mod error;
mod plot;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lantern_core::distill::DistillConfig;
use lantern_core::llm::LlmClientConfig;
use lantern_core::pipeline::{EnvSpec, Profile};
use lantern_core::product::ProductConfig;
use lantern_core::qlearn::LearnerConfig;
use lantern_core::trainer::Method;

use crate::commands::TeacherJob;
use crate::config::{ExperimentConfig, ReportConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "lantern", version, about = "Multi-source automaton-guided transfer for tabular Q-learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a teacher on a source task and distill it into a pack.
    TrainTeacher(TrainTeacherArgs),
    /// Distill a saved teacher Q-table into a pack.
    Distill(DistillArgs),
    /// Ask a language model (or a replay fixture) for a task automaton.
    GenerateDfa(GenerateArgs),
    /// Run an experiment grid of (method, seed) cells.
    Run(RunArgs),
    /// Recompute the summary table from the CSVs of a finished run.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Environment name, e.g. rescue_mission.
    #[arg(long)]
    env: String,
    /// Grid side length; defaults to the environment's reference size.
    #[arg(long)]
    size: Option<u16>,
    #[arg(long, default_value_t = 7)]
    layout_seed: u64,
    /// Episode step cap.
    #[arg(long, default_value_t = 200)]
    cap: u32,
    /// Softmax temperature of the distilled teacher policy.
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
}

impl SourceArgs {
    fn spec(&self) -> Result<EnvSpec, CliError> {
        Ok(EnvSpec::new(commands::parse_env(&self.env)?, self.size))
    }

    fn product(&self) -> ProductConfig {
        ProductConfig {
            episode_cap: self.cap,
            ..ProductConfig::default()
        }
    }

    fn distill(&self) -> Result<DistillConfig, CliError> {
        if self.temperature <= 0.0 {
            return Err(CliError::Config("temperature must be positive".into()));
        }
        Ok(DistillConfig {
            temperature: self.temperature,
            ..DistillConfig::default()
        })
    }
}

#[derive(Args)]
struct TrainTeacherArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 600)]
    episodes: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9995)]
    epsilon_decay: f64,
    /// Pack output file.
    #[arg(long)]
    out: PathBuf,
    /// Also write the raw teacher Q-table here.
    #[arg(long)]
    qtable: Option<PathBuf>,
}

#[derive(Args)]
struct DistillArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Teacher Q-table written by train-teacher.
    #[arg(long)]
    qtable: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Target environment; fixes the task description and the label vocabulary.
    #[arg(long)]
    env: String,
    /// Replay fixture (prompt hash → response). Without it the live endpoint is used.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Chat-completion endpoint; falls back to LANTERN_LLM_ENDPOINT.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "replay")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long)]
    out: PathBuf,
    /// Write prompt hash, model and raw responses here.
    #[arg(long)]
    provenance: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
    config: Option<PathBuf>,
    /// Bundled profile: desk-dungeon, desk-craftsman, full-dungeon, full-craftsman.
    #[arg(long)]
    profile: Option<String>,
    /// Comma-separated methods, overriding the config.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated seeds, overriding the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the (method, seed) grid.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Args)]
struct CompareArgs {
    /// Run directory (or a directory of `{method}-seed{n}.csv` files).
    dir: PathBuf,
    #[arg(long, default_value_t = 500)]
    early_window: usize,
    #[arg(long, default_value_t = 100)]
    final_window: usize,
    /// Trailing-mean reward that counts as solved.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = 100)]
    threshold_window: usize,
}

fn train_teacher(a: TrainTeacherArgs) -> Result<(), CliError> {
    let job = TeacherJob {
        source: a.source.spec()?,
        layout_seed: a.source.layout_seed,
        learner: LearnerConfig {
            alpha: a.alpha,
            epsilon_decay: a.epsilon_decay,
            episodes: a.episodes,
            max_steps: a.source.cap,
            seed: a.seed,
            ..LearnerConfig::default()
        },
        product: a.source.product(),
        distill: a.source.distill()?,
    };
    let pack = commands::train_teacher(&job, &a.out, a.qtable.as_deref())?;
    println!(
        "wrote {} ({} automaton transitions, {} policy rows)",
        a.out.display(),
        pack.q_ad.len(),
        pack.teacher_policy.len()
    );
    Ok(())
}

fn distill(a: DistillArgs) -> Result<(), CliError> {
    let pack = commands::distill_qtable(
        &a.qtable,
        &a.source.spec()?,
        a.source.layout_seed,
        a.source.product(),
        &a.source.distill()?,
        &a.out,
    )?;
    println!("wrote {} ({} automaton transitions)", a.out.display(), pack.q_ad.len());
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let env = commands::parse_env(&a.env)?;
    let llm = match a.fixture {
        Some(path) => {
            if !path.exists() {
                return Err(CliError::Config(format!("fixture {} does not exist", path.display())));
            }
            let mut llm = LlmClientConfig::replay(path);
            llm.model = a.model;
            llm
        }
        None => commands::live_llm(a.endpoint, &a.model, a.temperature)?,
    };
    let dfa = commands::generate(env, &llm, &a.out, a.provenance.as_deref())?;
    println!("wrote {} ({} states)", a.out.display(), dfa.num_states());
    Ok(())
}

fn run(a: RunArgs) -> Result<(), CliError> {
    let (mut cfg, text) = match (&a.config, &a.profile) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => {
            let profile = Profile::by_name(name).ok_or_else(|| CliError::Config(format!("unknown profile `{name}`")))?;
            let cfg = ExperimentConfig::from_profile(&profile, commands::default_output(name));
            let text = cfg.to_toml();
            (cfg, text)
        }
        (None, None) => unreachable!("clap requires --config or --profile"),
    };
    let mut overridden = false;
    if let Some(methods) = a.methods {
        cfg.methods = methods
            .iter()
            .map(|m| m.parse::<Method>().map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<_, _>>()?;
        overridden = true;
    }
    if let Some(seeds) = a.seeds {
        cfg.seeds = seeds;
        overridden = true;
    }
    if let Some(out) = a.out {
        cfg.output_dir = out;
        overridden = true;
    }
    if a.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    cfg.validate()?;
    // Persist what actually ran: the file verbatim, or the resolved config once flags changed it.
    let text = if overridden { cfg.to_toml() } else { text };
    let table = commands::run(&cfg, &text, a.jobs)?;
    print!("{}", table.render());
    println!("outputs in {}", cfg.output_dir.display());
    Ok(())
}

fn compare(a: CompareArgs) -> Result<(), CliError> {
    let report = ReportConfig {
        final_window: a.final_window,
        early_window: a.early_window,
        threshold: a.threshold,
        threshold_window: a.threshold_window,
    };
    let title = a.dir.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let table = commands::compare(&a.dir, report, &title)?;
    print!("{}", table.render());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::TrainTeacher(a) => train_teacher(a),
        Command::Distill(a) => distill(a),
        Command::GenerateDfa(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
