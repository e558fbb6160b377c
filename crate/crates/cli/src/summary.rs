//! Per-method statistics recomputed from the per-seed CSVs on disk.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lantern_core::metrics::{auc, episodes_to_threshold, final_window_mean, mean, std_dev, RunMetrics};
use serde::Serialize;

use crate::config::ReportConfig;
use crate::error::CliError;

pub const RUNS_DIR: &str = "runs";

pub fn csv_name(method: &str, seed: u64) -> String {
    format!("{method}-seed{seed}.csv")
}

/// Splits `{method}-seed{seed}.csv`.
pub fn parse_csv_name(file: &str) -> Option<(String, u64)> {
    let stem = file.strip_suffix(".csv")?;
    let (method, seed) = stem.rsplit_once("-seed")?;
    Some((method.to_string(), seed.parse().ok()?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub seeds: usize,
    pub final_mean: f64,
    pub final_std: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub early_mean: f64,
    pub early_std: f64,
    /// Mean over the seeds that reached the threshold.
    pub to_threshold_mean: Option<f64>,
    pub reached: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub report: ReportConfig,
    pub rows: Vec<SummaryRow>,
}

/// The directory holding the CSVs: `dir/runs` when present, else `dir`.
pub fn runs_dir(dir: &Path) -> PathBuf {
    let nested = dir.join(RUNS_DIR);
    if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    }
}

pub fn load_runs(dir: &Path) -> Result<BTreeMap<String, Vec<RunMetrics>>, CliError> {
    let dir = runs_dir(dir);
    let entries = std::fs::read_dir(&dir).map_err(|e| CliError::io(format!("reading {}", dir.display()), e))?;
    let mut files: Vec<(String, u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(format!("reading {}", dir.display()), e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some((method, seed)) = parse_csv_name(name) {
            files.push((method, seed, path));
        }
    }
    if files.is_empty() {
        return Err(CliError::NoRuns(dir.display().to_string()));
    }
    files.sort();
    let mut runs: BTreeMap<String, Vec<RunMetrics>> = BTreeMap::new();
    for (method, seed, path) in files {
        let file = std::fs::File::open(&path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
        let m = RunMetrics::read_csv(file, &method, seed).map_err(|e| CliError::MalformedCsv {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        if m.episodes.is_empty() {
            return Err(CliError::MalformedCsv {
                path: path.display().to_string(),
                reason: "no episodes".into(),
            });
        }
        runs.entry(method).or_default().push(m);
    }
    Ok(runs)
}

pub fn summarize(runs: &BTreeMap<String, Vec<RunMetrics>>, report: ReportConfig) -> SummaryTable {
    let rows = runs
        .iter()
        .map(|(method, seeds)| {
            let curves: Vec<Vec<f64>> = seeds.iter().map(|r| r.rewards()).collect();
            let finals: Vec<f64> = curves.iter().map(|c| final_window_mean(c, report.final_window)).collect();
            let aucs: Vec<f64> = curves.iter().map(|c| auc(c)).collect();
            let early: Vec<f64> = curves
                .iter()
                .map(|c| mean(&c[..c.len().min(report.early_window.max(1))]))
                .collect();
            let hits: Vec<f64> = curves
                .iter()
                .filter_map(|c| episodes_to_threshold(c, report.threshold_window, report.threshold))
                .map(|e| e as f64)
                .collect();
            SummaryRow {
                method: method.clone(),
                seeds: seeds.len(),
                final_mean: mean(&finals),
                final_std: std_dev(&finals),
                auc_mean: mean(&aucs),
                auc_std: std_dev(&aucs),
                early_mean: mean(&early),
                early_std: std_dev(&early),
                to_threshold_mean: (!hits.is_empty()).then(|| mean(&hits)),
                reached: hits.len(),
            }
        })
        .collect();
    SummaryTable { report, rows }
}

impl SummaryTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,seeds,final_mean,final_std,auc_mean,auc_std,early_mean,early_std,to_threshold_mean,reached\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
                r.method,
                r.seeds,
                r.final_mean,
                r.final_std,
                r.auc_mean,
                r.auc_std,
                r.early_mean,
                r.early_std,
                r.to_threshold_mean.map(|v| format!("{v:.1}")).unwrap_or_default(),
                r.reached
            );
        }
        out
    }

    /// Plain-text table for the terminal and `summary.md`.
    pub fn render(&self) -> String {
        let rep = &self.report;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "| method | seeds | final-{} reward | AUC | early-{} reward | episodes to {:.2} |",
            rep.final_window, rep.early_window, rep.threshold
        );
        out.push_str("|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let hit = match r.to_threshold_mean {
                Some(v) => format!("{v:.0} ({}/{})", r.reached, r.seeds),
                None => format!("- (0/{})", r.seeds),
            };
            let _ = writeln!(
                out,
                "| {} | {} | {:.3} ± {:.3} | {:.1} ± {:.1} | {:.3} ± {:.3} | {} |",
                r.method, r.seeds, r.final_mean, r.final_std, r.auc_mean, r.auc_std, r.early_mean, r.early_std, hit
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lantern_core::metrics::EpisodeRecord;

    fn run(method: &str, seed: u64, rewards: &[f64]) -> RunMetrics {
        let mut m = RunMetrics::new(method, seed);
        m.episodes = rewards
            .iter()
            .enumerate()
            .map(|(i, &reward)| EpisodeRecord {
                episode: i as u32,
                reward,
                steps: 1,
                success: reward > 0.5,
                mean_tau: 1.0,
                epsilon: 0.1,
            })
            .collect();
        m
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(csv_name("no_semantic_gating", 3), "no_semantic_gating-seed3.csv");
        assert_eq!(parse_csv_name("no_semantic_gating-seed3.csv"), Some(("no_semantic_gating".into(), 3)));
        assert_eq!(parse_csv_name("summary.csv"), None);
        assert_eq!(parse_csv_name("lantern-seedx.csv"), None);
    }

    #[test]
    fn three_point_curve() {
        let runs = BTreeMap::from([("m".to_string(), vec![run("m", 1, &[0.0, 1.0, 2.0])])]);
        let t = summarize(&runs, ReportConfig::default());
        assert_eq!(t.rows[0].auc_mean, 2.0);
        assert_eq!(t.rows[0].final_mean, 1.0);
    }

    #[test]
    fn identical_seeds_have_zero_spread() {
        let curve = [0.1, 0.5, 1.2, 1.3];
        let runs = BTreeMap::from([("m".to_string(), vec![run("m", 1, &curve), run("m", 2, &curve)])]);
        let report = ReportConfig {
            threshold: 1.0,
            threshold_window: 1,
            ..ReportConfig::default()
        };
        let t = summarize(&runs, report);
        let r = &t.rows[0];
        assert_eq!((r.final_std, r.auc_std, r.early_std), (0.0, 0.0, 0.0));
        assert_eq!(r.to_threshold_mean, Some(2.0));
        assert_eq!(r.reached, 2);
        assert!(t.render().contains("| m | 2 |"));
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_runs(dir.path()), Err(CliError::NoRuns(_))));
    }

    #[test]
    fn malformed_csv_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("lantern-seed1.csv"), "episode,reward\n0,abc\n").unwrap();
        assert!(matches!(load_runs(dir.path()), Err(CliError::MalformedCsv { .. })));
    }
}
