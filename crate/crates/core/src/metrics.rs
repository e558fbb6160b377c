//! Per-episode run records, CSV I/O and summary statistics.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("no episodes")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: u32,
    pub reward: f64,
    pub steps: u32,
    pub success: bool,
    pub mean_tau: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMetrics {
    pub method: String,
    pub seed: u64,
    pub config_hash: String,
    pub episodes: Vec<EpisodeRecord>,
    /// Updates that left a Q-value outside the analytic bound.
    pub bound_violations: u64,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    episode: u32,
    reward: String,
    steps: u32,
    success: u8,
    mean_tau: String,
    epsilon: String,
}

#[derive(Deserialize)]
struct CsvRowIn {
    episode: u32,
    reward: f64,
    steps: u32,
    success: u8,
    mean_tau: f64,
    epsilon: f64,
}

impl RunMetrics {
    pub fn new(method: &str, seed: u64) -> Self {
        Self {
            method: method.to_string(),
            seed,
            ..Self::default()
        }
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.reward).collect()
    }

    /// Writes the fixed-precision per-episode CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MetricsError> {
        let mut out = csv::Writer::from_writer(w);
        for e in &self.episodes {
            out.serialize(CsvRow {
                episode: e.episode,
                reward: format!("{:.6}", e.reward),
                steps: e.steps,
                success: e.success as u8,
                mean_tau: format!("{:.6}", e.mean_tau),
                epsilon: format!("{:.6}", e.epsilon),
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, method: &str, seed: u64) -> Result<Self, MetricsError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut m = RunMetrics::new(method, seed);
        for row in rdr.deserialize() {
            let row: CsvRowIn = row?;
            m.episodes.push(EpisodeRecord {
                episode: row.episode,
                reward: row.reward,
                steps: row.steps,
                success: row.success != 0,
                mean_tau: row.mean_tau,
                epsilon: row.epsilon,
            });
        }
        Ok(m)
    }
}

/// Trapezoid area under a unit-spaced curve.
pub fn auc(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[0] + w[1]) / 2.0).sum()
}

/// Mean of the last `window` values (all values if fewer).
pub fn final_window_mean(values: &[f64], window: usize) -> f64 {
    let start = values.len().saturating_sub(window);
    mean(&values[start..])
}

/// First episode index at which the trailing `window` mean reaches `threshold`.
pub fn episodes_to_threshold(values: &[f64], window: usize, threshold: f64) -> Option<usize> {
    let window = window.max(1);
    if values.len() < window {
        return None;
    }
    let mut sum: f64 = values[..window].iter().sum();
    if sum / window as f64 >= threshold {
        return Some(window - 1);
    }
    for i in window..values.len() {
        sum += values[i] - values[i - window];
        if sum / window as f64 >= threshold {
            return Some(i);
        }
    }
    None
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_auc() {
        assert_eq!(auc(&[0.0, 1.0, 2.0]), 2.0);
        assert_eq!(auc(&[3.0]), 0.0);
        assert_eq!(auc(&[]), 0.0);
    }

    #[test]
    fn stats() {
        assert_eq!(std_dev(&[2.0, 2.0]), 0.0);
        assert!((std_dev(&[1.0, 3.0]) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(final_window_mean(&[1.0, 2.0, 3.0, 4.0], 2), 3.5);
        assert_eq!(final_window_mean(&[1.0, 3.0], 10), 2.0);
    }

    #[test]
    fn threshold_crossing() {
        let v = [0.0, 0.0, 1.0, 1.0, 1.0];
        assert_eq!(episodes_to_threshold(&v, 2, 1.0), Some(3));
        assert_eq!(episodes_to_threshold(&v, 1, 0.5), Some(2));
        assert_eq!(episodes_to_threshold(&v, 2, 2.0), None);
    }

    #[test]
    fn csv_roundtrip() {
        let mut m = RunMetrics::new("lantern", 3);
        m.episodes.push(EpisodeRecord {
            episode: 0,
            reward: 0.25,
            steps: 17,
            success: true,
            mean_tau: 0.5,
            epsilon: 1.0,
        });
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("episode,reward,steps,success,mean_tau,epsilon\n"));
        assert!(text.contains("0,0.250000,17,1,0.500000,1.000000"));
        let back = RunMetrics::read_csv(buf.as_slice(), "lantern", 3).unwrap();
        assert_eq!(back.episodes, m.episodes);
    }
}
