//! On-disk artifact schemas shared between the commands that write them
//! and the commands that read them back.

use std::path::Path;

use helix_waves_core::{logistic::LogisticWave, Error, Result};
use serde::{Deserialize, Serialize};

use crate::context::Provenance;

/// One logistic wave as stored in fit artifacts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveJson {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "dt")]
    pub dt: f64,
    #[serde(rename = "d")]
    pub d: f64,
}

impl From<&LogisticWave> for WaveJson {
    fn from(w: &LogisticWave) -> Self {
        Self {
            a: w.a,
            b: w.b,
            c: w.c,
            dt: w.t_shift,
            d: w.d,
        }
    }
}

impl WaveJson {
    pub fn to_wave(&self) -> Result<LogisticWave> {
        LogisticWave::new(self.a, self.b, self.c, self.dt, self.d)
    }
}

/// Iteration summary of a least-squares run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Convergence {
    pub iterations: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

/// A wave decomposition of one series, as written by `fit`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitArtifact {
    pub provenance: Provenance,
    /// Name the series is reported under (the input file stem).
    pub label: String,
    pub population: u64,
    pub days: usize,
    pub waves: Vec<WaveJson>,
    #[serde(default)]
    pub segments: Vec<(usize, usize)>,
    pub residual_rms: f64,
    #[serde(default)]
    pub convergence: Convergence,
}

impl FitArtifact {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidInput(format!("{} is not a fit artifact: {e}", path.display()))
        })
    }

    pub fn to_waves(&self) -> Result<Vec<LogisticWave>> {
        self.waves.iter().map(WaveJson::to_wave).collect()
    }
}

/// One comparison row of the ratio table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRowJson {
    pub country: String,
    /// 1-based wave index within its country (2 = second wave, …).
    pub wave: usize,
    pub time_ratio: f64,
    pub amplitude_ratio: f64,
    /// |time − amplitude| / time.
    pub relative_deviation: f64,
    pub flagged: bool,
}

/// Ratio table plus the correlation between its two columns, as written by
/// `ratios`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatiosArtifact {
    pub provenance: Provenance,
    pub threshold: f64,
    pub rows: Vec<RatioRowJson>,
    pub pearson_r: f64,
    pub flagged: usize,
}

impl RatiosArtifact {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidInput(format!(
                "{} is not a ratios artifact: {e}",
                path.display()
            ))
        })
    }
}

/// Soliton-train resolution report, as written by `kdv train`.
/// All per-soliton arrays run largest soliton first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainArtifact {
    pub provenance: Provenance,
    pub n: usize,
    pub kappa: f64,
    pub sink: f64,
    pub amplitudes: Vec<f64>,
    pub velocities: Vec<f64>,
    pub positions: Vec<f64>,
    pub predicted_amplitudes: Vec<f64>,
    pub predicted_velocities: Vec<f64>,
    pub amplitude_relative_errors: Vec<f64>,
    pub velocity_relative_errors: Vec<f64>,
    /// Largest |u| found away from every crest.
    pub radiation: f64,
}

impl TrainArtifact {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidInput(format!(
                "{} is not a train artifact: {e}",
                path.display()
            ))
        })
    }
}
