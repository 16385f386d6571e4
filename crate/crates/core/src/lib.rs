//! helix-waves numerical core.
//!
//! The crate bundles the quantitative machinery behind an
//! information-dynamics pipeline for epidemic time series and related
//! model systems:
//!
//! - [`ingest`] — loading reported case counts into clean daily series,
//!   normalising them to probability scale, and a canonical TSV exchange
//!   format;
//! - [`infotheory`] — Shannon entropies over three-way contingency cubes
//!   and the signed mutual redundancy that measures synergy vs. redundancy
//!   among three categorical variables;
//! - [`oscillator`] — cross-coupled probability oscillators with conserved
//!   quadratic and cubic diagnostics;
//! - [`kdv`] — a pseudo-spectral Korteweg–de Vries solver, analytic soliton
//!   profiles with a constant-sink modification, soliton-train
//!   decomposition, and the map from a soliton pulse to a logistic
//!   (sigmoid) growth curve;
//! - [`logistic`] — multi-wave logistic decomposition of cumulative
//!   epidemic curves via segmentation plus damped Gauss–Newton fitting;
//! - [`analysis`] — per-wave time/amplitude ratio tables, Pearson
//!   correlation, and model-consistency flags;
//! - [`sir`] — a classical SIR integrator and the single-logistic
//!   reduction check;
//! - [`reference`] — bundled multi-wave parameter sets for eight national
//!   Covid-19 case series, used as fixtures and for synthetic data.

pub mod analysis;
pub mod error;
pub mod infotheory;
pub mod ingest;
pub mod kdv;
pub mod logistic;
pub mod oscillator;
pub mod reference;
pub mod rk4;
pub mod sir;

pub use analysis::{ConsistencyReport, RatioRow};
pub use error::{Error, Result};
pub use infotheory::{ContingencyCube, RedundancyReport};
pub use ingest::{CleaningReport, ColumnMap, SeriesKind, TimeSeries};
pub use kdv::{KdvConfig, KdvState, SolitonSpec, TrainReport};
pub use logistic::{CompositeFit, FitConfig, LogisticWave};
pub use oscillator::{OscillatorConfig, Trajectory};
pub use sir::{ReductionReport, SirConfig, SirTrajectory};
