//! Experiment harness: configuration files, built-in systems, landscape
//! sampling, optimization runs and front export.

mod config;
mod export;
mod run;

use thiserror::Error;

use crate::evolve::EvolveError;
use crate::model::ConfigError;
use crate::sampling::SamplingError;

pub use config::{
    load_experiment, parse_experiment, preset, ExperimentSpec, ObjectiveKind, ObjectiveSubset, DEFAULT_SCENARIOS,
    DEFAULT_SCENARIO_SEED, PRESETS,
};
pub use export::{
    export_front, format_value, front_header, parse_front, render_front, render_solutions, sort_records,
    summarize_front, Front, FrontRecord, FrontSummary, ObjectiveExtent,
};
pub use run::{
    generation_seed, render_landscape, run_experiment, run_problem, sample_landscape, write_outputs, Estimator,
    ExperimentResult, LandscapeDesign, LandscapeRow, TransshipProblem,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid system: {0}")]
    Config(#[from] ConfigError),
    #[error("unknown preset `{0}` (expected one of table1, s1, s2, s3, s4)")]
    UnknownPreset(String),
    #[error("invalid objectives: {0}")]
    Objectives(String),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

impl ExperimentError {
    /// Process exit status: 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) | Self::Config(_) | Self::UnknownPreset(_) | Self::Objectives(_) | Self::Invalid(_) => 1,
            Self::Evolve(EvolveError::InvalidParams(_)) => 1,
            Self::Io(_) | Self::Sampling(_) | Self::Evolve(_) => 2,
        }
    }
}
