//! SPEA2 over base-stock genomes.

mod dominance;
mod engine;
mod selection;
mod variation;

use thiserror::Error;

pub use dominance::{dominates, ObjectiveOrientation, Sense};
pub use engine::{nondominated, run_spea2, Evaluation, Problem, Snapshot, SpeaOutcome, SpeaParams};
pub use selection::{
    assign_fitness, density_neighbour, environmental_selection, normalize, truncate, truncation_order, Individual,
};
pub use variation::{binary_tournament, vary, VariationParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("expected {expected} objectives, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective values must be finite")]
    NonFiniteObjective,
    #[error("cannot select from an empty archive")]
    EmptyArchive,
    #[error("invalid SPEA2 parameters: {0}")]
    InvalidParams(&'static str),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}
