//! Multiobjective base-stock optimization for multi-location inventory
//! systems with lateral transshipments.
//!
//! The numerical core is generic over the scalar type: [`transship`] and
//! [`model`] work on any [`num::Scalar`] (including exact rationals), while
//! [`sampling`] and [`evolve`] need a floating-point [`num::Real`]. The
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod evolve;
pub mod experiment;
pub mod model;
pub mod num;
pub mod sampling;
pub mod transship;

pub use model::{
    classify_inventory, evaluate_scenario, validate_config, BaseStock, DemandSpec, DemandVector, LocationParams,
    ScenarioOutcome, SystemConfig,
};
pub use num::{Real, Scalar};
pub use sampling::{estimate_decomposition, estimate_objectives, sample_scenarios, ObjectiveEstimate, ScenarioSet};
pub use transship::{brute_force_transshipment, check_feasible, solve_transshipment, TransshipmentPlan};

/// Exact rational scalar for verification work.
pub type Rational = num_rational::BigRational;

pub type System = SystemConfig<f64>;
pub type Stock = BaseStock<f64>;
pub type Demand = DemandVector<f64>;
pub type Outcome = ScenarioOutcome<f64>;
pub type Plan = TransshipmentPlan<f64>;
pub type Pool = ScenarioSet<f64>;
pub type Estimate = ObjectiveEstimate<f64>;
pub type RationalSystem = SystemConfig<Rational>;
pub type RationalPlan = TransshipmentPlan<Rational>;
