//! Scenario pools and sample-average objective estimates.
//!
//! Scenario `k` of a pool is drawn from its own ChaCha8 stream (`seed`,
//! stream `k`), so a pool's first `m` scenarios do not depend on its size and
//! two pools with the same seed are bit-identical. Estimates are reduced
//! sequentially in scenario order with compensated summation, which keeps
//! them independent of how many threads evaluated the scenarios.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{evaluate_scenario, BaseStock, DemandVector, ModelError, SystemConfig};
use crate::num::{compensated_sum, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("scenario count must be at least 1")]
    ZeroScenarios,
    #[error("scenario pool is empty")]
    EmptyPool,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A fixed set of demand realizations shared by every evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet<T> {
    pub scenarios: Vec<DemandVector<T>>,
    pub seed: u64,
}

impl<T: Real> ScenarioSet<T> {
    /// Wrap explicit scenarios, e.g. hand-built or transformed pools.
    pub fn from_scenarios(scenarios: Vec<DemandVector<T>>, seed: u64) -> Self {
        Self { scenarios, seed }
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Same pool with location `k` of every scenario taken from `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let scenarios = self
            .scenarios
            .iter()
            .map(|d| DemandVector(order.iter().map(|&k| d.values()[k]).collect()))
            .collect();
        Self {
            scenarios,
            seed: self.seed,
        }
    }
}

/// Random generator for scenario `index` of the pool seeded with `seed`.
pub fn scenario_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draw `count` i.i.d. demand vectors. Each component is `mean + std_dev * z`
/// with `z` standard normal, clamped at zero.
pub fn sample_scenarios<T: Real>(
    config: &SystemConfig<T>,
    count: usize,
    seed: u64,
) -> Result<ScenarioSet<T>, SamplingError> {
    if count == 0 {
        return Err(SamplingError::ZeroScenarios);
    }
    let scenarios = (0..count as u64)
        .map(|k| {
            let mut rng = scenario_stream(seed, k);
            let demands = config
                .locations
                .iter()
                .map(|loc| {
                    let z = T::sample_standard_normal(&mut rng);
                    (loc.demand.mean + loc.demand.std_dev * z).max(T::zero())
                })
                .collect();
            DemandVector(demands)
        })
        .collect();
    Ok(ScenarioSet { scenarios, seed })
}

/// Sample means of the three objectives with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveEstimate<T> {
    pub cost_mean: T,
    pub fill_mean: T,
    pub lead_mean: T,
    pub cost_stderr: T,
    pub fill_stderr: T,
    pub lead_stderr: T,
    pub samples: usize,
}

/// Mean and standard error (unbiased variance over `sqrt(N)`).
fn mean_and_stderr<T: Real>(values: impl Iterator<Item = T> + Clone) -> (T, T) {
    let n = values.clone().count();
    let mut probe = values.clone();
    if let Some(first) = probe.next() {
        if probe.all(|v| v == first) {
            return (first, T::zero());
        }
    }
    let count = T::from_usize(n).expect("sample count fits the scalar");
    let mean = compensated_sum(values.clone()) / count;
    if n < 2 {
        return (mean, T::zero());
    }
    let squares = compensated_sum(values.map(|v| (v - mean) * (v - mean)));
    let variance = squares / (count - T::one());
    (mean, (variance / count).sqrt())
}

#[derive(Debug, Clone, Copy)]
struct Sample<T> {
    cost: T,
    fill: T,
    lead: T,
    newsvendor: T,
    income: T,
}

fn evaluate_pool<T: Real>(
    config: &SystemConfig<T>,
    stock: &BaseStock<T>,
    pool: &ScenarioSet<T>,
) -> Result<Vec<Sample<T>>, SamplingError> {
    if pool.is_empty() {
        return Err(SamplingError::EmptyPool);
    }
    let samples = pool
        .scenarios
        .par_iter()
        .with_min_len(64)
        .map(|demand| {
            evaluate_scenario(config, stock, demand).map(|o| Sample {
                cost: o.cost,
                fill: o.fill_rate,
                lead: o.lead_time,
                newsvendor: o.newsvendor_cost,
                income: o.transship_income,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(samples)
}

pub fn estimate_objectives<T: Real>(
    config: &SystemConfig<T>,
    stock: &BaseStock<T>,
    pool: &ScenarioSet<T>,
) -> Result<ObjectiveEstimate<T>, SamplingError> {
    let samples = evaluate_pool(config, stock, pool)?;
    let (cost_mean, cost_stderr) = mean_and_stderr(samples.iter().map(|s| s.cost));
    let (fill_mean, fill_stderr) = mean_and_stderr(samples.iter().map(|s| s.fill));
    let (lead_mean, lead_stderr) = mean_and_stderr(samples.iter().map(|s| s.lead));
    Ok(ObjectiveEstimate {
        cost_mean,
        fill_mean: fill_mean.min(T::one()),
        lead_mean,
        cost_stderr,
        fill_stderr,
        lead_stderr,
        samples: samples.len(),
    })
}

/// Mean newsvendor cost and mean transshipment income over the pool.
pub fn estimate_decomposition<T: Real>(
    config: &SystemConfig<T>,
    stock: &BaseStock<T>,
    pool: &ScenarioSet<T>,
) -> Result<(T, T), SamplingError> {
    let samples = evaluate_pool(config, stock, pool)?;
    let n = T::from_usize(samples.len()).expect("sample count fits the scalar");
    let newsvendor = compensated_sum(samples.iter().map(|s| s.newsvendor)) / n;
    let income = compensated_sum(samples.iter().map(|s| s.income)) / n;
    Ok((newsvendor, income))
}
