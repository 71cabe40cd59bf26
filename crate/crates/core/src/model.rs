//! System configuration and exact single-period evaluation.
//!
//! Under an order-up-to policy with lost sales every period opens with
//! inventory exactly `S`, so one period tells the whole story: demand is
//! served locally, surpluses are pooled to shortages through the
//! transshipment LP, and the period closes with holding and penalty charges.

use ndarray::Array2;
use thiserror::Error;

use crate::num::Scalar;
use crate::transship::{solve_transshipment, TransshipError, TransshipmentPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("system must have at least one location")]
    NoLocations,
    #[error("location {location}: {field} must be finite and nonnegative")]
    InvalidLocationParam { location: usize, field: &'static str },
    #[error("matrix `{name}` must be {n}x{n}, got {rows}x{cols}")]
    MatrixShape {
        name: &'static str,
        n: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix `{name}` entry ({i}, {j}) must be finite and nonnegative")]
    InvalidMatrixEntry { name: &'static str, i: usize, j: usize },
    #[error("lead time ({i}, {j}) must be shorter than the period duration")]
    LeadTimeTooLong { i: usize, j: usize },
    #[error("period duration must be finite and positive")]
    InvalidPeriod,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{what} has {got} entries but the system has {expected} locations")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("base-stock level {index} is outside [0, {upper}]")]
    LevelOutOfBounds { index: usize, upper: f64 },
    #[error("demand {index} is negative or non-finite")]
    InvalidDemand { index: usize },
    #[error("transshipment solve failed: {0}")]
    Solver(#[from] TransshipError),
}

/// Demand at one location: a normal distribution censored at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSpec<T> {
    pub mean: T,
    pub std_dev: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationParams<T> {
    /// Charge per unsold unit left at the end of the period.
    pub holding_cost: T,
    /// Charge per unit of demand that is still unmet after transshipment.
    pub shortage_cost: T,
    pub demand: DemandSpec<T>,
}

/// An `n`-location system. Diagonals of `transship_cost` and `lead_time` are
/// never read: a location is never both a sender and a receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    pub locations: Vec<LocationParams<T>>,
    pub transship_cost: Array2<T>,
    pub lead_time: Array2<T>,
    pub period_duration: T,
}

impl<T: Scalar> SystemConfig<T> {
    /// Build and validate a system. When `period_duration` is `None` it
    /// defaults to the largest lead time plus one.
    pub fn new(
        locations: Vec<LocationParams<T>>,
        transship_cost: Array2<T>,
        lead_time: Array2<T>,
        period_duration: Option<T>,
    ) -> Result<Self, ConfigError> {
        let period_duration =
            period_duration.unwrap_or_else(|| lead_time.iter().cloned().fold(T::zero(), T::max_of) + T::one());
        validate_config(Self {
            locations,
            transship_cost,
            lead_time,
            period_duration,
        })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Per-unit income `h_i + p_j - tau_ij` of each route, zero on the diagonal.
    pub fn route_profit(&self) -> Array2<T> {
        let n = self.len();
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                T::zero()
            } else {
                self.locations[i].holding_cost.clone() + self.locations[j].shortage_cost.clone()
                    - self.transship_cost[[i, j]].clone()
            }
        })
    }

    /// Reorder locations: new location `k` is old location `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = self.len();
        assert_eq!(order.len(), n, "permutation length");
        let pick = |m: &Array2<T>| Array2::from_shape_fn((n, n), |(i, j)| m[[order[i], order[j]]].clone());
        Self {
            locations: order.iter().map(|&k| self.locations[k].clone()).collect(),
            transship_cost: pick(&self.transship_cost),
            lead_time: pick(&self.lead_time),
            period_duration: self.period_duration.clone(),
        }
    }
}

fn nonneg_finite<T: Scalar>(v: &T) -> bool {
    v.is_finite_value() && !v.is_negative()
}

/// Returns `config` unchanged if every invariant holds, otherwise the first
/// violation found.
pub fn validate_config<T: Scalar>(config: SystemConfig<T>) -> Result<SystemConfig<T>, ConfigError> {
    let n = config.len();
    if n == 0 {
        return Err(ConfigError::NoLocations);
    }
    for (location, loc) in config.locations.iter().enumerate() {
        let fields = [
            ("holding_cost", &loc.holding_cost),
            ("shortage_cost", &loc.shortage_cost),
            ("demand.mean", &loc.demand.mean),
            ("demand.std_dev", &loc.demand.std_dev),
        ];
        for (field, value) in fields {
            if !nonneg_finite(value) {
                return Err(ConfigError::InvalidLocationParam { location, field });
            }
        }
    }
    if !config.period_duration.is_finite_value() || !config.period_duration.is_positive() {
        return Err(ConfigError::InvalidPeriod);
    }
    for (name, m) in [("tau", &config.transship_cost), ("lead", &config.lead_time)] {
        let (rows, cols) = m.dim();
        if rows != n || cols != n {
            return Err(ConfigError::MatrixShape { name, n, rows, cols });
        }
        if let Some(((i, j), _)) = m.indexed_iter().find(|(_, v)| !nonneg_finite(*v)) {
            return Err(ConfigError::InvalidMatrixEntry { name, i, j });
        }
    }
    for ((i, j), l) in config.lead_time.indexed_iter() {
        if i != j && *l >= config.period_duration {
            return Err(ConfigError::LeadTimeTooLong { i, j });
        }
    }
    Ok(config)
}

/// Order-up-to levels, one per location.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseStock<T>(pub Vec<T>);

impl<T: Scalar> BaseStock<T> {
    /// Checked constructor enforcing `0 <= S_i <= upper`.
    pub fn bounded(levels: Vec<T>, upper: T) -> Result<Self, ModelError> {
        for (index, s) in levels.iter().enumerate() {
            if !s.is_finite_value() || s.is_negative() || *s > upper {
                return Err(ModelError::LevelOutOfBounds {
                    index,
                    upper: upper.to_f64_lossy(),
                });
            }
        }
        Ok(Self(levels))
    }

    pub fn levels(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One realized demand per location.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector<T>(pub Vec<T>);

impl<T: Scalar> DemandVector<T> {
    pub fn new(demands: Vec<T>) -> Result<Self, ModelError> {
        if let Some(index) = demands.iter().position(|d| !nonneg_finite(d)) {
            return Err(ModelError::InvalidDemand { index });
        }
        Ok(Self(demands))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Split end-of-demand inventory into per-location surplus and shortage.
/// A location never has both.
pub fn classify_inventory<T: Scalar>(
    stock: &BaseStock<T>,
    demand: &DemandVector<T>,
) -> Result<(Vec<T>, Vec<T>), ModelError> {
    if stock.len() != demand.len() {
        return Err(ModelError::LengthMismatch {
            what: "demand vector",
            expected: stock.len(),
            got: demand.len(),
        });
    }
    let (surplus, shortage) = stock
        .levels()
        .iter()
        .zip(demand.values())
        .map(|(s, d)| {
            let net = s.clone() - d.clone();
            if net.is_positive() {
                (net, T::zero())
            } else {
                (T::zero(), -net)
            }
        })
        .unzip();
    Ok((surplus, shortage))
}

/// Everything one period produces for a given stock and demand.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome<T> {
    /// Holding plus penalty cost after transshipment.
    pub cost: T,
    /// Fraction of demand served locally or by transshipment.
    pub fill_rate: T,
    /// Sum of shipped units times route lead time.
    pub lead_time: T,
    pub plan: TransshipmentPlan<T>,
    /// Holding plus penalty cost before any transshipment.
    pub newsvendor_cost: T,
    /// Cost saved by transshipment; equals `plan.objective_value`.
    pub transship_income: T,
}

pub fn evaluate_scenario<T: Scalar>(
    config: &SystemConfig<T>,
    stock: &BaseStock<T>,
    demand: &DemandVector<T>,
) -> Result<ScenarioOutcome<T>, ModelError> {
    let n = config.len();
    if stock.len() != n {
        return Err(ModelError::LengthMismatch {
            what: "base stock",
            expected: n,
            got: stock.len(),
        });
    }
    let (surplus, shortage) = classify_inventory(stock, demand)?;

    let newsvendor_cost =
        config
            .locations
            .iter()
            .zip(surplus.iter().zip(&shortage))
            .fold(T::zero(), |acc, (loc, (over, under))| {
                acc + loc.holding_cost.clone() * over.clone() + loc.shortage_cost.clone() * under.clone()
            });

    let plan = solve_transshipment(&config.route_profit(), &surplus, &shortage)?;
    let transship_income = plan.objective_value.clone();
    let cost = newsvendor_cost.clone() - transship_income.clone();

    let total_demand = demand.values().iter().fold(T::zero(), |acc, d| acc + d.clone());
    let fill_rate = if total_demand.is_zero() {
        T::one()
    } else {
        let served = (0..n).fold(T::zero(), |acc, j| {
            let available = stock.levels()[j].clone() + plan.inbound(j);
            acc + T::min_of(demand.values()[j].clone(), available)
        });
        served / total_demand
    };

    let lead_time = plan
        .quantities
        .iter()
        .zip(config.lead_time.iter())
        .filter(|(q, _)| !q.is_zero())
        .fold(T::zero(), |acc, (q, l)| acc + q.clone() * l.clone());

    Ok(ScenarioOutcome {
        cost,
        fill_rate,
        lead_time,
        plan,
        newsvendor_cost,
        transship_income,
    })
}
