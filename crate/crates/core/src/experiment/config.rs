//! Experiment files and built-in systems.
//!
//! An experiment file is TOML with three sections:
//!
//! ```toml
//! [system]
//! preset = "table1"          # or give `locations`, `tau` and `lead` explicitly
//! # period_duration = 10.0   # defaults to the longest lead time plus one
//!
//! # [[system.locations]]
//! # holding_cost = 3.0
//! # shortage_cost = 2.0
//! # demand = { mean = 100.0, std_dev = 20.0 }
//! # tau  = [[0.0, 0.5], [0.5, 0.0]]
//! # lead = [[0.0, 5.0], [5.0, 0.0]]
//!
//! [spea]                     # every key optional
//! population_size = 200
//! archive_size = 100
//! generations = 15
//! crossover_rate = 0.85
//! mutation_rate = 0.05
//! s_max = 400.0
//! crossover_index = 15.0
//! mutation_index = 20.0
//! seed = 1
//!
//! [run]                      # every key optional
//! objectives = ["cost", "fill"]
//! scenarios = 500
//! scenario_seed = 42
//! resample_per_generation = false
//! output_dir = "out"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde::Deserialize;

use crate::evolve::{ObjectiveOrientation, Sense, SpeaParams};
use crate::model::{DemandSpec, LocationParams, SystemConfig};
use crate::sampling::ObjectiveEstimate;

use super::ExperimentError;

pub const DEFAULT_SCENARIOS: usize = 500;
pub const DEFAULT_SCENARIO_SEED: u64 = 42;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["table1", "s1", "s2", "s3", "s4"];

/// Two symmetric locations with `N(mean, std_dev)` demand, unit transshipment
/// cost `tau` and lead time 5 on both routes.
fn symmetric_pair(holding: f64, shortage: f64, mean: f64, std_dev: f64, tau: f64) -> SystemConfig<f64> {
    let loc = LocationParams {
        holding_cost: holding,
        shortage_cost: shortage,
        demand: DemandSpec { mean, std_dev },
    };
    SystemConfig::new(
        vec![loc.clone(), loc],
        Array2::from_shape_fn((2, 2), |(i, j)| if i == j { 0.0 } else { tau }),
        Array2::from_shape_fn((2, 2), |(i, j)| if i == j { 0.0 } else { 5.0 }),
        None,
    )
    .expect("built-in systems are valid")
}

/// Built-in two-location systems.
pub fn preset(name: &str) -> Result<SystemConfig<f64>, ExperimentError> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "table1" => symmetric_pair(3.0, 2.0, 100.0, 20.0, 0.5),
        "s1" => symmetric_pair(4.0, 1.0, 100.0, 20.0, 0.5),
        "s2" => symmetric_pair(1.0, 4.0, 100.0, 20.0, 0.5),
        "s3" => symmetric_pair(1.0, 2.0, 100.0, 80.0, 0.5),
        "s4" => symmetric_pair(1.0, 2.0, 100.0, 5.0, 0.5),
        _ => return Err(ExperimentError::UnknownPreset(name.to_string())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectiveKind {
    Cost,
    Fill,
    Lead,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cost => "cost",
            Self::Fill => "fill",
            Self::Lead => "lead",
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            Self::Fill => Sense::Maximize,
            Self::Cost | Self::Lead => Sense::Minimize,
        }
    }

    pub fn mean(self, est: &ObjectiveEstimate<f64>) -> f64 {
        match self {
            Self::Cost => est.cost_mean,
            Self::Fill => est.fill_mean,
            Self::Lead => est.lead_mean,
        }
    }

    pub fn stderr(self, est: &ObjectiveEstimate<f64>) -> f64 {
        match self {
            Self::Cost => est.cost_stderr,
            Self::Fill => est.fill_stderr,
            Self::Lead => est.lead_stderr,
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cost" | "c" => Ok(Self::Cost),
            "fill" | "fill_rate" | "f" => Ok(Self::Fill),
            "lead" | "lead_time" | "l" => Ok(Self::Lead),
            other => Err(ExperimentError::Objectives(format!("unknown objective `{other}`"))),
        }
    }
}

/// Two or three distinct objectives, kept in cost, fill, lead order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveSubset(Vec<ObjectiveKind>);

impl ObjectiveSubset {
    pub fn new(mut kinds: Vec<ObjectiveKind>) -> Result<Self, ExperimentError> {
        kinds.sort();
        kinds.dedup();
        if kinds.len() < 2 {
            return Err(ExperimentError::Objectives(
                "at least two distinct objectives are required".to_string(),
            ));
        }
        Ok(Self(kinds))
    }

    pub fn all() -> Self {
        Self(vec![ObjectiveKind::Cost, ObjectiveKind::Fill, ObjectiveKind::Lead])
    }

    pub fn kinds(&self) -> &[ObjectiveKind] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn orientation(&self) -> ObjectiveOrientation {
        ObjectiveOrientation::new(self.0.iter().map(|k| k.sense()).collect())
    }

    /// Selected means only; unselected fields are never read.
    pub fn project(&self, est: &ObjectiveEstimate<f64>) -> Vec<f64> {
        self.0.iter().map(|k| k.mean(est)).collect()
    }

    pub fn project_stderr(&self, est: &ObjectiveEstimate<f64>) -> Vec<f64> {
        self.0.iter().map(|k| k.stderr(est)).collect()
    }

    /// Short label such as `C/F`.
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|k| k.name()[..1].to_ascii_uppercase())
            .collect::<Vec<_>>()
            .join("/")
    }
}

impl FromStr for ObjectiveSubset {
    type Err = ExperimentError;

    /// Accepts `cost,fill`, `C/F`, `c,f,l` and similar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kinds = s
            .split([',', '/'])
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(kinds)
    }
}

impl fmt::Display for ObjectiveSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.iter().map(|k| k.name()).collect();
        f.write_str(&names.join(","))
    }
}

/// Everything needed to run one optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub system: SystemConfig<f64>,
    pub spea: SpeaParams<f64>,
    pub objectives: ObjectiveSubset,
    pub scenarios: usize,
    pub scenario_seed: u64,
    /// Draw a fresh scenario pool every generation instead of one shared pool.
    pub resample_per_generation: bool,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Reference SPEA2 settings and all three objectives on `system`.
    pub fn with_system(system: SystemConfig<f64>) -> Self {
        Self {
            system,
            spea: SpeaParams::default(),
            objectives: ObjectiveSubset::all(),
            scenarios: DEFAULT_SCENARIOS,
            scenario_seed: DEFAULT_SCENARIO_SEED,
            resample_per_generation: false,
            output_dir: None,
        }
    }

    pub fn from_preset(name: &str) -> Result<Self, ExperimentError> {
        Ok(Self::with_system(preset(name)?))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.spea.validate()?;
        if self.scenarios == 0 {
            return Err(ExperimentError::Invalid("scenarios must be at least 1".to_string()));
        }
        if self.objectives.len() < 2 {
            return Err(ExperimentError::Objectives(
                "at least two objectives are required".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    system: SystemSection,
    #[serde(default)]
    spea: SpeaSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    preset: Option<String>,
    locations: Option<Vec<LocationEntry>>,
    tau: Option<Vec<Vec<f64>>>,
    lead: Option<Vec<Vec<f64>>>,
    period_duration: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocationEntry {
    holding_cost: f64,
    shortage_cost: f64,
    demand: DemandEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandEntry {
    mean: f64,
    std_dev: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeaSection {
    population_size: Option<usize>,
    archive_size: Option<usize>,
    generations: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    s_max: Option<f64>,
    crossover_index: Option<f64>,
    mutation_index: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    objectives: Option<Vec<String>>,
    scenarios: Option<usize>,
    scenario_seed: Option<u64>,
    resample_per_generation: Option<bool>,
    output_dir: Option<PathBuf>,
}

fn matrix(name: &'static str, rows: Vec<Vec<f64>>, n: usize) -> Result<Array2<f64>, ExperimentError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(ExperimentError::Invalid(format!("matrix `{name}` must be {n}x{n}")));
    }
    Ok(Array2::from_shape_vec((n, n), rows.into_iter().flatten().collect()).expect("shape checked"))
}

fn build_system(section: SystemSection) -> Result<SystemConfig<f64>, ExperimentError> {
    match (section.preset, section.locations) {
        (Some(_), Some(_)) => Err(ExperimentError::Invalid(
            "give either `system.preset` or `system.locations`, not both".to_string(),
        )),
        (None, None) => Err(ExperimentError::Invalid(
            "`system` needs a `preset` or a `locations` list".to_string(),
        )),
        (Some(name), None) => {
            if section.tau.is_some() || section.lead.is_some() {
                return Err(ExperimentError::Invalid(
                    "`tau` and `lead` cannot be combined with a preset".to_string(),
                ));
            }
            let base = preset(&name)?;
            match section.period_duration {
                None => Ok(base),
                Some(p) => Ok(SystemConfig::new(
                    base.locations,
                    base.transship_cost,
                    base.lead_time,
                    Some(p),
                )?),
            }
        }
        (None, Some(entries)) => {
            let n = entries.len();
            let locations = entries
                .into_iter()
                .map(|e| LocationParams {
                    holding_cost: e.holding_cost,
                    shortage_cost: e.shortage_cost,
                    demand: DemandSpec {
                        mean: e.demand.mean,
                        std_dev: e.demand.std_dev,
                    },
                })
                .collect();
            let tau = section
                .tau
                .ok_or_else(|| ExperimentError::Invalid("missing matrix `tau`".to_string()))?;
            let lead = section
                .lead
                .ok_or_else(|| ExperimentError::Invalid("missing matrix `lead`".to_string()))?;
            Ok(SystemConfig::new(
                locations,
                matrix("tau", tau, n)?,
                matrix("lead", lead, n)?,
                section.period_duration,
            )?)
        }
    }
}

/// Parse and validate an experiment from TOML text.
pub fn parse_experiment(text: &str) -> Result<ExperimentSpec, ExperimentError> {
    let file: ExperimentFile = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    let system = build_system(file.system)?;

    let defaults = SpeaParams::<f64>::default();
    let s = file.spea;
    let spea = SpeaParams {
        population_size: s.population_size.unwrap_or(defaults.population_size),
        archive_size: s.archive_size.unwrap_or(defaults.archive_size),
        generations: s.generations.unwrap_or(defaults.generations),
        crossover_rate: s.crossover_rate.unwrap_or(defaults.crossover_rate),
        mutation_rate: s.mutation_rate.unwrap_or(defaults.mutation_rate),
        upper_bound: s.s_max.unwrap_or(defaults.upper_bound),
        crossover_index: s.crossover_index.unwrap_or(defaults.crossover_index),
        mutation_index: s.mutation_index.unwrap_or(defaults.mutation_index),
        seed: s.seed.unwrap_or(defaults.seed),
    };

    let r = file.run;
    let objectives = match r.objectives {
        None => ObjectiveSubset::all(),
        Some(names) => ObjectiveSubset::new(names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?)?,
    };
    let spec = ExperimentSpec {
        system,
        spea,
        objectives,
        scenarios: r.scenarios.unwrap_or(DEFAULT_SCENARIOS),
        scenario_seed: r.scenario_seed.unwrap_or(DEFAULT_SCENARIO_SEED),
        resample_per_generation: r.resample_per_generation.unwrap_or(false),
        output_dir: r.output_dir,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_experiment(path: impl AsRef<Path>) -> Result<ExperimentSpec, ExperimentError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    parse_experiment(&text)
}
