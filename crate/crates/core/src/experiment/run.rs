use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evolve::{run_spea2, Evaluation, ObjectiveOrientation, Problem};
use crate::model::{BaseStock, SystemConfig};
use crate::num::Real;
use crate::sampling::{estimate_objectives, sample_scenarios, ObjectiveEstimate, SamplingError, ScenarioSet};

use super::config::{ExperimentSpec, ObjectiveSubset};
use super::export::{format_value, render_front, render_solutions, summarize_front, Front, FrontSummary};
use super::ExperimentError;

/// Signature of the objective estimator a [`TransshipProblem`] calls.
pub type Estimator =
    fn(&SystemConfig<f64>, &BaseStock<f64>, &ScenarioSet<f64>) -> Result<ObjectiveEstimate<f64>, SamplingError>;

/// Seed of the pool used in `generation` when resampling every generation.
pub fn generation_seed(base: u64, generation: usize) -> u64 {
    if generation == 0 {
        base
    } else {
        base ^ (generation as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// Base-stock optimization over a scenario pool, restricted to a subset of
/// the three objectives.
pub struct TransshipProblem {
    system: SystemConfig<f64>,
    objectives: ObjectiveSubset,
    orientation: ObjectiveOrientation,
    pool: ScenarioSet<f64>,
    scenarios: usize,
    seed: u64,
    resample: bool,
    estimator: Estimator,
}

impl TransshipProblem {
    pub fn new(spec: &ExperimentSpec) -> Result<Self, ExperimentError> {
        let pool = sample_scenarios(&spec.system, spec.scenarios, spec.scenario_seed)?;
        Ok(Self {
            system: spec.system.clone(),
            objectives: spec.objectives.clone(),
            orientation: spec.objectives.orientation(),
            pool,
            scenarios: spec.scenarios,
            seed: spec.scenario_seed,
            resample: spec.resample_per_generation,
            estimator: estimate_objectives::<f64>,
        })
    }

    /// Replace the estimator, e.g. to instrument or perturb it in tests.
    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn pool(&self) -> &ScenarioSet<f64> {
        &self.pool
    }
}

impl Problem<f64> for TransshipProblem {
    type Extra = ObjectiveEstimate<f64>;
    type Error = SamplingError;

    fn dimension(&self) -> usize {
        self.system.len()
    }

    fn orientation(&self) -> &ObjectiveOrientation {
        &self.orientation
    }

    fn evaluate(&self, genome: &BaseStock<f64>) -> Result<Evaluation<f64, Self::Extra>, SamplingError> {
        let estimate = (self.estimator)(&self.system, genome, &self.pool)?;
        Ok(Evaluation {
            objectives: self.objectives.project(&estimate),
            extra: estimate,
        })
    }

    fn begin_generation(&mut self, generation: usize) -> Result<bool, SamplingError> {
        if !self.resample || generation == 0 {
            return Ok(false);
        }
        self.pool = sample_scenarios(&self.system, self.scenarios, generation_seed(self.seed, generation))?;
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub front: Front,
    /// Nondominated archive members after each generation.
    pub snapshots: Vec<Front>,
    pub summary: FrontSummary,
    pub evaluations: usize,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    run_problem(spec, TransshipProblem::new(spec)?)
}

/// Run SPEA2 on an explicitly constructed problem.
pub fn run_problem(spec: &ExperimentSpec, mut problem: TransshipProblem) -> Result<ExperimentResult, ExperimentError> {
    spec.validate()?;
    let outcome = run_spea2(&spec.spea, &mut problem)?;
    let orient = spec.objectives.orientation();
    let last = spec.spea.generations - 1;
    let front = Front::from_individuals(&spec.objectives, &outcome.front, last);
    let snapshots = outcome
        .snapshots
        .iter()
        .map(|s| Front::from_individuals(&spec.objectives, &s.front(&orient), s.generation))
        .collect();
    let summary = summarize_front(&front);
    Ok(ExperimentResult {
        front,
        snapshots,
        summary,
        evaluations: outcome.evaluations,
    })
}

fn write_file(path: &Path, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    written.push(path.to_path_buf());
    Ok(())
}

fn write_all(result: &ExperimentResult, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), ExperimentError> {
    if result.front.is_empty() {
        return Err(ExperimentError::Invalid("cannot export an empty front".to_string()));
    }
    let io = |p: &Path, e: std::io::Error| ExperimentError::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    write_file(&dir.join("front.csv"), &render_front(&result.front), written)?;
    write_file(&dir.join("solutions.csv"), &render_solutions(&result.front), written)?;
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| io(&snap_dir, e))?;
    for snap in &result.snapshots {
        let generation = snap.records.first().map_or(0, |r| r.generation);
        write_file(
            &snap_dir.join(format!("gen_{generation}.csv")),
            &render_front(snap),
            written,
        )?;
    }
    let summary = format!("{}evaluations: {}\n", result.summary, result.evaluations);
    write_file(&dir.join("summary.txt"), &summary, written)
}

/// Write `front.csv`, `solutions.csv`, `snapshots/gen_<t>.csv` and
/// `summary.txt` under `dir`. Files written before a failure are removed.
pub fn write_outputs(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<(), ExperimentError> {
    let mut written = Vec::new();
    let outcome = write_all(result, dir.as_ref(), &mut written);
    if outcome.is_err() {
        for path in written {
            let _ = fs::remove_file(path);
        }
    }
    outcome
}

/// How landscape points are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LandscapeDesign {
    /// `count` points uniform on `[0, S_max]^n`.
    Random { count: usize, seed: u64 },
    /// A regular grid with `points_per_axis` levels per location, ends included.
    Grid { points_per_axis: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeRow {
    pub stock: BaseStock<f64>,
    pub estimate: ObjectiveEstimate<f64>,
}

fn landscape_points(design: LandscapeDesign, n: usize, upper: f64) -> Result<Vec<Vec<f64>>, ExperimentError> {
    match design {
        LandscapeDesign::Random { count, seed } => {
            if count == 0 {
                return Err(ExperimentError::Invalid(
                    "landscape sample count must be at least 1".to_string(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| (0..n).map(|_| f64::sample_unit(&mut rng) * upper).collect())
                .collect())
        }
        LandscapeDesign::Grid { points_per_axis } => {
            if points_per_axis < 2 {
                return Err(ExperimentError::Invalid(
                    "a grid needs at least 2 points per axis".to_string(),
                ));
            }
            let step = upper / (points_per_axis - 1) as f64;
            let total = points_per_axis
                .checked_pow(n as u32)
                .ok_or_else(|| ExperimentError::Invalid("grid too large".to_string()))?;
            Ok((0..total)
                .map(|mut idx| {
                    let mut point = vec![0.0; n];
                    for slot in point.iter_mut().rev() {
                        *slot = (idx % points_per_axis) as f64 * step;
                        idx /= points_per_axis;
                    }
                    point
                })
                .collect())
        }
    }
}

/// Estimate all three objectives at many base-stock levels over the experiment's
/// common scenario pool.
pub fn sample_landscape(spec: &ExperimentSpec, design: LandscapeDesign) -> Result<Vec<LandscapeRow>, ExperimentError> {
    let pool = sample_scenarios(&spec.system, spec.scenarios, spec.scenario_seed)?;
    landscape_points(design, spec.system.len(), spec.spea.upper_bound)?
        .into_iter()
        .map(|levels| {
            let stock = BaseStock(levels);
            let estimate = estimate_objectives(&spec.system, &stock, &pool)?;
            Ok(LandscapeRow { stock, estimate })
        })
        .collect()
}

pub fn render_landscape(rows: &[LandscapeRow]) -> String {
    let n = rows.first().map_or(0, |r| r.stock.len());
    let mut header: Vec<String> = (1..=n).map(|i| format!("S_{i}")).collect();
    header.extend(["cost", "fill", "lead", "cost_stderr", "fill_stderr", "lead_stderr"].map(String::from));
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let e = &r.estimate;
        let cells: Vec<String> = r
            .stock
            .levels()
            .iter()
            .chain(&[
                e.cost_mean,
                e.fill_mean,
                e.lead_mean,
                e.cost_stderr,
                e.fill_stderr,
                e.lead_stderr,
            ])
            .map(|&v| format_value(v))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
