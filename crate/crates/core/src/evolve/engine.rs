use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::BaseStock;
use crate::num::Real;

use super::dominance::{nondominated_indices, ObjectiveOrientation};
use super::selection::{assign_fitness, density_neighbour, environmental_selection, Individual};
use super::variation::{binary_tournament, vary, VariationParams};
use super::EvolveError;

/// SPEA2 run parameters. The defaults are the reference setting: archive
/// 100, population 200, 15 generations, 85% crossover, 5% mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeaParams<T> {
    pub population_size: usize,
    pub archive_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Genome bound `S_max`; genes live in `[0, S_max]`.
    pub upper_bound: T,
    pub crossover_index: f64,
    pub mutation_index: f64,
    pub seed: u64,
}

impl<T: Real> Default for SpeaParams<T> {
    fn default() -> Self {
        Self {
            population_size: 200,
            archive_size: 100,
            generations: 15,
            crossover_rate: 0.85,
            mutation_rate: 0.05,
            upper_bound: T::from_f64_lossy(400.0),
            crossover_index: 15.0,
            mutation_index: 20.0,
            seed: 1,
        }
    }
}

impl<T: Real> SpeaParams<T> {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |what: &'static str| Err(EvolveError::InvalidParams(what));
        if self.population_size == 0 {
            return bad("population_size must be at least 1");
        }
        if self.archive_size == 0 {
            return bad("archive_size must be at least 1");
        }
        if self.generations == 0 {
            return bad("generations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate must lie in [0, 1]");
        }
        if !(self.upper_bound.is_finite() && self.upper_bound > T::zero()) {
            return bad("upper bound must be finite and positive");
        }
        if !(self.crossover_index >= 0.0 && self.mutation_index >= 0.0) {
            return bad("distribution indices must be nonnegative");
        }
        Ok(())
    }

    pub fn variation(&self) -> VariationParams<T> {
        VariationParams {
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            crossover_index: self.crossover_index,
            mutation_index: self.mutation_index,
            upper_bound: self.upper_bound,
        }
    }
}

/// Objective values of one genome plus a payload the caller wants back.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T, X> {
    pub objectives: Vec<T>,
    pub extra: X,
}

/// A problem the engine can optimize.
pub trait Problem<T: Real>: Sync {
    type Extra: Clone + Send + Sync;
    type Error: std::error::Error + Send + Sync + 'static;

    /// Number of genes.
    fn dimension(&self) -> usize;

    fn orientation(&self) -> &ObjectiveOrientation;

    fn evaluate(&self, genome: &BaseStock<T>) -> Result<Evaluation<T, Self::Extra>, Self::Error>;

    /// Hook run before generation `generation` is evaluated. Returning `true`
    /// marks previous evaluations stale, so archive members are re-evaluated.
    fn begin_generation(&mut self, generation: usize) -> Result<bool, Self::Error> {
        let _ = generation;
        Ok(false)
    }
}

/// Archive after environmental selection in one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T, X> {
    pub generation: usize,
    pub archive: Vec<Individual<T, X>>,
}

impl<T: Real, X: Clone> Snapshot<T, X> {
    /// Archive members that no other member dominates.
    pub fn front(&self, orient: &ObjectiveOrientation) -> Vec<Individual<T, X>> {
        nondominated(&self.archive, orient)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeaOutcome<T, X> {
    /// Final archive, possibly including dominated fill.
    pub archive: Vec<Individual<T, X>>,
    /// Mutually nondominated members of the final archive.
    pub front: Vec<Individual<T, X>>,
    pub snapshots: Vec<Snapshot<T, X>>,
    pub evaluations: usize,
}

/// Members of `set` not dominated by any other member.
pub fn nondominated<T: Real, X: Clone>(
    set: &[Individual<T, X>],
    orient: &ObjectiveOrientation,
) -> Vec<Individual<T, X>> {
    let points: Vec<Vec<T>> = set.iter().map(|i| orient.to_minimized(&i.objectives)).collect();
    nondominated_indices(&points)
        .into_iter()
        .map(|i| set[i].clone())
        .collect()
}

fn evaluate_all<T: Real, P: Problem<T>>(
    problem: &P,
    genomes: Vec<BaseStock<T>>,
) -> Result<Vec<Individual<T, P::Extra>>, EvolveError> {
    let k = problem.orientation().len();
    genomes
        .into_par_iter()
        .map(|genome| {
            let eval = problem
                .evaluate(&genome)
                .map_err(|e| EvolveError::Evaluation(e.to_string()))?;
            if eval.objectives.len() != k {
                return Err(EvolveError::DimensionMismatch {
                    expected: k,
                    got: eval.objectives.len(),
                });
            }
            if eval.objectives.iter().any(|v| !v.is_finite()) {
                return Err(EvolveError::NonFiniteObjective);
            }
            Ok(Individual::new(genome, eval.objectives, eval.extra))
        })
        .collect()
}

/// Run SPEA2 for `params.generations` generations.
///
/// Each generation evaluates the population, assigns fitness over population
/// and archive, selects the next archive, and (except after the last
/// generation) breeds the next population from archive tournaments. All
/// randomness comes from one ChaCha8 stream seeded with `params.seed` and is
/// consumed sequentially, so results do not depend on thread count.
pub fn run_spea2<T: Real, P: Problem<T>>(
    params: &SpeaParams<T>,
    problem: &mut P,
) -> Result<SpeaOutcome<T, P::Extra>, EvolveError> {
    params.validate()?;
    let orient = problem.orientation().clone();
    let dimension = problem.dimension();
    let k = density_neighbour(params.population_size, params.archive_size);
    let variation = params.variation();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut genomes: Vec<BaseStock<T>> = (0..params.population_size)
        .map(|_| {
            BaseStock(
                (0..dimension)
                    .map(|_| T::sample_unit(&mut rng) * params.upper_bound)
                    .collect(),
            )
        })
        .collect();
    let mut archive: Vec<Individual<T, P::Extra>> = Vec::new();
    let mut snapshots = Vec::with_capacity(params.generations);
    let mut evaluations = 0;

    for generation in 0..params.generations {
        let stale = problem
            .begin_generation(generation)
            .map_err(|e| EvolveError::Evaluation(e.to_string()))?;
        if stale && !archive.is_empty() {
            let members = archive.iter().map(|i| i.genome.clone()).collect();
            archive = evaluate_all(problem, members)?;
            evaluations += archive.len();
        }

        let population = evaluate_all(problem, std::mem::take(&mut genomes))?;
        evaluations += population.len();

        let mut combined = population;
        combined.append(&mut archive);
        assign_fitness(&mut combined, &orient, k);
        archive = environmental_selection(&combined, params.archive_size, &orient);
        snapshots.push(Snapshot {
            generation,
            archive: archive.clone(),
        });

        if generation + 1 < params.generations {
            let mut offspring = Vec::with_capacity(params.population_size + 1);
            while offspring.len() < params.population_size {
                let a = binary_tournament(&archive, &mut rng)?.genome.clone();
                let b = binary_tournament(&archive, &mut rng)?.genome.clone();
                let (c, d) = vary((&a, &b), &variation, &mut rng);
                offspring.push(c);
                offspring.push(d);
            }
            offspring.truncate(params.population_size);
            genomes = offspring;
        }
    }

    let front = nondominated(&archive, &orient);
    Ok(SpeaOutcome {
        archive,
        front,
        snapshots,
        evaluations,
    })
}
