//! Fitness assignment and archive maintenance.
//!
//! Strength of `i` is the number of individuals it dominates; raw fitness
//! sums the strengths of everyone dominating `i`; density is
//! `1 / (sigma_k + 2)` with `sigma_k` the distance to the `k`-th nearest
//! neighbour in min-max normalized objective space. Fitness is minimized,
//! and it is below one exactly for nondominated individuals.

use std::cmp::Ordering;

use crate::model::BaseStock;
use crate::num::Real;

use super::dominance::{dominates_minimized, ObjectiveOrientation};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual<T, X = ()> {
    pub genome: BaseStock<T>,
    /// Objective values in their natural orientation.
    pub objectives: Vec<T>,
    /// Evaluator payload carried alongside the objectives.
    pub extra: X,
    pub raw_fitness: T,
    pub density: T,
    pub fitness: T,
}

impl<T: Real, X> Individual<T, X> {
    pub fn new(genome: BaseStock<T>, objectives: Vec<T>, extra: X) -> Self {
        Self {
            genome,
            objectives,
            extra,
            raw_fitness: T::zero(),
            density: T::zero(),
            fitness: T::zero(),
        }
    }

    pub fn is_nondominated(&self) -> bool {
        self.fitness < T::one()
    }
}

/// Neighbourhood size `floor(sqrt(population + archive))`.
pub fn density_neighbour(population_size: usize, archive_size: usize) -> usize {
    ((population_size + archive_size) as f64).sqrt().floor() as usize
}

/// Min-max normalize each objective over the set; constant objectives map to 0.
pub fn normalize<T: Real>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let dims = first.len();
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in points {
        for d in 0..dims {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    points
        .iter()
        .map(|p| {
            (0..dims)
                .map(|d| {
                    let range = hi[d] - lo[d];
                    if range > T::zero() {
                        (p[d] - lo[d]) / range
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

fn distance_matrix<T: Real>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = points.len();
    let mut m = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&points[i], &points[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

fn minimized_objectives<T: Real, X>(individuals: &[Individual<T, X>], orient: &ObjectiveOrientation) -> Vec<Vec<T>> {
    individuals
        .iter()
        .map(|ind| orient.to_minimized(&ind.objectives))
        .collect()
}

/// Set `raw_fitness`, `density` and `fitness` on every individual of the
/// combined population and archive.
pub fn assign_fitness<T: Real, X>(individuals: &mut [Individual<T, X>], orient: &ObjectiveOrientation, k: usize) {
    let points = minimized_objectives(individuals, orient);
    let n = points.len();
    let dominance: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| dominates_minimized(&points[i], &points[j])).collect())
        .collect();
    let strength: Vec<usize> = dominance.iter().map(|row| row.iter().filter(|&&d| d).count()).collect();

    let distances = distance_matrix(&normalize(&points));
    for (i, ind) in individuals.iter_mut().enumerate() {
        let raw: usize = (0..n).filter(|&j| dominance[j][i]).map(|j| strength[j]).sum();
        let mut neighbours: Vec<T> = (0..n).filter(|&j| j != i).map(|j| distances[i][j]).collect();
        neighbours.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let sigma = if neighbours.is_empty() {
            T::zero()
        } else {
            neighbours[k.max(1).min(neighbours.len()) - 1]
        };
        let two = T::one() + T::one();
        ind.raw_fitness = T::from_usize(raw).expect("count fits the scalar");
        ind.density = T::one() / (sigma + two);
        ind.fitness = ind.raw_fitness + ind.density;
    }
}

/// Next archive: every nondominated individual, truncated or topped up with
/// the best dominated ones to reach `capacity` when possible. Fitness must
/// already be assigned.
pub fn environmental_selection<T: Real, X: Clone>(
    combined: &[Individual<T, X>],
    capacity: usize,
    orient: &ObjectiveOrientation,
) -> Vec<Individual<T, X>> {
    let (nondominated, mut dominated): (Vec<_>, Vec<_>) =
        combined.iter().cloned().partition(Individual::is_nondominated);
    if nondominated.len() > capacity {
        return truncate(nondominated, capacity, orient);
    }
    let mut archive = nondominated;
    // Stable sort keeps input order among equal fitness values.
    dominated.sort_by(|a, b| a.fitness.partial_cmp(&b.fitness).unwrap_or(Ordering::Equal));
    let missing = capacity - archive.len();
    archive.extend(dominated.into_iter().take(missing));
    archive
}

/// Shrink `archive` to `capacity` members, repeatedly dropping the member
/// whose sorted neighbour distances are lexicographically smallest.
pub fn truncate<T: Real, X>(
    archive: Vec<Individual<T, X>>,
    capacity: usize,
    orient: &ObjectiveOrientation,
) -> Vec<Individual<T, X>> {
    if archive.len() <= capacity {
        return archive;
    }
    let points = minimized_objectives(&archive, orient);
    let removed = truncation_order(&points, capacity);
    let mut keep = vec![true; archive.len()];
    for r in removed {
        keep[r] = false;
    }
    archive
        .into_iter()
        .zip(keep)
        .filter_map(|(ind, k)| k.then_some(ind))
        .collect()
}

fn lexicographic<T: Real>(a: &[(T, usize)], b: &[(T, usize)]) -> Ordering {
    for ((x, _), (y, _)) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Indices removed by truncation, in removal order. Points are in
/// all-minimize form and get normalized over the whole set first. Ties go to
/// the lowest index.
pub fn truncation_order<T: Real>(points: &[Vec<T>], capacity: usize) -> Vec<usize> {
    let n = points.len();
    if n <= capacity {
        return Vec::new();
    }
    let distances = distance_matrix(&normalize(points));
    let mut neighbours: Vec<Vec<(T, usize)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(T, usize)> = (0..n).filter(|&j| j != i).map(|j| (distances[i][j], j)).collect();
            row.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
            row
        })
        .collect();
    let mut alive = vec![true; n];
    let mut removed = Vec::with_capacity(n - capacity);
    for _ in capacity..n {
        let mut victim: Option<usize> = None;
        for i in (0..n).filter(|&i| alive[i]) {
            let better = match victim {
                None => true,
                Some(v) => lexicographic(&neighbours[i], &neighbours[v]) == Ordering::Less,
            };
            if better {
                victim = Some(i);
            }
        }
        let victim = victim.expect("more members than capacity");
        alive[victim] = false;
        removed.push(victim);
        for (i, row) in neighbours.iter_mut().enumerate() {
            if alive[i] {
                row.retain(|&(_, j)| j != victim);
            }
        }
    }
    removed
}
