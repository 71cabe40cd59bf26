//! Mating selection and real-coded variation (SBX and polynomial mutation).

use std::cmp::Ordering;

use rand::Rng;

use crate::model::BaseStock;
use crate::num::Real;

use super::selection::Individual;
use super::EvolveError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams<T> {
    /// Probability that a parent pair undergoes crossover.
    pub crossover_rate: f64,
    /// Per-gene probability of polynomial mutation.
    pub mutation_rate: f64,
    pub crossover_index: f64,
    pub mutation_index: f64,
    /// Genes live in `[0, upper_bound]`.
    pub upper_bound: T,
}

/// Two uniform draws with replacement; the lower fitness wins, ties are a
/// fair coin.
pub fn binary_tournament<'a, T: Real, X, R: Rng + ?Sized>(
    archive: &'a [Individual<T, X>],
    rng: &mut R,
) -> Result<&'a Individual<T, X>, EvolveError> {
    if archive.is_empty() {
        return Err(EvolveError::EmptyArchive);
    }
    let a = &archive[rng.random_range(0..archive.len())];
    let b = &archive[rng.random_range(0..archive.len())];
    Ok(match a.fitness.partial_cmp(&b.fitness) {
        Some(Ordering::Less) => a,
        Some(Ordering::Greater) => b,
        _ => {
            if rng.random_bool(0.5) {
                a
            } else {
                b
            }
        }
    })
}

fn unit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::sample_unit(rng)
}

fn sbx_pair<T: Real, R: Rng + ?Sized>(y1: T, y2: T, eta: T, rng: &mut R) -> (T, T) {
    let one = T::one();
    let two = one + one;
    let half = one / two;
    let u: T = unit(rng);
    let exponent = one / (eta + one);
    let beta = if u <= half {
        (two * u).powf(exponent)
    } else {
        (one / (two * (one - u))).powf(exponent)
    };
    let mid = (y1 + y2) * half;
    let spread = (y2 - y1) * half * beta;
    (mid - spread, mid + spread)
}

fn polynomial_mutation<T: Real, R: Rng + ?Sized>(y: T, upper: T, eta: T, rng: &mut R) -> T {
    let one = T::one();
    let two = one + one;
    let half = one / two;
    if upper <= T::zero() {
        return y;
    }
    let delta_low = y / upper;
    let delta_high = (upper - y) / upper;
    let power = one / (eta + one);
    let r: T = unit(rng);
    let delta_q = if r < half {
        let value = two * r + (one - two * r) * (one - delta_low).powf(eta + one);
        value.powf(power) - one
    } else {
        let value = two * (one - r) + two * (r - half) * (one - delta_high).powf(eta + one);
        one - value.powf(power)
    };
    y + delta_q * upper
}

fn clamp<T: Real>(v: T, upper: T) -> T {
    v.max(T::zero()).min(upper)
}

/// Produce two offspring from two parents.
pub fn vary<T: Real, R: Rng + ?Sized>(
    parents: (&BaseStock<T>, &BaseStock<T>),
    params: &VariationParams<T>,
    rng: &mut R,
) -> (BaseStock<T>, BaseStock<T>) {
    let (p1, p2) = parents;
    let mut c1 = p1.levels().to_vec();
    let mut c2 = p2.levels().to_vec();
    let upper = params.upper_bound;

    if rng.random_bool(params.crossover_rate) {
        let eta = T::from_f64_lossy(params.crossover_index);
        let tiny = T::from_f64_lossy(1e-14);
        for g in 0..c1.len() {
            if (c1[g] - c2[g]).abs() > tiny {
                let (a, b) = sbx_pair(c1[g], c2[g], eta, rng);
                c1[g] = clamp(a, upper);
                c2[g] = clamp(b, upper);
            }
        }
    }

    let eta = T::from_f64_lossy(params.mutation_index);
    for child in [&mut c1, &mut c2] {
        for gene in child.iter_mut() {
            if rng.random_bool(params.mutation_rate) {
                *gene = clamp(polynomial_mutation(*gene, upper, eta, rng), upper);
            }
        }
    }
    (BaseStock(c1), BaseStock(c2))
}
