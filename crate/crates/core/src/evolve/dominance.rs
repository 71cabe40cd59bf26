use crate::num::Real;

use super::EvolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Direction of each objective. The engine minimizes internally, so
/// maximized objectives are negated on the way in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveOrientation(Vec<Sense>);

impl ObjectiveOrientation {
    pub fn new(senses: Vec<Sense>) -> Self {
        Self(senses)
    }

    /// `(cost, fill, lead)` = `(minimize, maximize, minimize)`.
    pub fn cost_fill_lead() -> Self {
        Self(vec![Sense::Minimize, Sense::Maximize, Sense::Minimize])
    }

    pub fn all_minimize(k: usize) -> Self {
        Self(vec![Sense::Minimize; k])
    }

    pub fn senses(&self) -> &[Sense] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Map natural-orientation values to the all-minimize form.
    pub fn to_minimized<T: Real>(&self, values: &[T]) -> Vec<T> {
        values
            .iter()
            .zip(&self.0)
            .map(|(&v, s)| match s {
                Sense::Minimize => v,
                Sense::Maximize => -v,
            })
            .collect()
    }
}

/// Pareto dominance between two objective vectors under `orient`.
pub fn dominates<T: Real>(a: &[T], b: &[T], orient: &ObjectiveOrientation) -> Result<bool, EvolveError> {
    if a.len() != b.len() || a.len() != orient.len() {
        return Err(EvolveError::DimensionMismatch {
            expected: orient.len(),
            got: a.len().max(b.len()),
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(EvolveError::NonFiniteObjective);
    }
    Ok(dominates_minimized(&orient.to_minimized(a), &orient.to_minimized(b)))
}

/// Dominance for vectors that are already in all-minimize form.
pub(crate) fn dominates_minimized<T: Real>(a: &[T], b: &[T]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Indices of the members of `points` (all-minimize form) that no other
/// member dominates.
pub(crate) fn nondominated_indices<T: Real>(points: &[Vec<T>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|p| dominates_minimized(p, &points[i])))
        .collect()
}
