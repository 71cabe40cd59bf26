//! Front tables and summary statistics.
//!
//! Columns are the selected objectives, their standard errors, the genome
//! `S_1..S_n` and the snapshot generation. Rows are sorted by the first
//! objective, so the first column never decreases. Numbers carry nine
//! significant digits in plain decimal notation.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::evolve::{normalize, Individual};
use crate::sampling::ObjectiveEstimate;

use super::config::{ObjectiveKind, ObjectiveSubset};
use super::ExperimentError;

#[derive(Debug, Clone, PartialEq)]
pub struct FrontRecord {
    pub genome: Vec<f64>,
    /// Selected objective means, natural orientation.
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    pub objectives: ObjectiveSubset,
    pub records: Vec<FrontRecord>,
}

impl Front {
    pub fn from_individuals(
        objectives: &ObjectiveSubset,
        members: &[Individual<f64, ObjectiveEstimate<f64>>],
        generation: usize,
    ) -> Self {
        let mut records: Vec<FrontRecord> = members
            .iter()
            .map(|ind| FrontRecord {
                genome: ind.genome.levels().to_vec(),
                values: objectives.project(&ind.extra),
                stderrs: objectives.project_stderr(&ind.extra),
                generation,
            })
            .collect();
        sort_records(&mut records);
        Self {
            objectives: objectives.clone(),
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.records.first().map_or(0, |r| r.genome.len())
    }
}

fn cmp_f64(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Order by objectives, then genome, then generation.
pub fn sort_records(records: &mut [FrontRecord]) {
    records.sort_by(|a, b| {
        cmp_f64(&a.values, &b.values)
            .then_with(|| cmp_f64(&a.genome, &b.genome))
            .then(a.generation.cmp(&b.generation))
    });
}

/// Fixed-point rendering with nine significant digits.
pub fn format_value(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0.00000000".to_string()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn front_header(objectives: &ObjectiveSubset, dimension: usize) -> Vec<String> {
    let mut header: Vec<String> = objectives.kinds().iter().map(|k| k.name().to_string()).collect();
    header.extend(objectives.kinds().iter().map(|k| format!("{}_stderr", k.name())));
    header.extend((1..=dimension).map(|i| format!("S_{i}")));
    header.push("generation".to_string());
    header
}

/// Render a front as CSV text.
pub fn render_front(front: &Front) -> String {
    let mut records = front.records.clone();
    sort_records(&mut records);
    let mut out = front_header(&front.objectives, front.dimension()).join(",");
    out.push('\n');
    for r in &records {
        let mut cells: Vec<String> = r
            .values
            .iter()
            .chain(&r.stderrs)
            .chain(&r.genome)
            .map(|&v| format_value(v))
            .collect();
        cells.push(r.generation.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn export_front(front: &Front, path: impl AsRef<Path>) -> Result<(), ExperimentError> {
    if front.is_empty() {
        return Err(ExperimentError::Invalid("cannot export an empty front".to_string()));
    }
    let path = path.as_ref();
    fs::write(path, render_front(front)).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
}

/// Genomes of the front members, one row each, in front order.
pub fn render_solutions(front: &Front) -> String {
    let mut records = front.records.clone();
    sort_records(&mut records);
    let mut out = (1..=front.dimension())
        .map(|i| format!("S_{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for r in &records {
        out.push_str(&r.genome.iter().map(|&v| format_value(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Read back a table written by [`render_front`].
pub fn parse_front(text: &str) -> Result<Front, ExperimentError> {
    let bad = |line: usize, msg: &str| ExperimentError::Parse(format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();

    let mut kinds = Vec::new();
    for c in &columns {
        if let Ok(kind) = c.parse::<ObjectiveKind>() {
            if ["cost", "fill", "lead"].contains(c) {
                kinds.push(kind);
            }
        }
    }
    let k = kinds.len();
    let dimension = columns.iter().filter(|c| c.starts_with("S_")).count();
    if columns.len() != 2 * k + dimension + 1 || columns.last() != Some(&"generation") {
        return Err(bad(1, "unrecognized header"));
    }
    let objectives = ObjectiveSubset::new(kinds)?;

    let mut records = Vec::new();
    for (idx, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(bad(idx + 1, "wrong number of columns"));
        }
        let numbers = cells[..cells.len() - 1]
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(idx + 1, &e.to_string()))?;
        let generation = cells[cells.len() - 1]
            .parse::<usize>()
            .map_err(|e| bad(idx + 1, &e.to_string()))?;
        records.push(FrontRecord {
            values: numbers[..k].to_vec(),
            stderrs: numbers[k..2 * k].to_vec(),
            genome: numbers[2 * k..].to_vec(),
            generation,
        });
    }
    Ok(Front { objectives, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveExtent {
    pub kind: ObjectiveKind,
    pub min: f64,
    pub max: f64,
}

impl ObjectiveExtent {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontSummary {
    pub objectives: ObjectiveSubset,
    pub count: usize,
    pub extents: Vec<ObjectiveExtent>,
    /// Mean nearest-neighbour distance in min-max normalized objective space.
    pub spread: f64,
}

impl FrontSummary {
    pub fn extent(&self, kind: ObjectiveKind) -> Option<&ObjectiveExtent> {
        self.extents.iter().find(|e| e.kind == kind)
    }
}

pub fn summarize_front(front: &Front) -> FrontSummary {
    let extents = front
        .objectives
        .kinds()
        .iter()
        .enumerate()
        .map(|(d, &kind)| {
            let (min, max) = front
                .records
                .iter()
                .map(|r| r.values[d])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if front.is_empty() {
                ObjectiveExtent {
                    kind,
                    min: 0.0,
                    max: 0.0,
                }
            } else {
                ObjectiveExtent { kind, min, max }
            }
        })
        .collect();

    let points: Vec<Vec<f64>> = front.records.iter().map(|r| r.values.clone()).collect();
    let spread = if points.len() < 2 {
        0.0
    } else {
        let unit = normalize(&points);
        let nearest: Vec<f64> = (0..unit.len())
            .map(|i| {
                (0..unit.len())
                    .filter(|&j| j != i)
                    .map(|j| {
                        unit[i]
                            .iter()
                            .zip(&unit[j])
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        nearest.iter().sum::<f64>() / nearest.len() as f64
    };

    FrontSummary {
        objectives: front.objectives.clone(),
        count: front.len(),
        extents,
        spread,
    }
}

impl fmt::Display for FrontSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "objectives: {}", self.objectives)?;
        writeln!(f, "records: {}", self.count)?;
        for e in &self.extents {
            writeln!(
                f,
                "{}: min {} max {} extent {}",
                e.kind.name(),
                format_value(e.min),
                format_value(e.max),
                format_value(e.width())
            )?;
        }
        writeln!(f, "spread: {}", format_value(self.spread))
    }
}
