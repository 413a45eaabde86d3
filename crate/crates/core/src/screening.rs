//! Hard feasibility conditions per criterion and the report of which
//! alternatives break them.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::model::{DecisionMatrix, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Condition {
    /// Closed interval, bounds included.
    Within(Interval),
    AtLeast(f64),
    AtMost(f64),
}

impl Condition {
    /// Distance to the nearest admissible bound; `None` when satisfied.
    pub fn violation(&self, value: f64) -> Option<f64> {
        let (lo, hi) = self.bounds();
        if value < lo {
            Some(lo - value)
        } else if value > hi {
            Some(value - hi)
        } else {
            None
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Condition::Within(i) => (i.lo, i.hi),
            Condition::AtLeast(lo) => (lo, f64::INFINITY),
            Condition::AtMost(hi) => (f64::NEG_INFINITY, hi),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Within(i) => write!(f, "{i}"),
            Condition::AtLeast(lo) => write!(f, ">= {lo}"),
            Condition::AtMost(hi) => write!(f, "<= {hi}"),
        }
    }
}

/// Conditions keyed by criterion id. At most one condition per criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConditionSet {
    conditions: Vec<(String, Condition)>,
}

impl ConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, criterion: impl Into<String>, condition: Condition) {
        let criterion = criterion.into();
        match self.conditions.iter_mut().find(|(c, _)| *c == criterion) {
            Some(slot) => slot.1 = condition,
            None => self.conditions.push((criterion, condition)),
        }
    }

    pub fn with(mut self, criterion: impl Into<String>, condition: Condition) -> Self {
        self.insert(criterion, condition);
        self
    }

    pub fn remove(&mut self, criterion: &str) -> Option<Condition> {
        let pos = self.conditions.iter().position(|(c, _)| c == criterion)?;
        Some(self.conditions.remove(pos).1)
    }

    pub fn get(&self, criterion: &str) -> Option<&Condition> {
        self.conditions.iter().find(|(c, _)| c == criterion).map(|(_, c)| c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Condition)> {
        self.conditions.iter().map(|(c, cond)| (c.as_str(), cond))
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    /// Conditions resolved to criterion indices of `matrix`, in criterion order.
    pub fn resolve(&self, matrix: &DecisionMatrix) -> Result<Vec<(usize, Condition)>> {
        let mut out = self
            .conditions
            .iter()
            .map(|(id, cond)| Ok((matrix.criterion_index(id)?, *cond)))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by_key(|(j, _)| *j);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub criterion: String,
    pub observed: f64,
    pub condition: Condition,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeScreening {
    pub alternative: String,
    pub violations: Vec<Violation>,
}

impl AlternativeScreening {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningReport {
    rows: Vec<AlternativeScreening>,
}

impl ScreeningReport {
    pub fn rows(&self) -> &[AlternativeScreening] {
        &self.rows
    }

    pub fn feasible_ids(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.feasible())
            .map(|r| r.alternative.as_str())
            .collect()
    }

    /// The feasible sub-matrix of `matrix`.
    pub fn apply(&self, matrix: &DecisionMatrix) -> Result<DecisionMatrix> {
        matrix.retain_alternatives(&self.feasible_ids())
    }
}

pub fn screen(matrix: &DecisionMatrix, conds: &ConditionSet) -> Result<ScreeningReport> {
    let resolved = conds.resolve(matrix)?;
    let rows = matrix
        .alternatives()
        .iter()
        .map(|alt| AlternativeScreening {
            alternative: alt.id.clone(),
            violations: resolved
                .iter()
                .filter_map(|&(j, condition)| {
                    let observed = alt.values[j];
                    condition.violation(observed).map(|gap| Violation {
                        criterion: matrix.criteria()[j].id.clone(),
                        observed,
                        condition,
                        gap,
                    })
                })
                .collect(),
        })
        .collect();
    Ok(ScreeningReport { rows })
}

/// Count of conditions a raw profile breaks; used for GA penalties.
pub(crate) fn count_violations(values: &[f64], resolved: &[(usize, Condition)]) -> usize {
    resolved
        .iter()
        .filter(|(j, c)| c.violation(values[*j]).is_some())
        .count()
}
