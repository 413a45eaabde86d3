//! Domain types shared by every ranking and search routine: criteria,
//! alternatives, and the decision matrix that ties them together.
//!
//! A [`DecisionMatrix`] is immutable once built. Every constructor validates
//! its invariants, so downstream code can index without re-checking.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum tolerance below which a weight vector is already considered normalized.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "max", alias = "Max", alias = "maximize")]
    Maximize,
    #[serde(rename = "min", alias = "Min", alias = "minimize")]
    Minimize,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Maximize => "max",
            Direction::Minimize => "min",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the six generalized criteria.
///
/// Thresholds are expressed in the criterion's own units: `q` is the
/// indifference threshold, `p` the strict-preference threshold and `s` the
/// Gaussian spread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreferenceFunction {
    #[default]
    #[serde(alias = "Usual")]
    Usual,
    #[serde(alias = "UShape", alias = "u-shape")]
    UShape { q: f64 },
    #[serde(alias = "VShape", alias = "v-shape")]
    VShape { p: f64 },
    #[serde(alias = "Level")]
    Level { q: f64, p: f64 },
    #[serde(alias = "LinearWithIndifference", alias = "linear")]
    LinearWithIndifference { q: f64, p: f64 },
    #[serde(alias = "Gaussian")]
    Gaussian { s: f64 },
}


impl PreferenceFunction {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PreferenceFunction::Usual => "usual",
            PreferenceFunction::UShape { .. } => "u_shape",
            PreferenceFunction::VShape { .. } => "v_shape",
            PreferenceFunction::Level { .. } => "level",
            PreferenceFunction::LinearWithIndifference { .. } => "linear_with_indifference",
            PreferenceFunction::Gaussian { .. } => "gaussian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPreferenceFunction(msg));
        match *self {
            PreferenceFunction::Usual => Ok(()),
            PreferenceFunction::UShape { q } => {
                if !(q.is_finite() && q >= 0.0) {
                    return bad(format!("u_shape requires q >= 0, got {q}"));
                }
                Ok(())
            }
            PreferenceFunction::VShape { p } => {
                if !(p.is_finite() && p > 0.0) {
                    return bad(format!("v_shape requires p > 0, got {p}"));
                }
                Ok(())
            }
            PreferenceFunction::Level { q, p } | PreferenceFunction::LinearWithIndifference { q, p } => {
                if !(q.is_finite() && q >= 0.0) {
                    return bad(format!("{} requires q >= 0, got {q}", self.kind_name()));
                }
                if !(p.is_finite() && p > q) {
                    return bad(format!("{} requires p > q, got q={q}, p={p}", self.kind_name()));
                }
                Ok(())
            }
            PreferenceFunction::Gaussian { s } => {
                if !(s.is_finite() && s > 0.0) {
                    return bad(format!("gaussian requires s > 0, got {s}"));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for PreferenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreferenceFunction::Usual => write!(f, "usual"),
            PreferenceFunction::UShape { q } => write!(f, "u_shape:q={q}"),
            PreferenceFunction::VShape { p } => write!(f, "v_shape:p={p}"),
            PreferenceFunction::Level { q, p } => write!(f, "level:q={q},p={p}"),
            PreferenceFunction::LinearWithIndifference { q, p } => {
                write!(f, "linear_with_indifference:q={q},p={p}")
            }
            PreferenceFunction::Gaussian { s } => write!(f, "gaussian:s={s}"),
        }
    }
}

/// Parses `kind[:name=value,...]`, e.g. `usual`, `v_shape:p=2`, `level:q=1,p=3`.
impl FromStr for PreferenceFunction {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (kind, params) = match text.split_once(':') {
            Some((k, p)) => (k.trim(), p.trim()),
            None => (text.trim(), ""),
        };
        let mut q = None;
        let mut p = None;
        let mut s = None;
        for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part.split_once('=').ok_or_else(|| {
                Error::InvalidPreferenceFunction(format!("expected name=value, got `{part}`"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidPreferenceFunction(format!("`{value}` is not a number"))
            })?;
            match name.trim() {
                "q" => q = Some(value),
                "p" => p = Some(value),
                "s" => s = Some(value),
                other => {
                    return Err(Error::InvalidPreferenceFunction(format!(
                        "unknown parameter `{other}`"
                    )))
                }
            }
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                Error::InvalidPreferenceFunction(format!("`{kind}` requires parameter `{name}`"))
            })
        };
        let parsed = match kind.to_ascii_lowercase().replace('-', "_").as_str() {
            "usual" => PreferenceFunction::Usual,
            "u_shape" | "ushape" => PreferenceFunction::UShape { q: need(q, "q")? },
            "v_shape" | "vshape" => PreferenceFunction::VShape { p: need(p, "p")? },
            "level" => PreferenceFunction::Level {
                q: need(q, "q")?,
                p: need(p, "p")?,
            },
            "linear_with_indifference" | "linear" | "linearwithindifference" => {
                PreferenceFunction::LinearWithIndifference {
                    q: need(q, "q")?,
                    p: need(p, "p")?,
                }
            }
            "gaussian" => PreferenceFunction::Gaussian { s: need(s, "s")? },
            other => {
                return Err(Error::InvalidPreferenceFunction(format!(
                    "unknown kind `{other}`"
                )))
            }
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidCondition(format!(
                "interval bounds must be finite and ordered, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub name: String,
    pub direction: Direction,
    /// Raw, unnormalized weight.
    pub weight: f64,
    pub preference: PreferenceFunction,
    pub feasible_interval: Option<Interval>,
}

impl Criterion {
    /// Unit weight, usual preference function, no feasibility interval.
    pub fn new(id: impl Into<String>, direction: Direction) -> Self {
        let id = id.into();
        Criterion {
            name: id.clone(),
            id,
            direction,
            weight: 1.0,
            preference: PreferenceFunction::Usual,
            feasible_interval: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_preference(mut self, preference: PreferenceFunction) -> Self {
        self.preference = preference;
        self
    }

    pub fn with_feasible_interval(mut self, interval: Interval) -> Self {
        self.feasible_interval = Some(interval);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    pub name: String,
    /// Evaluations aligned with the owning matrix's criteria order.
    pub values: Vec<f64>,
}

impl Alternative {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        let id = id.into();
        Alternative {
            name: id.clone(),
            id,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionMatrix {
    criteria: Vec<Criterion>,
    alternatives: Vec<Alternative>,
}

impl DecisionMatrix {
    pub fn new(criteria: Vec<Criterion>, alternatives: Vec<Alternative>) -> Result<Self> {
        if criteria.is_empty() {
            return Err(Error::InvalidMatrix("no criteria".into()));
        }
        let mut seen = HashSet::new();
        for c in &criteria {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidMatrix(format!("duplicate criterion id `{}`", c.id)));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::InvalidMatrix(format!(
                    "criterion `{}` has invalid weight {}",
                    c.id, c.weight
                )));
            }
            c.preference.validate().map_err(|e| {
                Error::InvalidMatrix(format!("criterion `{}`: {e}", c.id))
            })?;
        }
        let mut seen = HashSet::new();
        for a in &alternatives {
            if !seen.insert(a.id.as_str()) {
                return Err(Error::InvalidMatrix(format!("duplicate alternative id `{}`", a.id)));
            }
            if a.values.len() != criteria.len() {
                return Err(Error::InvalidMatrix(format!(
                    "alternative `{}` has {} values, expected {}",
                    a.id,
                    a.values.len(),
                    criteria.len()
                )));
            }
            if let Some(j) = a.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidMatrix(format!(
                    "alternative `{}` has a non-finite value for `{}`",
                    a.id, criteria[j].id
                )));
            }
        }
        Ok(DecisionMatrix {
            criteria,
            alternatives,
        })
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn alternative_index(&self, id: &str) -> Result<usize> {
        self.alternatives
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| Error::UnknownAlternative(id.to_string()))
    }

    pub fn criterion_index(&self, id: &str) -> Result<usize> {
        self.criteria
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCriterion(id.to_string()))
    }

    #[inline]
    pub fn value(&self, alternative: usize, criterion: usize) -> f64 {
        self.alternatives[alternative].values[criterion]
    }

    pub fn column(&self, criterion: usize) -> impl Iterator<Item = f64> + '_ {
        self.alternatives.iter().map(move |a| a.values[criterion])
    }

    /// Observed `[min, max]` of a criterion column, `None` for an empty matrix.
    pub fn column_range(&self, criterion: usize) -> Option<Interval> {
        let mut it = self.column(criterion);
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Interval { lo, hi })
    }

    /// Deviation of `a` over `b` on criterion `j`, oriented so that a positive
    /// value always means `a` is better.
    #[inline]
    pub fn deviation(&self, a: usize, b: usize, j: usize) -> f64 {
        let d = self.value(a, j) - self.value(b, j);
        match self.criteria[j].direction {
            Direction::Maximize => d,
            Direction::Minimize => -d,
        }
    }

    pub fn oriented_deviation(&self, a: &str, b: &str, criterion: &str) -> Result<f64> {
        let a = self.alternative_index(a)?;
        let b = self.alternative_index(b)?;
        let j = self.criterion_index(criterion)?;
        Ok(self.deviation(a, b, j))
    }

    /// Criterion weights scaled to sum to one. Vectors already summing to one
    /// (within [`WEIGHT_SUM_TOLERANCE`]) are returned untouched.
    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        normalize(self.criteria.iter().map(|c| c.weight).collect())
    }

    pub fn normalize_weights(&self) -> Result<DecisionMatrix> {
        let weights = self.normalized_weights()?;
        let criteria = self
            .criteria
            .iter()
            .zip(weights)
            .map(|(c, w)| Criterion {
                weight: w,
                ..c.clone()
            })
            .collect();
        Ok(DecisionMatrix {
            criteria,
            alternatives: self.alternatives.clone(),
        })
    }

    /// Copy of the matrix with one more alternative appended.
    pub fn with_alternative(&self, alternative: Alternative) -> Result<DecisionMatrix> {
        let mut alternatives = self.alternatives.clone();
        alternatives.push(alternative);
        DecisionMatrix::new(self.criteria.clone(), alternatives)
    }

    /// Sub-matrix keeping only the listed alternatives, in matrix order.
    pub fn retain_alternatives(&self, keep: &[&str]) -> Result<DecisionMatrix> {
        for id in keep {
            self.alternative_index(id)?;
        }
        let alternatives = self
            .alternatives
            .iter()
            .filter(|a| keep.contains(&a.id.as_str()))
            .cloned()
            .collect();
        DecisionMatrix::new(self.criteria.clone(), alternatives)
    }

    pub(crate) fn require_alternatives(&self, needed: usize) -> Result<()> {
        if self.alternatives.len() < needed {
            return Err(Error::TooFewAlternatives {
                needed,
                found: self.alternatives.len(),
            });
        }
        Ok(())
    }
}

fn normalize(weights: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    if (total - 1.0).abs() <= WEIGHT_SUM_TOLERANCE {
        return Ok(weights);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}
