//! ELECTRE-style outranking with a concordance level and a veto.
//!
//! Discordance gaps are divided by each criterion's observed range across
//! the matrix, so the veto level `v` lives on `[0, 1]` regardless of units.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DecisionMatrix;

/// Slack applied when comparing indices against thresholds, so a
/// concordance that is mathematically equal to `s` is not lost to rounding.
pub const THRESHOLD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectreThresholds {
    /// Concordance level.
    pub s: f64,
    /// Veto level on range-normalized gaps.
    pub v: f64,
}

impl Default for ElectreThresholds {
    fn default() -> Self {
        ElectreThresholds { s: 0.7, v: 0.3 }
    }
}

impl ElectreThresholds {
    pub fn new(s: f64, v: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&s) {
            return Err(Error::InvalidThresholds(format!("s must lie in [0.5, 1], got {s}")));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidThresholds(format!("v must lie in [0, 1], got {v}")));
        }
        Ok(ElectreThresholds { s, v })
    }

    /// Upper end of the admissible concordance range, `1 - min_j w_j`.
    pub fn max_concordance_level(matrix: &DecisionMatrix) -> Result<f64> {
        let weights = matrix.normalized_weights()?;
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(1.0 - min)
    }

    /// Checks `s` against `[0.5, 1 - min_j w_j]` for this matrix's weights.
    pub fn check_admissible(&self, matrix: &DecisionMatrix) -> Result<()> {
        let upper = Self::max_concordance_level(matrix)?;
        if self.s < 0.5 || self.s > upper + THRESHOLD_TOLERANCE {
            return Err(Error::InvalidThresholds(format!(
                "s = {} is outside the admissible range [0.500000, {upper:.6}]",
                self.s
            )));
        }
        Ok(())
    }
}

/// Precomputed weights and column ranges for one matrix.
struct Context<'a> {
    matrix: &'a DecisionMatrix,
    weights: Vec<f64>,
    total: f64,
    ranges: Vec<f64>,
}

impl<'a> Context<'a> {
    fn new(matrix: &'a DecisionMatrix) -> Result<Self> {
        let weights = matrix.normalized_weights()?;
        let total = weights.iter().sum();
        let ranges = (0..matrix.n_criteria())
            .map(|j| matrix.column_range(j).map_or(0.0, |r| r.width()))
            .collect();
        Ok(Context {
            matrix,
            weights,
            total,
            ranges,
        })
    }

    fn concordance(&self, a: usize, b: usize) -> f64 {
        let sum: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| self.matrix.deviation(a, b, j) >= 0.0)
            .map(|(_, w)| w)
            .sum();
        sum / self.total
    }

    fn discordance(&self, a: usize, b: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (j, &range) in self.ranges.iter().enumerate() {
            let d = self.matrix.deviation(a, b, j);
            if d < 0.0 {
                if range <= 0.0 {
                    return Err(Error::ZeroRange(self.matrix.criteria()[j].id.clone()));
                }
                worst = worst.max((-d / range).min(1.0));
            }
        }
        Ok(worst)
    }

    fn outranks(&self, a: usize, b: usize, t: &ElectreThresholds) -> Result<bool> {
        Ok(self.concordance(a, b) >= t.s - THRESHOLD_TOLERANCE
            && self.discordance(a, b)? <= t.v + THRESHOLD_TOLERANCE)
    }
}

fn pair(matrix: &DecisionMatrix, a: &str, b: &str) -> Result<(usize, usize)> {
    let ai = matrix.alternative_index(a)?;
    let bi = matrix.alternative_index(b)?;
    if ai == bi {
        return Err(Error::SelfComparison(a.to_string()));
    }
    Ok((ai, bi))
}

/// c(aSb): weight share of criteria on which `a` is at least as good as `b`.
pub fn concordance(matrix: &DecisionMatrix, a: &str, b: &str) -> Result<f64> {
    let (ai, bi) = pair(matrix, a, b)?;
    Ok(Context::new(matrix)?.concordance(ai, bi))
}

/// d(aSb): largest range-normalized gap in `b`'s favour, 0 if none.
pub fn discordance(matrix: &DecisionMatrix, a: &str, b: &str) -> Result<f64> {
    let (ai, bi) = pair(matrix, a, b)?;
    Context::new(matrix)?.discordance(ai, bi)
}

pub fn outranks(matrix: &DecisionMatrix, a: &str, b: &str, t: &ElectreThresholds) -> Result<bool> {
    let (ai, bi) = pair(matrix, a, b)?;
    Context::new(matrix)?.outranks(ai, bi, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OutrankingRelation {
    /// First alternative strictly preferred.
    PreferFirst,
    /// Second alternative strictly preferred.
    PreferSecond,
    Indifferent,
    Incomparable,
}

impl OutrankingRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            OutrankingRelation::PreferFirst => "P+",
            OutrankingRelation::PreferSecond => "P-",
            OutrankingRelation::Indifferent => "I",
            OutrankingRelation::Incomparable => "R",
        }
    }

    /// Same relation seen from the other side of the pair.
    pub fn reversed(self) -> Self {
        match self {
            OutrankingRelation::PreferFirst => OutrankingRelation::PreferSecond,
            OutrankingRelation::PreferSecond => OutrankingRelation::PreferFirst,
            other => other,
        }
    }

    pub fn from_outranking(a_over_b: bool, b_over_a: bool) -> Self {
        match (a_over_b, b_over_a) {
            (true, false) => OutrankingRelation::PreferFirst,
            (false, true) => OutrankingRelation::PreferSecond,
            (true, true) => OutrankingRelation::Indifferent,
            (false, false) => OutrankingRelation::Incomparable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOutcome {
    pub first: String,
    pub second: String,
    pub concordance_fs: f64,
    pub concordance_sf: f64,
    pub discordance_fs: f64,
    pub discordance_sf: f64,
    pub relation: OutrankingRelation,
}

/// One entry per unordered pair, in matrix order (`first` precedes `second`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutrankingRelationTable {
    pub thresholds: ElectreThresholds,
    pairs: Vec<PairOutcome>,
}

impl OutrankingRelationTable {
    pub fn pairs(&self) -> &[PairOutcome] {
        &self.pairs
    }

    /// Relation of `a` towards `b`, in either storage orientation.
    pub fn relation(&self, a: &str, b: &str) -> Option<OutrankingRelation> {
        self.pairs.iter().find_map(|p| {
            if p.first == a && p.second == b {
                Some(p.relation)
            } else if p.first == b && p.second == a {
                Some(p.relation.reversed())
            } else {
                None
            }
        })
    }
}

pub fn classify(matrix: &DecisionMatrix, t: &ElectreThresholds) -> Result<OutrankingRelationTable> {
    matrix.require_alternatives(2)?;
    let ctx = Context::new(matrix)?;
    let alts = matrix.alternatives();
    let mut pairs = Vec::with_capacity(alts.len() * (alts.len() - 1) / 2);
    for a in 0..alts.len() {
        for b in a + 1..alts.len() {
            let ab = ctx.outranks(a, b, t)?;
            let ba = ctx.outranks(b, a, t)?;
            pairs.push(PairOutcome {
                first: alts[a].id.clone(),
                second: alts[b].id.clone(),
                concordance_fs: ctx.concordance(a, b),
                concordance_sf: ctx.concordance(b, a),
                discordance_fs: ctx.discordance(a, b)?,
                discordance_sf: ctx.discordance(b, a)?,
                relation: OutrankingRelation::from_outranking(ab, ba),
            });
        }
    }
    Ok(OutrankingRelationTable {
        thresholds: *t,
        pairs,
    })
}
