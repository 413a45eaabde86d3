//! PROMETHEE outranking: generalized criteria, the multicriteria preference
//! index, upgrade flows, and the PROMETHEE I / II preorders.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DecisionMatrix, PreferenceFunction};

/// Two scores closer than this are treated as tied when ranking. Keeps the
/// preorders stable under reordering of criteria or alternatives, which only
/// perturbs sums in the last few ulps.
pub const TIE_TOLERANCE: f64 = 1e-12;

impl PreferenceFunction {
    /// Preference degree in `[0, 1]` for an oriented deviation `d`.
    pub fn value(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        match *self {
            PreferenceFunction::Usual => 1.0,
            PreferenceFunction::UShape { q } => {
                if d > q {
                    1.0
                } else {
                    0.0
                }
            }
            PreferenceFunction::VShape { p } => (d / p).min(1.0),
            PreferenceFunction::Level { q, p } => {
                if d <= q {
                    0.0
                } else if d <= p {
                    0.5
                } else {
                    1.0
                }
            }
            PreferenceFunction::LinearWithIndifference { q, p } => {
                if d <= q {
                    0.0
                } else if d <= p {
                    (d - q) / (p - q)
                } else {
                    1.0
                }
            }
            PreferenceFunction::Gaussian { s } => 1.0 - (-(d * d) / (2.0 * s * s)).exp(),
        }
    }
}

pub fn preference_value(function: &PreferenceFunction, d: f64) -> f64 {
    function.value(d)
}

/// Weighted mean of the per-criterion preference degrees. Dividing by the
/// weight total (computed in the same order) makes unanimous coalitions
/// exactly 1 rather than 1 ± ulp.
pub(crate) fn weighted_preference(matrix: &DecisionMatrix, weights: &[f64], a: usize, b: usize) -> f64 {
    let total: f64 = weights.iter().sum();
    let sum: f64 = matrix
        .criteria()
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(j, (c, w))| w * c.preference.value(matrix.deviation(a, b, j)))
        .sum();
    sum / total
}

/// Π(a, b) with weights normalized to sum to one.
pub fn preference_index(matrix: &DecisionMatrix, a: &str, b: &str) -> Result<f64> {
    let ai = matrix.alternative_index(a)?;
    let bi = matrix.alternative_index(b)?;
    if ai == bi {
        return Err(Error::SelfComparison(a.to_string()));
    }
    let weights = matrix.normalized_weights()?;
    Ok(weighted_preference(matrix, &weights, ai, bi))
}

/// Square matrix of pairwise preference indices with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceIndexMatrix {
    ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl PreferenceIndexMatrix {
    pub fn new(ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPreferenceMatrix(format!(
                "expected a {n}x{n} grid"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidPreferenceMatrix(format!("duplicate label `{dup}`")));
        }
        for (i, row) in values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    if v != 0.0 {
                        return Err(Error::InvalidPreferenceMatrix(format!(
                            "diagonal entry for `{}` must be 0, got {v}",
                            ids[i]
                        )));
                    }
                } else if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidPreferenceMatrix(format!(
                        "entry ({}, {}) = {v} is outside [0, 1]",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(PreferenceIndexMatrix { ids, values })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a][b]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownAlternative(id.to_string()))
    }

    pub fn value(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.values[self.index_of(a)?][self.index_of(b)?])
    }
}

pub fn preference_index_matrix(matrix: &DecisionMatrix) -> Result<PreferenceIndexMatrix> {
    matrix.require_alternatives(2)?;
    let weights = matrix.normalized_weights()?;
    let n = matrix.n_alternatives();
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        0.0
                    } else {
                        weighted_preference(matrix, &weights, a, b)
                    }
                })
                .collect()
        })
        .collect();
    let ids = matrix.alternatives().iter().map(|a| a.id.clone()).collect();
    PreferenceIndexMatrix::new(ids, values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flow {
    pub id: String,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub phi_net: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTable {
    rows: Vec<Flow>,
}

impl FlowTable {
    /// A table of externally supplied flows, e.g. a published reference.
    pub fn new(rows: Vec<Flow>) -> Result<Self> {
        for (i, f) in rows.iter().enumerate() {
            if rows[..i].iter().any(|g| g.id == f.id) {
                return Err(Error::InvalidMatrix(format!("duplicate alternative `{}`", f.id)));
            }
            if ![f.phi_plus, f.phi_minus, f.phi_net].iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidMatrix(format!("non-finite flow for `{}`", f.id)));
            }
        }
        Ok(FlowTable { rows })
    }

    pub fn rows(&self) -> &[Flow] {
        &self.rows
    }

    pub fn get(&self, id: &str) -> Option<&Flow> {
        self.rows.iter().find(|f| f.id == id)
    }
}

/// Positive, negative and net flows, each normalized by `n - 1`.
pub fn flows(pi: &PreferenceIndexMatrix) -> Result<FlowTable> {
    let n = pi.len();
    if n < 2 {
        return Err(Error::TooFewAlternatives { needed: 2, found: n });
    }
    let denom = (n - 1) as f64;
    let rows = (0..n)
        .map(|a| {
            let out: f64 = (0..n).filter(|&b| b != a).map(|b| pi.get(a, b)).sum();
            let inc: f64 = (0..n).filter(|&b| b != a).map(|b| pi.get(b, a)).sum();
            let phi_plus = out / denom;
            let phi_minus = inc / denom;
            Flow {
                id: pi.ids()[a].clone(),
                phi_plus,
                phi_minus,
                phi_net: phi_plus - phi_minus,
            }
        })
        .collect();
    Ok(FlowTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    pub id: String,
    pub score: f64,
    pub rank: usize,
}

/// Total preorder, best first. Tied entries share a competition rank
/// (1, 2, 2, 4) and are listed by id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedOrder {
    entries: Vec<RankEntry>,
}

impl RankedOrder {
    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.rank)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.id.as_str()).collect()
    }
}

/// Ranks arbitrary `(id, score)` pairs by descending score.
pub fn rank_by_score<I, S>(scores: I) -> RankedOrder
where
    I: IntoIterator<Item = (S, f64)>,
    S: Into<String>,
{
    let mut items: Vec<(String, f64)> = scores.into_iter().map(|(id, s)| (id.into(), s)).collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut entries = Vec::with_capacity(items.len());
    let mut start = 0;
    while start < items.len() {
        let leader = items[start].1;
        let mut end = start + 1;
        while end < items.len() && leader - items[end].1 <= TIE_TOLERANCE {
            end += 1;
        }
        let mut group = items[start..end].to_vec();
        group.sort_by(|a, b| a.0.cmp(&b.0));
        entries.extend(group.into_iter().map(|(id, score)| RankEntry {
            id,
            score,
            rank: start + 1,
        }));
        start = end;
    }
    RankedOrder { entries }
}

pub fn rank_promethee_ii(flow: &FlowTable) -> RankedOrder {
    rank_by_score(flow.rows().iter().map(|f| (f.id.clone(), f.phi_net)))
}

/// Relation of an ordered pair `(a, b)` under PROMETHEE I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairRelation {
    /// `a` is preferred to `b`.
    Preferred,
    /// `b` is preferred to `a`.
    Inferior,
    Indifferent,
    Incomparable,
}

impl PairRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            PairRelation::Preferred => "P",
            PairRelation::Inferior => "P-1",
            PairRelation::Indifferent => "I",
            PairRelation::Incomparable => "R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialPreorder {
    ids: Vec<String>,
    relations: Vec<Vec<PairRelation>>,
}

impl PartialPreorder {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, a: usize, b: usize) -> PairRelation {
        self.relations[a][b]
    }

    pub fn relation(&self, a: &str, b: &str) -> Result<PairRelation> {
        let idx = |id: &str| {
            self.ids
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| Error::UnknownAlternative(id.to_string()))
        };
        Ok(self.relations[idx(a)?][idx(b)?])
    }
}

fn compare_flows(a: &Flow, b: &Flow) -> PairRelation {
    let tied = |x: f64, y: f64| (x - y).abs() <= TIE_TOLERANCE;
    let plus_eq = tied(a.phi_plus, b.phi_plus);
    let minus_eq = tied(a.phi_minus, b.phi_minus);
    let a_plus = plus_eq || a.phi_plus > b.phi_plus;
    let a_minus = minus_eq || a.phi_minus < b.phi_minus;
    let b_plus = plus_eq || b.phi_plus > a.phi_plus;
    let b_minus = minus_eq || b.phi_minus < a.phi_minus;
    if plus_eq && minus_eq {
        PairRelation::Indifferent
    } else if a_plus && a_minus {
        PairRelation::Preferred
    } else if b_plus && b_minus {
        PairRelation::Inferior
    } else {
        PairRelation::Incomparable
    }
}

/// PROMETHEE I: intersection of the φ⁺ and φ⁻ preorders.
pub fn rank_promethee_i(flow: &FlowTable) -> PartialPreorder {
    let rows = flow.rows();
    let relations = rows
        .iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    if std::ptr::eq(a, b) {
                        PairRelation::Indifferent
                    } else {
                        compare_flows(a, b)
                    }
                })
                .collect()
        })
        .collect();
    PartialPreorder {
        ids: rows.iter().map(|f| f.id.clone()).collect(),
        relations,
    }
}

/// Matrix, Π, flows and ranking in one pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrometheeOutcome {
    pub flows: FlowTable,
    pub ranking: RankedOrder,
}

impl PrometheeOutcome {
    pub fn from_pi(pi: &PreferenceIndexMatrix) -> Result<Self> {
        let flows = flows(pi)?;
        let ranking = rank_promethee_ii(&flows);
        Ok(PrometheeOutcome { flows, ranking })
    }

    pub fn from_matrix(matrix: &DecisionMatrix) -> Result<Self> {
        Self::from_pi(&preference_index_matrix(matrix)?)
    }
}
