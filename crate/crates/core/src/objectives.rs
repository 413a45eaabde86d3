//! Mean-variance evaluators: expected return, portfolio variance, and the
//! budget and sign constraints on allocation weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
const PSD_SAMPLES: usize = 256;

/// Penalty per unit of constraint violation when a portfolio is scored.
pub const DEFAULT_PENALTY: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioSpec {
    /// Expected return per asset.
    pub mu: Vec<f64>,
    /// Covariance matrix.
    pub cov: Vec<Vec<f64>>,
    #[serde(default)]
    pub target_return: Option<f64>,
    #[serde(default)]
    pub variance_budget: Option<f64>,
}

impl PortfolioSpec {
    pub fn new(mu: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let spec = PortfolioSpec {
            mu,
            cov,
            target_return: None,
            variance_budget: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n_assets(&self) -> usize {
        self.mu.len()
    }

    /// Shape, finiteness, symmetry, then a positive-semidefiniteness probe on
    /// unit vectors, pairwise sums/differences and seeded random directions.
    pub fn validate(&self) -> Result<()> {
        let n = self.mu.len();
        if n == 0 {
            return Err(Error::InvalidPortfolio("no assets".into()));
        }
        if self.cov.len() != n || self.cov.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPortfolio(format!(
                "covariance must be {n}x{n} to match {n} expected returns"
            )));
        }
        if self.mu.iter().chain(self.cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPortfolio("non-finite entry".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (self.cov[i][j] - self.cov[j][i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidPortfolio(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let scale = self
            .cov
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        let tol = -1e-12 * scale;
        let check = |x: &[f64]| {
            if quadratic_form(&self.cov, x) < tol {
                Err(Error::InvalidPortfolio("covariance is not positive semidefinite".into()))
            } else {
                Ok(())
            }
        };
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = 1.0;
            check(&x)?;
            for j in i + 1..n {
                x[j] = 1.0;
                check(&x)?;
                x[j] = -1.0;
                check(&x)?;
                x[j] = 0.0;
            }
            x[i] = 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..PSD_SAMPLES {
            for v in x.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            check(&x)?;
        }
        Ok(())
    }
}

fn quadratic_form(cov: &[Vec<f64>], w: &[f64]) -> f64 {
    cov.iter()
        .zip(w)
        .map(|(row, wi)| wi * row.iter().zip(w).map(|(c, wj)| c * wj).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(w: Vec<f64>) -> Self {
        WeightVector(w)
    }
}

fn check_dims(w: &WeightVector, p: &PortfolioSpec) -> Result<()> {
    if w.len() != p.n_assets() {
        return Err(Error::DimensionMismatch {
            expected: p.n_assets(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Σ w_i μ_i.
pub fn expected_return(w: &WeightVector, p: &PortfolioSpec) -> Result<f64> {
    check_dims(w, p)?;
    Ok(w.0.iter().zip(&p.mu).map(|(w, m)| w * m).sum())
}

/// Σ_i Σ_j w_i w_j σ_ij.
pub fn portfolio_variance(w: &WeightVector, p: &PortfolioSpec) -> Result<f64> {
    check_dims(w, p)?;
    Ok(quadratic_form(&p.cov, &w.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum WeightViolation {
    /// Weights sum to `1 + excess`.
    Sum { excess: f64 },
    /// Weight at `index` (0-based) is negative.
    Negative { index: usize, value: f64 },
}

impl WeightViolation {
    pub fn magnitude(&self) -> f64 {
        match *self {
            WeightViolation::Sum { excess } => excess.abs(),
            WeightViolation::Negative { value, .. } => -value,
        }
    }
}

impl std::fmt::Display for WeightViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightViolation::Sum { excess } => write!(f, "weights sum to 1{excess:+.6}"),
            WeightViolation::Negative { index, value } => {
                write!(f, "weight #{} is negative ({value:.6})", index + 1)
            }
        }
    }
}

/// Empty when both the unit-budget and nonnegativity constraints hold.
pub fn validate_weights(w: &WeightVector) -> Vec<WeightViolation> {
    let mut out = Vec::new();
    let excess = w.0.iter().sum::<f64>() - 1.0;
    if excess.abs() > WEIGHT_SUM_TOLERANCE {
        out.push(WeightViolation::Sum { excess });
    }
    out.extend(
        w.0.iter()
            .enumerate()
            .filter(|(_, v)| **v < 0.0)
            .map(|(index, &value)| WeightViolation::Negative { index, value }),
    );
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioEvaluation {
    pub expected_return: f64,
    pub variance: f64,
    pub weight_violations: Vec<WeightViolation>,
    /// Shortfall below the target return, when one is set.
    pub return_shortfall: f64,
    /// Excess over the variance budget, when one is set.
    pub variance_excess: f64,
    /// Expected return minus `penalty` times the total violation.
    pub penalized_score: f64,
}

pub fn evaluate_portfolio(w: &WeightVector, p: &PortfolioSpec, penalty: f64) -> Result<PortfolioEvaluation> {
    let er = expected_return(w, p)?;
    let var = portfolio_variance(w, p)?;
    let weight_violations = validate_weights(w);
    let return_shortfall = p.target_return.map_or(0.0, |t| (t - er).max(0.0));
    let variance_excess = p.variance_budget.map_or(0.0, |b| (var - b).max(0.0));
    let total: f64 = weight_violations.iter().map(WeightViolation::magnitude).sum::<f64>()
        + return_shortfall
        + variance_excess;
    Ok(PortfolioEvaluation {
        expected_return: er,
        variance: var,
        weight_violations,
        return_shortfall,
        variance_excess,
        penalized_score: er - penalty * total,
    })
}
