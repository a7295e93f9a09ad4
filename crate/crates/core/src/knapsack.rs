//! The `d`-knapsack constraint `C x_S ≤ b` and its standardized form.
//!
//! Standardization rescales every row to the common budget `b = max_i b_i` and then divides
//! all weights by the smallest rescaled weight `c'`, so every weight is at least one and every
//! row shares the budget `b / c'`. Feasibility of each subset is unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack applied to every budget comparison.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// `d` rows of positive weights over `n` elements and one positive budget per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    weights: Vec<Vec<f64>>,
    budgets: Vec<f64>,
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidInstance(format!(
            "{what} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

impl KnapsackInstance {
    /// `weights[i][j - 1]` is the weight of element `j` in row `i`.
    pub fn new(weights: Vec<Vec<f64>>, budgets: Vec<f64>) -> Result<Self> {
        if budgets.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one knapsack row is required".into(),
            ));
        }
        if weights.len() != budgets.len() {
            return Err(Error::InvalidInstance(format!(
                "{} weight rows for {} budgets",
                weights.len(),
                budgets.len()
            )));
        }
        let n = weights[0].len();
        for (i, (row, &budget)) in weights.iter().zip(&budgets).enumerate() {
            check_positive(budget, &format!("budget of row {i}"))?;
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} weights, expected {n}",
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                check_positive(c, &format!("weight of element {} in row {i}", j + 1))?;
                if c > budget {
                    return Err(Error::InvalidInstance(format!(
                        "weight {c} of element {} exceeds budget {budget} of row {i}",
                        j + 1
                    )));
                }
            }
        }
        Ok(KnapsackInstance { weights, budgets })
    }

    /// Like [`KnapsackInstance::new`], but first drops every element that exceeds some
    /// budget on its own (such an element can never be selected). Returns the instance and
    /// the original 1-based ids of the kept elements.
    pub fn admissible(weights: Vec<Vec<f64>>, budgets: Vec<f64>) -> Result<(Self, Vec<usize>)> {
        if weights.len() != budgets.len() || weights.is_empty() {
            return Self::new(weights, budgets).map(|inst| (inst, Vec::new()));
        }
        let n = weights[0].len();
        let kept: Vec<usize> = (1..=n)
            .filter(|&j| {
                weights
                    .iter()
                    .zip(&budgets)
                    .all(|(row, &b)| row.get(j - 1).is_none_or(|&c| c <= b))
            })
            .collect();
        let rows = weights
            .iter()
            .map(|row| {
                kept.iter()
                    .filter_map(|&j| row.get(j - 1).copied())
                    .collect()
            })
            .collect();
        Ok((Self::new(rows, budgets)?, kept))
    }

    pub fn d(&self) -> usize {
        self.budgets.len()
    }

    pub fn n(&self) -> usize {
        self.weights[0].len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn is_feasible(&self, set: &[usize]) -> bool {
        self.weights.iter().zip(&self.budgets).all(|(row, &b)| {
            let total: f64 = set.iter().map(|&j| row[j - 1]).sum();
            total <= b * (1.0 + FEASIBILITY_SLACK)
        })
    }

    pub fn standardize(&self) -> StandardizedInstance {
        let b = self
            .budgets
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let rescaled: Vec<Vec<f64>> = self
            .weights
            .iter()
            .zip(&self.budgets)
            .map(|(row, &bi)| row.iter().map(|&c| b * c / bi).collect())
            .collect();
        let c_prime = rescaled
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        // An empty ground set has no weights to normalize against.
        let c_prime = if c_prime.is_finite() { c_prime } else { 1.0 };
        let weights = rescaled
            .into_iter()
            .map(|row| row.into_iter().map(|c| c / c_prime).collect())
            .collect();
        StandardizedInstance {
            weights,
            budget: b / c_prime,
            scale: ScaleRecord {
                max_budget: b,
                c_prime,
                original_budgets: self.budgets.clone(),
            },
        }
    }
}

/// How a standardized instance was derived from its original.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub max_budget: f64,
    pub c_prime: f64,
    pub original_budgets: Vec<f64>,
}

/// All weights `≥ 1`, one shared budget `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedInstance {
    weights: Vec<Vec<f64>>,
    budget: f64,
    scale: ScaleRecord,
}

impl StandardizedInstance {
    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn n(&self) -> usize {
        self.weights[0].len()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn scale(&self) -> &ScaleRecord {
        &self.scale
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Weight of element `id` (1-based) in row `row` (0-based).
    #[inline]
    pub fn weight(&self, row: usize, id: usize) -> f64 {
        self.weights[row][id - 1]
    }

    pub fn row_totals(&self, set: &[usize]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| set.iter().map(|&j| row[j - 1]).sum())
            .collect()
    }

    #[inline]
    pub fn fits(&self, total: f64) -> bool {
        total <= self.budget * (1.0 + FEASIBILITY_SLACK)
    }

    pub fn is_feasible(&self, set: &[usize]) -> bool {
        self.row_totals(set).into_iter().all(|t| self.fits(t))
    }

    /// Whether `id` can join a set whose per-row totals are `totals`.
    pub fn fits_with(&self, totals: &[f64], id: usize) -> bool {
        totals
            .iter()
            .enumerate()
            .all(|(i, &t)| self.fits(t + self.weight(i, id)))
    }

    /// The instance viewed as an ordinary knapsack instance (every budget equal to `b`).
    pub fn to_instance(&self) -> KnapsackInstance {
        KnapsackInstance {
            weights: self.weights.clone(),
            budgets: vec![self.budget; self.d()],
        }
    }

    /// Per-row value-per-weight threshold `2v / (b (1 + 2d))` for a guess `v` of the optimum.
    #[inline]
    pub fn ratio_threshold(&self, v: f64) -> f64 {
        2.0 * v / (self.budget * (1.0 + 2.0 * self.d() as f64))
    }
}

/// Element `j` is big at guess `v` through constraint row `row`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BigElementHit {
    pub element: usize,
    pub row: usize,
    pub value_per_weight: f64,
}

/// Returns the first row `i` (0-based) with `c_{i,j} ≥ b/2` and
/// `f({j}) / c_{i,j} ≥ 2v / (b (1 + 2d))`, if any.
pub fn classify_big_element(
    std: &StandardizedInstance,
    j: usize,
    singleton_value: f64,
    v: f64,
) -> Option<BigElementHit> {
    let half = std.budget() / 2.0;
    let threshold = std.ratio_threshold(v);
    (0..std.d()).find_map(|row| {
        let c = std.weight(row, j);
        let ratio = singleton_value / c;
        (c >= half && ratio >= threshold).then_some(BigElementHit {
            element: j,
            row,
            value_per_weight: ratio,
        })
    })
}
