//! Upper bounds on the optimum.
//!
//! The offline bound follows from the approximation guarantee alone. The online bound is
//! data dependent: for each row it solves the fractional knapsack over the marginal gains
//! `Δ(s | S)` of the remaining elements and keeps the smallest row result.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::knapsack::StandardizedInstance;
use crate::objective::Objective;

/// `(1 + 2d) / (1 - (1 + 2d) ε) · f(S)`, valid for `0 ≤ ε < 1/(1+2d)`.
pub fn offline_bound(solution_value: f64, d: usize, epsilon: f64) -> Result<f64> {
    let k = 1.0 + 2.0 * d as f64;
    if !(epsilon >= 0.0 && epsilon < 1.0 / k) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in [0, {}) for d = {d}, got {epsilon}",
            1.0 / k
        )));
    }
    Ok(k / (1.0 - k * epsilon) * solution_value)
}

/// Which fill rule the per-row fractional knapsack uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundVariant {
    /// The remaining elements get the full budget `b`. A certified upper bound.
    #[default]
    FullBudget,
    /// Greedy fill of the capacity left after `S`, skipping elements that do not fit,
    /// with the fractional term taken from the best-ranked element that did not fit.
    /// Not a certified bound.
    ResidualBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowBound {
    /// 1-based rank of the fractional element; `None` when every remaining element fits.
    pub k: Option<usize>,
    pub fractional_element: Option<usize>,
    pub lambda: f64,
    pub delta: f64,
    /// Remaining elements by decreasing `Δ(s|S) / c_{i,s}`, ties by id.
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub solution_value: f64,
    pub online_bound: f64,
    pub per_row: Vec<RowBound>,
}

impl BoundReport {
    pub fn offline_bound(&self, d: usize, epsilon: f64) -> Result<f64> {
        offline_bound(self.solution_value, d, epsilon)
    }
}

/// `f(S) + min_i δ_i`.
pub fn online_bound(
    obj: &Objective,
    std: &StandardizedInstance,
    set: &[usize],
    variant: BoundVariant,
) -> Result<BoundReport> {
    for &j in set {
        obj.check_id(j)?;
    }
    if !std.is_feasible(set) {
        return Err(Error::InvalidArgument(
            "online bound needs a feasible set".into(),
        ));
    }
    let value = obj.evaluate(set)?;
    let mut in_set = vec![false; std.n() + 1];
    for &j in set {
        in_set[j] = true;
    }
    let rest: Vec<usize> = (1..=std.n()).filter(|&j| !in_set[j]).collect();
    let mut gains = vec![0.0; std.n() + 1];
    for &s in &rest {
        gains[s] = obj.marginal_gain_from(s, set, value)?;
    }
    let b = std.budget();
    let per_row: Vec<RowBound> = (0..std.d())
        .map(|i| {
            let ratio = |s: usize| gains[s] / std.weight(i, s);
            let mut order = rest.clone();
            order.sort_by(|&x, &y| {
                ratio(y)
                    .partial_cmp(&ratio(x))
                    .unwrap_or(Ordering::Equal)
                    .then(x.cmp(&y))
            });
            match variant {
                BoundVariant::FullBudget => full_budget_row(std, i, b, &gains, order),
                BoundVariant::ResidualBudget => {
                    let used: f64 = set.iter().map(|&j| std.weight(i, j)).sum();
                    residual_row(std, i, b, used, &gains, order)
                }
            }
        })
        .collect();
    let slack = per_row
        .iter()
        .map(|r| r.delta)
        .fold(f64::INFINITY, f64::min);
    let slack = if slack.is_finite() { slack } else { 0.0 };
    Ok(BoundReport {
        solution_value: value,
        online_bound: value + slack,
        per_row,
    })
}

fn full_budget_row(
    std: &StandardizedInstance,
    row: usize,
    b: f64,
    gains: &[f64],
    order: Vec<usize>,
) -> RowBound {
    let mut weight = 0.0;
    let mut delta = 0.0;
    for (pos, &s) in order.iter().enumerate() {
        let c = std.weight(row, s);
        if weight + c > b {
            let lambda = (b - weight) / c;
            return RowBound {
                k: Some(pos + 1),
                fractional_element: Some(s),
                lambda,
                delta: delta + lambda * gains[s],
                order,
            };
        }
        weight += c;
        delta += gains[s];
    }
    RowBound {
        k: None,
        fractional_element: None,
        lambda: 0.0,
        delta,
        order,
    }
}

fn residual_row(
    std: &StandardizedInstance,
    row: usize,
    b: f64,
    used: f64,
    gains: &[f64],
    order: Vec<usize>,
) -> RowBound {
    let mut weight = 0.0;
    let mut delta = 0.0;
    let mut skipped = None;
    for &s in &order {
        let c = std.weight(row, s);
        if used + weight + c <= b {
            weight += c;
            delta += gains[s];
        } else if skipped.is_none() {
            skipped = Some(s);
        }
    }
    let (lambda, k, delta) = match skipped {
        Some(s) => {
            let lambda = (b - weight) / std.weight(row, s);
            let k = order.iter().position(|&x| x == s).map(|p| p + 1);
            (lambda, k, delta + lambda * gains[s])
        }
        None => (0.0, None, delta),
    };
    RowBound {
        k,
        fractional_element: skipped,
        lambda,
        delta,
        order,
    }
}
