//! Concrete recommendation problems built on the generic solvers.

pub mod citation;
pub mod news;

use crate::knapsack::KnapsackInstance;
use crate::objective::Objective;

/// An objective and its knapsack instance over the same dense ids.
///
/// Items that exceed a budget on their own are dropped before the ids are assigned;
/// `labels[k - 1]` is the original id (article or vertex) of element `k`.
#[derive(Debug)]
pub struct Problem {
    pub objective: Objective,
    pub instance: KnapsackInstance,
    pub labels: Vec<usize>,
}

impl Problem {
    pub fn label_set(&self, elements: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = elements.iter().map(|&k| self.labels[k - 1]).collect();
        ids.sort_unstable();
        ids
    }
}
