//! Reference solvers: exhaustive search, greedy variants and biased PageRank.

use std::cmp::Ordering;

use serde::Serialize;

use crate::applications::citation::CitationGraph;
use crate::error::{Error, Result};
use crate::knapsack::StandardizedInstance;
use crate::objective::Objective;
use crate::solvers::Solution;

/// Largest ground set [`brute_force_opt`] scans without an explicit override.
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub optimum_set: Vec<usize>,
    pub optimum_value: f64,
    pub subsets_scanned: u64,
}

/// Scans all `2^n` subsets. Ties go to the lexicographically smallest id set.
pub fn brute_force_opt(
    obj: &Objective,
    std: &StandardizedInstance,
    allow_large: bool,
) -> Result<ExactResult> {
    let n = std.n();
    if n > BRUTE_FORCE_LIMIT && !allow_large {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n >= 64 {
        return Err(Error::TooLarge { n, limit: 63 });
    }
    let mut best_set = Vec::new();
    let mut best_value = obj.evaluate(&[])?;
    let mut scanned = 1u64;
    let mut set = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        scanned += 1;
        set.clear();
        set.extend((1..=n).filter(|j| mask >> (j - 1) & 1 == 1));
        if !std.is_feasible(&set) {
            continue;
        }
        let value = obj.evaluate(&set)?;
        if value > best_value || (value == best_value && set < best_set) {
            best_value = value;
            best_set = set.clone();
        }
    }
    Ok(ExactResult {
        optimum_set: best_set,
        optimum_value: best_value,
        subsets_scanned: scanned,
    })
}

/// `k` rounds of the largest marginal gain, ties to the smallest id.
pub fn greedy_cardinality(obj: &Objective, k: usize) -> Result<Solution> {
    let n = obj.ground_size();
    let mut members: Vec<usize> = Vec::with_capacity(k.min(n));
    let mut chosen = vec![false; n + 1];
    let mut value = obj.evaluate(&[])?;
    for _ in 0..k.min(n) {
        let mut best: Option<(usize, f64)> = None;
        for j in (1..=n).filter(|&j| !chosen[j]) {
            let gain = obj.marginal_gain_from(j, &members, value)?;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((j, gain));
            }
        }
        let Some((j, gain)) = best else { break };
        chosen[j] = true;
        members.push(j);
        value += gain;
    }
    // Re-evaluate once so the reported value is the oracle value, not a running sum.
    let value = obj.evaluate(&members)?;
    Ok(Solution {
        elements: members,
        value,
    })
}

fn max_row_weight(std: &StandardizedInstance, j: usize) -> f64 {
    (0..std.d()).map(|i| std.weight(i, j)).fold(0.0, f64::max)
}

/// Greedy completion of `seed` by marginal gain per largest row weight.
fn complete_greedily(
    obj: &Objective,
    std: &StandardizedInstance,
    seed: &[usize],
) -> Result<Solution> {
    let n = std.n();
    let mut members = seed.to_vec();
    let mut in_set = vec![false; n + 1];
    for &j in seed {
        in_set[j] = true;
    }
    let mut totals = std.row_totals(seed);
    let mut value = obj.evaluate(&members)?;
    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, &taken) in in_set.iter().enumerate().skip(1) {
            if taken || !std.fits_with(&totals, j) {
                continue;
            }
            let gain = obj.marginal_gain_from(j, &members, value)?;
            let ratio = gain / max_row_weight(std, j);
            if best.is_none_or(|(_, r, _)| ratio > r) {
                best = Some((j, ratio, gain));
            }
        }
        match best {
            Some((j, _, gain)) if gain > 0.0 => {
                in_set[j] = true;
                members.push(j);
                for (i, t) in totals.iter_mut().enumerate() {
                    *t += std.weight(i, j);
                }
                value = obj.evaluate(&members)?;
            }
            _ => break,
        }
    }
    Ok(Solution {
        elements: members,
        value,
    })
}

fn for_each_seed<F>(n: usize, depth: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    fn rec<F>(
        start: usize,
        n: usize,
        depth: usize,
        seed: &mut Vec<usize>,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[usize]) -> Result<()>,
    {
        visit(seed)?;
        if seed.len() == depth {
            return Ok(());
        }
        for j in start..=n {
            seed.push(j);
            rec(j + 1, n, depth, seed, visit)?;
            seed.pop();
        }
        Ok(())
    }
    rec(1, n, depth, &mut Vec::with_capacity(depth), &mut visit)
}

fn better(candidate: &Solution, incumbent: &Solution) -> bool {
    match candidate.value.partial_cmp(&incumbent.value) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Equal) => candidate.sorted_elements() < incumbent.sorted_elements(),
        _ => false,
    }
}

/// Partial enumeration plus greedy completion.
///
/// Every feasible seed of at most `enum_depth` elements (the empty seed included) is
/// completed by repeatedly adding the fitting element with the largest
/// `Δ(j|S) / max_i c_{i,j}`. The best completion is compared with the best feasible
/// singleton. Depth 3 is the classical `O(n^5)` scheme; depth 0 or 1 is the cheap variant.
pub fn greedy_knapsack(
    obj: &Objective,
    std: &StandardizedInstance,
    enum_depth: usize,
) -> Result<Solution> {
    if enum_depth > 3 {
        return Err(Error::InvalidParameter(format!(
            "enumeration depth must be at most 3, got {enum_depth}"
        )));
    }
    let mut best = Solution {
        elements: Vec::new(),
        value: obj.evaluate(&[])?,
    };
    if enum_depth == 0 {
        for j in 1..=std.n() {
            if std.is_feasible(&[j]) {
                let single = Solution {
                    elements: vec![j],
                    value: obj.evaluate(&[j])?,
                };
                if better(&single, &best) {
                    best = single;
                }
            }
        }
    }
    for_each_seed(std.n(), enum_depth, |seed| {
        if !std.is_feasible(seed) {
            return Ok(());
        }
        let completed = complete_greedily(obj, std, seed)?;
        if better(&completed, &best) {
            best = completed;
        }
        Ok(())
    })?;
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRankScores {
    /// `scores[v - 1]` for vertex `v`.
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Power iteration for PageRank with teleportation restricted to `sources`.
///
/// A walker on vertex `i` follows one of `i`'s citations uniformly at random with
/// probability `damping` and otherwise jumps to a uniformly chosen source. Vertices that
/// cite nothing send all their mass to the sources.
pub fn biased_pagerank(
    graph: &CitationGraph,
    sources: &[usize],
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PageRankScores> {
    if sources.is_empty() {
        return Err(Error::InvalidArgument(
            "biased PageRank needs at least one source".into(),
        ));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    let n = graph.n();
    let mut teleport = vec![0.0; n];
    for &a in sources {
        graph.check_vertex(a)?;
        teleport[a - 1] = 1.0;
    }
    let count = teleport.iter().sum::<f64>();
    teleport.iter_mut().for_each(|t| *t /= count);

    let mut rank = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut dangling = 0.0;
        next.iter_mut().for_each(|x| *x = 0.0);
        for v in 1..=n {
            let cited = graph.references(v);
            if cited.is_empty() {
                dangling += rank[v - 1];
            } else {
                let share = rank[v - 1] / cited.len() as f64;
                for &w in cited {
                    next[w - 1] += share;
                }
            }
        }
        for (x, &t) in next.iter_mut().zip(&teleport) {
            *x = damping * (*x + dangling * t) + (1.0 - damping) * t;
        }
        residual = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if residual <= tol {
            break;
        }
    }
    Ok(PageRankScores {
        scores: rank,
        iterations,
        residual,
    })
}

/// Adds elements by decreasing score (ties to the smallest id), skipping any element that
/// would break a budget. `scores[k - 1]` belongs to element `k`.
pub fn pagerank_recommend(scores: &[f64], std: &StandardizedInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=std.n()).collect();
    order.sort_by(|&x, &y| {
        scores[y - 1]
            .partial_cmp(&scores[x - 1])
            .unwrap_or(Ordering::Equal)
            .then(x.cmp(&y))
    });
    let mut totals = vec![0.0; std.d()];
    let mut chosen = Vec::new();
    for j in order {
        if std.fits_with(&totals, j) {
            for (i, t) in totals.iter_mut().enumerate() {
                *t += std.weight(i, j);
            }
            chosen.push(j);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::KnapsackInstance;
    use crate::objective::make_coverage_objective;

    fn instance_a() -> (Objective, StandardizedInstance) {
        (
            make_coverage_objective(vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3], vec![4]]),
            KnapsackInstance::new(
                vec![vec![1.0, 1.0, 3.0, 1.0], vec![1.0, 2.0, 3.0, 1.0]],
                vec![4.0, 4.0],
            )
            .unwrap()
            .standardize(),
        )
    }

    #[test]
    fn brute_force_instance_a() {
        let (obj, std) = instance_a();
        let r = brute_force_opt(&obj, &std, false).unwrap();
        assert_eq!(r.optimum_value, 5.0);
        assert_eq!(r.optimum_set, vec![1, 2, 4]);
        assert_eq!(r.subsets_scanned, 16);
    }

    #[test]
    fn brute_force_guard() {
        let obj = Objective::from_fn(30, |s| s.len() as f64);
        let std = KnapsackInstance::new(vec![vec![1.0; 30]], vec![2.0])
            .unwrap()
            .standardize();
        assert!(matches!(
            brute_force_opt(&obj, &std, false),
            Err(Error::TooLarge { .. })
        ));
        let single = make_coverage_objective(vec![vec![0]]);
        let std = KnapsackInstance::new(vec![vec![1.0]], vec![1.0])
            .unwrap()
            .standardize();
        assert_eq!(
            brute_force_opt(&single, &std, false).unwrap().optimum_set,
            vec![1]
        );
    }

    #[test]
    fn greedy_cardinality_trace() {
        let obj = make_coverage_objective(vec![vec![0, 1], vec![1, 2], vec![2]]);
        let s = greedy_cardinality(&obj, 2).unwrap();
        assert_eq!(s.elements, vec![1, 2]);
        assert_eq!(s.value, 3.0);
        assert!(greedy_cardinality(&obj, 0).unwrap().elements.is_empty());
        assert_eq!(
            greedy_cardinality(&obj, 3).unwrap().sorted_elements(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn greedy_knapsack_trace() {
        let (obj, std) = instance_a();
        let s = greedy_knapsack(&obj, &std, 0).unwrap();
        assert_eq!(s.elements, vec![1, 2, 4]);
        assert_eq!(s.value, 5.0);
        for depth in 1..=3 {
            assert!(greedy_knapsack(&obj, &std, depth).unwrap().value >= 5.0);
        }
        assert!(greedy_knapsack(&obj, &std, 4).is_err());
        let single = make_coverage_objective(vec![vec![0, 1]]);
        let std = KnapsackInstance::new(vec![vec![2.0]], vec![3.0])
            .unwrap()
            .standardize();
        assert_eq!(greedy_knapsack(&single, &std, 0).unwrap().elements, vec![1]);
    }

    #[test]
    fn greedy_knapsack_prefers_big_singleton() {
        // Element 1 is cheap but worth little, element 2 fills the budget alone.
        let obj = make_coverage_objective(vec![vec![0], (1..10).collect()]);
        let std = KnapsackInstance::new(vec![vec![1.0, 10.0]], vec![10.0])
            .unwrap()
            .standardize();
        let s = greedy_knapsack(&obj, &std, 0).unwrap();
        assert_eq!(s.elements, vec![2]);
    }

    #[test]
    fn recommend_respects_budget() {
        let std = KnapsackInstance::new(vec![vec![1.0, 2.0, 2.0]], vec![3.0])
            .unwrap()
            .standardize();
        assert_eq!(pagerank_recommend(&[0.1, 0.5, 0.4], &std), vec![2, 1]);
        let roomy = KnapsackInstance::new(vec![vec![1.0, 1.0, 1.0]], vec![3.0])
            .unwrap()
            .standardize();
        let mut all = pagerank_recommend(&[0.3, 0.3, 0.4], &roomy);
        all.sort_unstable();
        assert_eq!(all, vec![1, 2, 3]);
        let tight = KnapsackInstance::new(vec![vec![1.0, 1.0, 1.0]], vec![1.0])
            .unwrap()
            .standardize();
        assert_eq!(pagerank_recommend(&[0.3, 0.1, 0.4], &tight), vec![3]);
    }
}
