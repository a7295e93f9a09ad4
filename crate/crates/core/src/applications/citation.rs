//! Literature recommendation over a citation network.
//!
//! Arc `(i, j)` means paper `i` cites paper `j`. Information about a source paper `a`
//! travels against the arcs, so a selected paper `s` detects `a` after `T(s, a)` hops,
//! the length of the shortest directed path `s → a`. The utility of a selection is the
//! expected penalty reduction `R(S) = Σ_a W(a) [T_max - min_{s ∈ S} T(s, a)]⁺`, subject to
//! budgets on recency, biased PageRank cost and reference count.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use super::Problem;
use crate::baselines::{pagerank_recommend, PageRankScores};
use crate::bounds::{online_bound, BoundVariant};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::objective::{Objective, Restricted, SetFunction};
use crate::solvers::{stream_dknapsack, StreamConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CitationGraph {
    references: Vec<Vec<usize>>,
    citers: Vec<Vec<usize>>,
    age_days: Vec<f64>,
    ref_counts: Vec<u32>,
}

impl CitationGraph {
    /// Vertices are `1..=n` with `n = age_days.len()`. Duplicate arcs are merged.
    pub fn new(arcs: &[(usize, usize)], age_days: Vec<f64>, ref_counts: Vec<u32>) -> Result<Self> {
        let n = age_days.len();
        if ref_counts.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} reference counts for {n} papers",
                ref_counts.len()
            )));
        }
        if let Some((k, a)) = age_days
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a > 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "paper {} has non-positive age {a}",
                k + 1
            )));
        }
        let mut references = vec![Vec::new(); n];
        let mut citers = vec![Vec::new(); n];
        for &(src, dst) in arcs {
            for v in [src, dst] {
                if v == 0 || v > n {
                    return Err(Error::InvalidArgument(format!(
                        "arc endpoint {v} outside 1..={n}"
                    )));
                }
            }
            if src == dst {
                return Err(Error::InvalidArgument(format!("paper {src} cites itself")));
            }
            references[src - 1].push(dst);
            citers[dst - 1].push(src);
        }
        for list in references.iter_mut().chain(citers.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let graph = CitationGraph {
            references,
            citers,
            age_days,
            ref_counts,
        };
        if !graph.is_acyclic() {
            return Err(Error::InvalidArgument("citation graph has a cycle".into()));
        }
        Ok(graph)
    }

    fn is_acyclic(&self) -> bool {
        let n = self.n();
        let mut indegree: Vec<usize> = self.citers.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (1..=n).filter(|&v| indegree[v - 1] == 0).collect();
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for &w in &self.references[v - 1] {
                indegree[w - 1] -= 1;
                if indegree[w - 1] == 0 {
                    queue.push_back(w);
                }
            }
        }
        visited == n
    }

    pub fn n(&self) -> usize {
        self.age_days.len()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n() {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} is not in the graph"
            )));
        }
        Ok(())
    }

    /// Papers cited by `v`.
    pub fn references(&self, v: usize) -> &[usize] {
        &self.references[v - 1]
    }

    /// Papers citing `v`.
    pub fn citers(&self, v: usize) -> &[usize] {
        &self.citers[v - 1]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.references
            .iter()
            .enumerate()
            .flat_map(|(k, refs)| refs.iter().map(move |&dst| (k + 1, dst)))
    }

    pub fn age_days(&self) -> &[f64] {
        &self.age_days
    }

    pub fn ref_counts(&self) -> &[u32] {
        &self.ref_counts
    }
}

/// `T(s, a)` for every vertex `s` and source `a`; `None` when `a` is unreachable from `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceTable {
    sources: Vec<usize>,
    /// `hops[k][s - 1] = T(s, sources[k])`.
    hops: Vec<Vec<Option<u32>>>,
}

impl DistanceTable {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn get(&self, s: usize, source_index: usize) -> Option<u32> {
        self.hops[source_index][s - 1]
    }
}

/// Breadth-first search from each source along reversed arcs.
pub fn detection_distances(graph: &CitationGraph, sources: &[usize]) -> Result<DistanceTable> {
    if sources.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one source paper is required".into(),
        ));
    }
    let mut hops = Vec::with_capacity(sources.len());
    for &a in sources {
        graph.check_vertex(a)?;
        let mut dist = vec![None; graph.n()];
        dist[a - 1] = Some(0u32);
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            let next = dist[v - 1].map(|h| h + 1);
            for &u in graph.citers(v) {
                if dist[u - 1].is_none() {
                    dist[u - 1] = next;
                    queue.push_back(u);
                }
            }
        }
        hops.push(dist);
    }
    Ok(DistanceTable {
        sources: sources.to_vec(),
        hops,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionModel {
    weights: Vec<f64>,
    t_max: u32,
    distances: DistanceTable,
}

impl DetectionModel {
    /// `weights` default to uniform over the sources and must sum to one.
    pub fn new(
        graph: &CitationGraph,
        sources: &[usize],
        weights: Option<Vec<f64>>,
        t_max: u32,
    ) -> Result<Self> {
        let mut distinct = sources.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != sources.len() {
            return Err(Error::InvalidArgument(
                "source papers must be distinct".into(),
            ));
        }
        if t_max == 0 {
            return Err(Error::InvalidArgument(
                "T_max must be a positive integer".into(),
            ));
        }
        let weights = weights.unwrap_or_else(|| vec![1.0 / sources.len() as f64; sources.len()]);
        if weights.len() != sources.len() {
            return Err(Error::InvalidArgument(format!(
                "{} source weights for {} sources",
                weights.len(),
                sources.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "source weights must be nonnegative and sum to 1, got total {total}"
            )));
        }
        Ok(DetectionModel {
            weights,
            t_max,
            distances: detection_distances(graph, sources)?,
        })
    }

    pub fn sources(&self) -> &[usize] {
        self.distances.sources()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    pub fn distances(&self) -> &DistanceTable {
        &self.distances
    }
}

pub struct PenaltyReduction {
    model: Arc<DetectionModel>,
}

impl SetFunction for PenaltyReduction {
    fn ground_size(&self) -> usize {
        self.model.distances.hops.first().map_or(0, Vec::len)
    }

    fn value(&self, set: &[usize]) -> f64 {
        let t_max = self.model.t_max;
        self.model
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let nearest = set
                    .iter()
                    .filter_map(|&s| self.model.distances.get(s, k))
                    .min();
                match nearest {
                    Some(t) if t < t_max => w * (t_max - t) as f64,
                    _ => 0.0,
                }
            })
            .sum()
    }
}

/// `R(S)` over every vertex of the graph.
pub fn citation_objective(model: Arc<DetectionModel>) -> Objective {
    Objective::new(PenaltyReduction { model })
}

/// Maps a PageRank score onto `(1, 2]`: `1 + 1 / (1 + ρ)`.
pub fn xi_map(score: f64) -> Result<f64> {
    if score.is_nan() || score < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "PageRank score must be nonnegative, got {score}"
        )));
    }
    Ok(1.0 + 1.0 / (1.0 + score))
}

#[derive(Debug)]
pub struct LiteratureProblem {
    pub problem: Problem,
    /// Added to every reference count (1 when some paper lists no references, else 0).
    pub reference_shift: f64,
    /// PageRank score per element of `problem`.
    pub element_scores: Vec<f64>,
}

/// Three rows: age in days, `ξ(ρ(j))`, and reference count.
pub fn build_literature_instance(
    graph: &CitationGraph,
    model: Arc<DetectionModel>,
    scores: &PageRankScores,
    budgets: [f64; 3],
) -> Result<LiteratureProblem> {
    if scores.scores.len() != graph.n() {
        return Err(Error::InvalidArgument(
            "PageRank scores do not match the graph".into(),
        ));
    }
    let shift = if graph.ref_counts.contains(&0) {
        1.0
    } else {
        0.0
    };
    let xi: Vec<f64> = scores
        .scores
        .iter()
        .map(|&r| xi_map(r))
        .collect::<Result<_>>()?;
    let refs = graph.ref_counts.iter().map(|&r| r as f64 + shift).collect();
    let (instance, labels) =
        KnapsackInstance::admissible(vec![graph.age_days.clone(), xi, refs], budgets.to_vec())?;
    let full: Arc<dyn SetFunction> = Arc::new(PenaltyReduction { model });
    let element_scores = labels.iter().map(|&v| scores.scores[v - 1]).collect();
    Ok(LiteratureProblem {
        problem: Problem {
            objective: Objective::new(Restricted::new(full, labels.clone())),
            instance,
            labels,
        },
        reference_shift: shift,
        element_scores,
    })
}

/// One point of a budget sensitivity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelinePoint {
    pub streaming: f64,
    pub bound: f64,
    pub pagerank: f64,
}

impl PipelinePoint {
    /// `(bound - streaming) / bound`, zero when the bound is zero.
    pub fn relative_gap(&self) -> f64 {
        if self.bound > 0.0 {
            (self.bound - self.streaming) / self.bound
        } else {
            0.0
        }
    }
}

/// Streams the vertices in id order, then reports the solution value, its online bound
/// and the value of the PageRank recommendation under the same budgets.
pub fn run_literature_pipeline(
    graph: &CitationGraph,
    model: Arc<DetectionModel>,
    scores: &PageRankScores,
    budgets: [f64; 3],
    epsilon: f64,
) -> Result<PipelinePoint> {
    let lit = build_literature_instance(graph, model, scores, budgets)?;
    let std = lit.problem.instance.standardize();
    let obj = &lit.problem.objective;
    let (solution, _) = stream_dknapsack(obj, &std, 1..=std.n(), StreamConfig::new(epsilon))?;
    let bound = online_bound(obj, &std, &solution.elements, BoundVariant::FullBudget)?;
    let ranked = pagerank_recommend(&lit.element_scores, &std);
    Ok(PipelinePoint {
        streaming: solution.value,
        bound: bound.online_bound,
        pagerank: obj.evaluate(&ranked)?,
    })
}
