//! Threshold-based streaming solvers.
//!
//! Every solver reads its stream exactly once, in order, and keeps only the candidate
//! sets it is building. For a guess `v` of the optimum, an element `j` joins the candidate
//! set `S_v` when it fits in every row and `Δ(j | S_v) / c_{i,j} ≥ 2v / (b (1 + 2d))` for
//! every row `i`. Guesses are integer powers of `1 + (1 + 2d) ε` inside a window anchored at
//! `m`, the largest singleton value per weight seen so far.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{classify_big_element, BigElementHit, StandardizedInstance};
use crate::objective::Objective;

/// Slack on the threshold-grid window edges; absorbs `powi` / `ln` rounding.
const GRID_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub elements: Vec<usize>,
    pub value: f64,
}

impl Solution {
    pub fn sorted_elements(&self) -> Vec<usize> {
        let mut ids = self.elements.clone();
        ids.sort_unstable();
        ids
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveMetrics {
    pub elements_seen: u64,
    pub oracle_calls: u64,
    /// Largest total number of elements held across all candidate sets at any time.
    pub peak_stored_elements: usize,
    pub max_grid_size: usize,
    pub passes: u32,
}

impl SolveMetrics {
    /// Counters add, high-water marks take the maximum.
    pub fn merge(self, other: SolveMetrics) -> SolveMetrics {
        SolveMetrics {
            elements_seen: self.elements_seen + other.elements_seen,
            oracle_calls: self.oracle_calls + other.oracle_calls,
            peak_stored_elements: self.peak_stored_elements.max(other.peak_stored_elements),
            max_grid_size: self.max_grid_size.max(other.max_grid_size),
            passes: self.passes + other.passes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamConfig {
    pub epsilon: f64,
    /// Stop at the first big element and return it alone.
    pub faithful_early_exit: bool,
}

impl StreamConfig {
    pub fn new(epsilon: f64) -> Self {
        StreamConfig {
            epsilon,
            faithful_early_exit: false,
        }
    }
}

/// Rejects `ε` outside `(0, 1/(1+2d))`.
pub fn check_epsilon(epsilon: f64, d: usize) -> Result<()> {
    let limit = 1.0 / (1.0 + 2.0 * d as f64);
    if !(epsilon > 0.0 && epsilon < limit) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, {limit}) for d = {d}, got {epsilon}"
        )));
    }
    Ok(())
}

/// Ratio `1 + (1 + 2d) ε` of consecutive guesses.
pub fn grid_base(d: usize, epsilon: f64) -> f64 {
    1.0 + (1.0 + 2.0 * d as f64) * epsilon
}

/// Exponent range `l` with `m / base ≤ base^l ≤ upper_factor · b · m`; `None` when empty.
fn grid_exponents(m: f64, b: f64, base: f64, upper_factor: f64) -> Option<(i32, i32)> {
    if !(m > 0.0 && m.is_finite()) {
        return None;
    }
    let lower = m / base * (1.0 - GRID_SLACK);
    let upper = upper_factor * b * m * (1.0 + GRID_SLACK);
    let ln_base = base.ln();
    let mut lo = (lower.ln() / ln_base).floor() as i32 - 1;
    while base.powi(lo) < lower {
        lo += 1;
    }
    let mut hi = (upper.ln() / ln_base).ceil() as i32 + 1;
    while base.powi(hi) > upper {
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

/// Ascending integer powers of `1 + (1+2d)ε` in `[m / (1+(1+2d)ε), upper_factor · b · m]`.
///
/// `upper_factor` is 1 when `m` is known exactly and 2 when it is a running maximum.
pub fn build_threshold_grid(
    m: f64,
    b: f64,
    d: usize,
    epsilon: f64,
    upper_factor: f64,
) -> Result<Vec<f64>> {
    check_epsilon(epsilon, d)?;
    let base = grid_base(d, epsilon);
    Ok(match grid_exponents(m, b, base, upper_factor) {
        Some((lo, hi)) => (lo..=hi).map(|l| base.powi(l)).collect(),
        None => Vec::new(),
    })
}

/// Upper bound on the grid size used by the one-pass solver:
/// `⌈log_{base}(2b · base²)⌉ + 1`.
pub fn grid_size_cap(b: f64, d: usize, epsilon: f64) -> usize {
    let base = grid_base(d, epsilon);
    ((2.0 * b * base * base).ln() / base.ln()).ceil() as usize + 1
}

/// One candidate set `S_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub exponent: i32,
    pub threshold: f64,
    pub members: Vec<usize>,
    pub row_totals: Vec<f64>,
    pub value: f64,
}

impl CandidateSet {
    fn empty(exponent: i32, threshold: f64, d: usize, empty_value: f64) -> Self {
        CandidateSet {
            exponent,
            threshold,
            members: Vec::new(),
            row_totals: vec![0.0; d],
            value: empty_value,
        }
    }

    /// Runs the insertion test for `j`; returns whether `j` was added.
    fn offer(
        &mut self,
        obj: &Objective,
        std: &StandardizedInstance,
        j: usize,
        singleton: f64,
    ) -> Result<bool> {
        if !std.fits_with(&self.row_totals, j) {
            return Ok(false);
        }
        let threshold = std.ratio_threshold(self.threshold);
        let d = std.d();
        // Δ(j|S) ≤ f({j}) for monotone submodular f with f(∅) ≥ 0.
        if (0..d).any(|i| singleton / std.weight(i, j) < threshold) {
            return Ok(false);
        }
        self.members.push(j);
        let extended = obj.evaluate(&self.members)?;
        let gain = extended - self.value;
        if (0..d).all(|i| gain / std.weight(i, j) >= threshold) {
            for (i, total) in self.row_totals.iter_mut().enumerate() {
                *total += std.weight(i, j);
            }
            self.value = extended;
            Ok(true)
        } else {
            self.members.pop();
            Ok(false)
        }
    }
}

/// Running state shared by the known-`m` and one-pass solvers.
pub struct StreamState<'a> {
    obj: &'a Objective,
    std: &'a StandardizedInstance,
    config: StreamConfig,
    base: f64,
    /// Running maximum of `f({j}) / c_{i,j}`.
    pub m: f64,
    pub sieves: BTreeMap<i32, CandidateSet>,
    /// Best big element seen so far with its singleton value.
    pub big_hit: Option<(BigElementHit, f64)>,
    pub metrics: SolveMetrics,
    empty_value: Option<f64>,
    calls_at_start: u64,
}

impl<'a> StreamState<'a> {
    fn new(
        obj: &'a Objective,
        std: &'a StandardizedInstance,
        config: StreamConfig,
    ) -> Result<Self> {
        check_epsilon(config.epsilon, std.d())?;
        if obj.ground_size() != std.n() {
            return Err(Error::InvalidArgument(format!(
                "objective has {} elements but the instance has {}",
                obj.ground_size(),
                std.n()
            )));
        }
        Ok(StreamState {
            obj,
            std,
            config,
            base: grid_base(std.d(), config.epsilon),
            m: 0.0,
            sieves: BTreeMap::new(),
            big_hit: None,
            metrics: SolveMetrics {
                passes: 1,
                ..SolveMetrics::default()
            },
            empty_value: None,
            calls_at_start: obj.eval_count(),
        })
    }

    fn empty_value(&mut self) -> Result<f64> {
        match self.empty_value {
            Some(v) => Ok(v),
            None => {
                let v = self.obj.evaluate(&[])?;
                self.empty_value = Some(v);
                Ok(v)
            }
        }
    }

    /// Moves the grid to `upper_factor` around the current `m`: new guesses start empty,
    /// guesses that left the window are dropped with their sets.
    fn reset_window(&mut self, upper_factor: f64) -> Result<()> {
        let Some((lo, hi)) = grid_exponents(self.m, self.std.budget(), self.base, upper_factor)
        else {
            self.sieves.clear();
            return Ok(());
        };
        self.sieves.retain(|&l, _| l >= lo && l <= hi);
        if self.sieves.len() < (hi - lo + 1) as usize {
            let empty = self.empty_value()?;
            let d = self.std.d();
            for l in lo..=hi {
                let base = self.base;
                self.sieves
                    .entry(l)
                    .or_insert_with(|| CandidateSet::empty(l, base.powi(l), d, empty));
            }
        }
        self.metrics.max_grid_size = self.metrics.max_grid_size.max(self.sieves.len());
        Ok(())
    }

    /// Big-element test against the largest current guess for which `j` qualifies.
    fn big_element(&self, j: usize, singleton: f64) -> Option<BigElementHit> {
        self.sieves
            .values()
            .rev()
            .find_map(|s| classify_big_element(self.std, j, singleton, s.threshold))
    }

    /// Processes one element; returns a solution when the faithful early exit fires.
    fn step(&mut self, j: usize, update_m: Option<f64>) -> Result<Option<Solution>> {
        let singleton = self.obj.evaluate(&[j])?;
        self.metrics.elements_seen += 1;
        if let Some(upper_factor) = update_m {
            for i in 0..self.std.d() {
                self.m = self.m.max(singleton / self.std.weight(i, j));
            }
            self.reset_window(upper_factor)?;
        }
        if let Some(hit) = self.big_element(j, singleton) {
            if self.config.faithful_early_exit {
                return Ok(Some(Solution {
                    elements: vec![j],
                    value: singleton,
                }));
            }
            if self.big_hit.is_none_or(|(_, best)| singleton > best) {
                self.big_hit = Some((hit, singleton));
            }
        }
        for sieve in self.sieves.values_mut() {
            sieve.offer(self.obj, self.std, j, singleton)?;
        }
        let stored = self.sieves.values().map(|s| s.members.len()).sum::<usize>();
        self.metrics.peak_stored_elements = self.metrics.peak_stored_elements.max(stored);
        Ok(None)
    }

    fn finish(mut self, early: Option<Solution>) -> Result<(Solution, SolveMetrics)> {
        let solution = match early {
            Some(s) => s,
            None => {
                // Ascending guesses with strict improvement: ties go to the smallest guess.
                let mut best: Option<&CandidateSet> = None;
                for sieve in self.sieves.values() {
                    if best.is_none_or(|b| sieve.value > b.value) {
                        best = Some(sieve);
                    }
                }
                let mut solution = match best {
                    Some(s) => Solution {
                        elements: s.members.clone(),
                        value: s.value,
                    },
                    None => Solution {
                        elements: Vec::new(),
                        value: self.empty_value()?,
                    },
                };
                if let Some((hit, value)) = self.big_hit {
                    if value > solution.value {
                        solution = Solution {
                            elements: vec![hit.element],
                            value,
                        };
                    }
                }
                solution
            }
        };
        self.metrics.oracle_calls = self.obj.eval_count() - self.calls_at_start;
        Ok((solution, self.metrics))
    }
}

/// Single-threshold streaming for the cardinality constraint `|S| ≤ k`, given a guess `v`
/// of the optimum: keeps `j` when `|S| < k` and `Δ(j|S) ≥ v / (2k)`.
pub fn simple_stream_cardinality<I>(
    obj: &Objective,
    stream: I,
    k: usize,
    v: f64,
) -> Result<Solution>
where
    I: IntoIterator<Item = usize>,
{
    let mut members = Vec::new();
    let mut value = obj.evaluate(&[])?;
    if k == 0 {
        return Ok(Solution {
            elements: members,
            value,
        });
    }
    let threshold = v / (2.0 * k as f64);
    for j in stream {
        obj.check_id(j)?;
        if members.len() >= k {
            continue;
        }
        members.push(j);
        let extended = obj.evaluate(&members)?;
        if extended - value >= threshold {
            value = extended;
        } else {
            members.pop();
        }
    }
    Ok(Solution {
        elements: members,
        value,
    })
}

/// One candidate set for a known guess `v` of the optimum. Returns the first big element
/// on its own as soon as one arrives.
pub fn stream_opt_known<I>(
    obj: &Objective,
    std: &StandardizedInstance,
    stream: I,
    v: f64,
) -> Result<Solution>
where
    I: IntoIterator<Item = usize>,
{
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "guess v must be positive, got {v}"
        )));
    }
    let empty = obj.evaluate(&[])?;
    let mut sieve = CandidateSet::empty(0, v, std.d(), empty);
    for j in stream {
        let singleton = obj.evaluate(&[j])?;
        if classify_big_element(std, j, singleton, v).is_some() {
            return Ok(Solution {
                elements: vec![j],
                value: singleton,
            });
        }
        sieve.offer(obj, std, j, singleton)?;
    }
    Ok(Solution {
        elements: sieve.members,
        value: sieve.value,
    })
}

/// Fixed grid in `[m / base, b m]` for an exactly known `m`.
pub fn stream_m_known<I>(
    obj: &Objective,
    std: &StandardizedInstance,
    stream: I,
    m: f64,
    config: StreamConfig,
) -> Result<(Solution, SolveMetrics)>
where
    I: IntoIterator<Item = usize>,
{
    let mut state = StreamState::new(obj, std, config)?;
    state.m = m;
    state.reset_window(1.0)?;
    for j in stream {
        if let Some(early) = state.step(j, None)? {
            return state.finish(Some(early));
        }
    }
    state.finish(None)
}

/// The one-pass solver: `m` is a running maximum and the grid window
/// `[m / base, 2 b m]` follows it.
pub fn stream_dknapsack<I>(
    obj: &Objective,
    std: &StandardizedInstance,
    stream: I,
    config: StreamConfig,
) -> Result<(Solution, SolveMetrics)>
where
    I: IntoIterator<Item = usize>,
{
    let mut state = StreamState::new(obj, std, config)?;
    for j in stream {
        if let Some(early) = state.step(j, Some(2.0))? {
            return state.finish(Some(early));
        }
    }
    state.finish(None)
}

/// `max_{i,j} f({j}) / c_{i,j}` over the stream; one oracle call per element.
pub fn max_value_per_weight(
    obj: &Objective,
    std: &StandardizedInstance,
    stream: &[usize],
) -> Result<f64> {
    let mut m: f64 = 0.0;
    for &j in stream {
        let singleton = obj.evaluate(&[j])?;
        for i in 0..std.d() {
            m = m.max(singleton / std.weight(i, j));
        }
    }
    Ok(m)
}

/// First pass computes `m` exactly, second pass runs [`stream_m_known`].
pub fn two_pass_exact_m(
    obj: &Objective,
    std: &StandardizedInstance,
    stream: &[usize],
    config: StreamConfig,
) -> Result<(Solution, SolveMetrics)> {
    check_epsilon(config.epsilon, std.d())?;
    let before = obj.eval_count();
    let m = max_value_per_weight(obj, std, stream)?;
    let first = SolveMetrics {
        elements_seen: stream.len() as u64,
        oracle_calls: obj.eval_count() - before,
        passes: 1,
        ..SolveMetrics::default()
    };
    let (solution, second) = stream_m_known(obj, std, stream.iter().copied(), m, config)?;
    Ok((solution, first.merge(second)))
}
