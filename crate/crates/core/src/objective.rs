//! Set-function oracles.
//!
//! A [`SetFunction`] is the raw black box `f : 2^V -> [0, inf)` over the ground set
//! `V = {1, ..., n}`. [`Objective`] wraps one, validates element ids and counts every
//! oracle evaluation so that solvers can report exact call counts.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance used by the property checker.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

/// A deterministic set function over element ids `1..=ground_size()`.
///
/// `value` receives distinct, already validated ids in arbitrary order.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn value(&self, set: &[usize]) -> f64;
}

/// A counted, id-checked oracle.
pub struct Objective {
    inner: Arc<dyn SetFunction>,
    calls: AtomicU64,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("ground_size", &self.ground_size())
            .field("calls", &self.eval_count())
            .finish()
    }
}

impl Objective {
    pub fn new<F: SetFunction + 'static>(function: F) -> Self {
        Self::from_arc(Arc::new(function))
    }

    pub fn from_arc(inner: Arc<dyn SetFunction>) -> Self {
        Objective {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    /// Builds an objective from a closure; mostly useful in tests.
    pub fn from_fn<F>(ground_size: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnFunction { ground_size, f })
    }

    pub fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    /// The underlying uncounted function.
    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.inner
    }

    /// A second handle on the same function with its own call counter.
    pub fn fresh(&self) -> Objective {
        Objective::from_arc(Arc::clone(&self.inner))
    }

    pub fn eval_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        let n = self.ground_size();
        if id == 0 || id > n {
            return Err(Error::InvalidElement { id, ground_size: n });
        }
        Ok(())
    }

    /// `f(S)`; one oracle call.
    pub fn evaluate(&self, set: &[usize]) -> Result<f64> {
        for &id in set {
            self.check_id(id)?;
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.inner.value(set))
    }

    /// `f(S ∪ {j}) - f(S)` using two oracle calls (none if `j ∈ S`).
    pub fn marginal_gain(&self, j: usize, set: &[usize]) -> Result<f64> {
        self.check_id(j)?;
        if set.contains(&j) {
            return Ok(0.0);
        }
        let base = self.evaluate(set)?;
        self.marginal_gain_from(j, set, base)
    }

    /// Marginal gain when the caller already holds `base = f(S)`; one oracle call.
    pub fn marginal_gain_from(&self, j: usize, set: &[usize], base: f64) -> Result<f64> {
        self.check_id(j)?;
        if set.contains(&j) {
            return Ok(0.0);
        }
        let mut extended = Vec::with_capacity(set.len() + 1);
        extended.extend_from_slice(set);
        extended.push(j);
        Ok(self.evaluate(&extended)? - base)
    }
}

struct FnFunction<F> {
    ground_size: usize,
    f: F,
}

impl<F> SetFunction for FnFunction<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.ground_size
    }

    fn value(&self, set: &[usize]) -> f64 {
        (self.f)(set)
    }
}

/// `f(S) = |∪_{j ∈ S} covers(j)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageFunction {
    covers: Vec<Vec<usize>>,
    universe_size: usize,
}

impl CoverageFunction {
    /// `covers[j - 1]` lists the universe items covered by element `j`.
    pub fn new(covers: Vec<Vec<usize>>) -> Self {
        let universe_size = covers
            .iter()
            .flat_map(|c| c.iter())
            .map(|&u| u + 1)
            .max()
            .unwrap_or(0);
        CoverageFunction {
            covers,
            universe_size,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn covers(&self, id: usize) -> &[usize] {
        &self.covers[id - 1]
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        let mut items: Vec<usize> = set
            .iter()
            .flat_map(|&j| self.covers[j - 1].iter().copied())
            .collect();
        items.sort_unstable();
        items.dedup();
        items.len() as f64
    }
}

pub fn make_coverage_objective(covers: Vec<Vec<usize>>) -> Objective {
    Objective::new(CoverageFunction::new(covers))
}

/// `f(S) = Σ_{j ∈ S} w_j` with nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularFunction {
    pub weights: Vec<f64>,
}

impl SetFunction for ModularFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        set.iter().map(|&j| self.weights[j - 1]).sum()
    }
}

/// Restricts a function to a subset of its ground set, renumbered densely.
///
/// Element `k` of the restricted function is element `labels[k - 1]` of `inner`.
pub struct Restricted {
    inner: Arc<dyn SetFunction>,
    labels: Vec<usize>,
}

impl Restricted {
    pub fn new(inner: Arc<dyn SetFunction>, labels: Vec<usize>) -> Self {
        debug_assert!(labels.iter().all(|&l| l >= 1 && l <= inner.ground_size()));
        Restricted { inner, labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

impl SetFunction for Restricted {
    fn ground_size(&self) -> usize {
        self.labels.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        let mapped: Vec<usize> = set.iter().map(|&k| self.labels[k - 1]).collect();
        self.inner.value(&mapped)
    }
}

/// One diminishing-returns or monotonicity failure: `A ⊆ B`, `r ∉ B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub smaller: Vec<usize>,
    pub larger: Vec<usize>,
    pub element: usize,
    pub gain_larger: f64,
    pub gain_smaller: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

/// Samples `trials` random chains `A ⊆ B ⊆ V ∖ {r}` and checks
/// `Δ(r|B) ≤ Δ(r|A) + tol` and `Δ(r|·) ≥ -tol`.
pub fn check_monotone_submodular(obj: &Objective, trials: usize, seed: u64) -> PropertyReport {
    let n = obj.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let ids: Vec<usize> = (1..=n).collect();
    for _ in 0..trials {
        if n == 0 {
            break;
        }
        let r = rng.random_range(1..=n);
        let density: f64 = rng.random();
        let mut larger: Vec<usize> = ids
            .iter()
            .copied()
            .filter(|&j| j != r && rng.random_bool(density))
            .collect();
        larger.shuffle(&mut rng);
        let smaller: Vec<usize> = larger
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        // Ids are valid by construction.
        let gain_smaller = obj.marginal_gain(r, &smaller).expect("valid ids");
        let gain_larger = obj.marginal_gain(r, &larger).expect("valid ids");
        let diminishing = gain_larger <= gain_smaller + PROPERTY_TOLERANCE;
        let monotone = gain_larger >= -PROPERTY_TOLERANCE && gain_smaller >= -PROPERTY_TOLERANCE;
        if !(diminishing && monotone) {
            larger.sort_unstable();
            let mut smaller = smaller;
            smaller.sort_unstable();
            violations.push(Violation {
                smaller,
                larger,
                element: r,
                gain_larger,
                gain_smaller,
            });
        }
    }
    PropertyReport {
        trials,
        passed: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // a=0, b=1, c=2, d=3, e=4
    fn instance_a() -> Objective {
        make_coverage_objective(vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3], vec![4]])
    }

    #[test]
    fn coverage_values() {
        let two = make_coverage_objective(vec![vec![0, 1], vec![2]]);
        assert_eq!(two.evaluate(&[]).unwrap(), 0.0);
        assert_eq!(two.evaluate(&[1, 2]).unwrap(), 3.0);
        let a = instance_a();
        assert_eq!(a.evaluate(&[1, 3]).unwrap(), 4.0);
        assert_eq!(a.evaluate(&[1, 2, 3, 4]).unwrap(), 5.0);
        assert_eq!(
            make_coverage_objective(vec![vec![0]])
                .evaluate(&[1])
                .unwrap(),
            1.0
        );
        assert_eq!(
            make_coverage_objective(vec![vec![]])
                .evaluate(&[1])
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn marginal_gains() {
        let a = instance_a();
        assert_eq!(a.marginal_gain(3, &[]).unwrap(), 4.0);
        assert_eq!(a.marginal_gain(3, &[1, 2]).unwrap(), 0.0);
        assert_eq!(a.marginal_gain(2, &[2, 4]).unwrap(), 0.0);
    }

    #[test]
    fn invalid_ids_are_rejected() {
        let a = instance_a();
        assert_eq!(
            a.evaluate(&[0]),
            Err(Error::InvalidElement {
                id: 0,
                ground_size: 4
            })
        );
        assert!(a.evaluate(&[5]).is_err());
        assert!(a.marginal_gain(9, &[]).is_err());
        assert_eq!(a.eval_count(), 0);
    }

    #[test]
    fn counter_is_exact() {
        let a = instance_a();
        a.evaluate(&[1]).unwrap();
        a.marginal_gain(2, &[1]).unwrap();
        a.marginal_gain_from(4, &[1], 2.0).unwrap();
        a.marginal_gain(1, &[1]).unwrap();
        assert_eq!(a.eval_count(), 4);
        a.reset_count();
        assert_eq!(a.eval_count(), 0);
    }

    #[test]
    fn checker_accepts_coverage_and_modular() {
        let report = check_monotone_submodular(&instance_a(), 1000, 1);
        assert!(report.passed);
        assert_eq!(report.trials, 1000);
        let modular = Objective::new(ModularFunction {
            weights: vec![0.5, 1.0, 2.5, 0.0, 3.0],
        });
        assert!(check_monotone_submodular(&modular, 1000, 2).passed);
    }

    #[test]
    fn checker_rejects_supermodular() {
        let square = Objective::from_fn(6, |s| (s.len() * s.len()) as f64);
        let report = check_monotone_submodular(&square, 200, 3);
        assert!(!report.passed);
        let v = &report.violations[0];
        // Δ(r|S) = 2|S| + 1 for |S|².
        assert_eq!(v.gain_larger, 2.0 * v.larger.len() as f64 + 1.0);
        assert_eq!(v.gain_smaller, 2.0 * v.smaller.len() as f64 + 1.0);
    }

    #[test]
    fn restriction_relabels() {
        let inner: Arc<dyn SetFunction> =
            Arc::new(CoverageFunction::new(vec![vec![0], vec![1, 2], vec![3]]));
        let r = Objective::new(Restricted::new(inner, vec![3, 2]));
        assert_eq!(r.ground_size(), 2);
        assert_eq!(r.evaluate(&[1]).unwrap(), 1.0);
        assert_eq!(r.evaluate(&[1, 2]).unwrap(), 3.0);
    }

    fn brute_union(covers: &[Vec<usize>], set: &[usize]) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for &j in set {
            for &u in &covers[j - 1] {
                seen.insert(u);
            }
        }
        seen.len()
    }

    proptest::proptest! {
        #[test]
        fn coverage_matches_set_union(
            covers in proptest::collection::vec(proptest::collection::vec(0usize..12, 0..5), 1..=10)
        ) {
            let n = covers.len();
            let obj = make_coverage_objective(covers.clone());
            for mask in 0u32..(1 << n) {
                let set: Vec<usize> = (1..=n).filter(|j| mask >> (j - 1) & 1 == 1).collect();
                proptest::prop_assert_eq!(obj.evaluate(&set).unwrap(), brute_union(&covers, &set) as f64);
            }
        }
    }
}
