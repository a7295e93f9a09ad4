//! Objectives that average one component per ground element,
//! `f(S) = (1/|V|) Σ_{i ∈ V} f_i(S)`, evaluated on a uniform reservoir sample `Ṽ`.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::StandardizedInstance;
use crate::objective::{Objective, SetFunction};
use crate::solvers::{check_epsilon, stream_dknapsack, Solution, SolveMetrics, StreamConfig};

/// A family `f_1, ..., f_n` of set functions, one per ground element, with `|f_i| ≤ 1`.
pub trait Decomposable: Send + Sync {
    fn ground_size(&self) -> usize;

    /// `f_i(S)` for `i ∈ 1..=n`.
    fn component(&self, i: usize, set: &[usize]) -> f64;
}

/// The full average over every component.
pub struct AverageObjective(pub Arc<dyn Decomposable>);

impl SetFunction for AverageObjective {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }

    fn value(&self, set: &[usize]) -> f64 {
        let n = self.0.ground_size();
        if n == 0 {
            return 0.0;
        }
        (1..=n).map(|i| self.0.component(i, set)).sum::<f64>() / n as f64
    }
}

/// `f_Ṽ(S) = (1/|Ṽ|) Σ_{i ∈ Ṽ} f_i(S)`. Records any component outside `[-1, 1]`.
pub struct SampledObjective {
    inner: Arc<dyn Decomposable>,
    sample: Vec<usize>,
    out_of_range: AtomicBool,
}

impl SampledObjective {
    pub fn new(inner: Arc<dyn Decomposable>, sample: Vec<usize>) -> Self {
        SampledObjective {
            inner,
            sample,
            out_of_range: AtomicBool::new(false),
        }
    }

    pub fn sample(&self) -> &[usize] {
        &self.sample
    }

    pub fn violated(&self) -> bool {
        self.out_of_range.load(Ordering::Relaxed)
    }
}

impl SetFunction for SampledObjective {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &[usize]) -> f64 {
        if self.sample.is_empty() {
            return 0.0;
        }
        let mut total = 0.0;
        for &i in &self.sample {
            let v = self.inner.component(i, set);
            if v.abs() > 1.0 {
                self.out_of_range.store(true, Ordering::Relaxed);
            }
            total += v;
        }
        total / self.sample.len() as f64
    }
}

/// `⌈2 ε⁻² b² (b ln n + ln(2/δ))⌉`, capped at `n`.
pub fn required_sample_size(epsilon: f64, delta: f64, b: f64, n: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon and delta must lie in (0, 1), got {epsilon} and {delta}"
        )));
    }
    if !(b >= 1.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "budget must be at least 1, got {b}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let raw = 2.0 / (epsilon * epsilon) * b * b * (b * (n as f64).ln() + (2.0 / delta).ln());
    let size = raw.ceil();
    Ok(if size >= n as f64 { n } else { size as usize })
}

/// Single-pass uniform sample of `size` ids; the result is sorted.
pub fn reservoir_sample<I, R>(stream: I, size: usize, rng: &mut R) -> Vec<usize>
where
    I: IntoIterator<Item = usize>,
    R: Rng + ?Sized,
{
    let mut reservoir = Vec::with_capacity(size);
    if size == 0 {
        return reservoir;
    }
    for (t, id) in stream.into_iter().enumerate() {
        if t < size {
            reservoir.push(id);
        } else {
            let slot = rng.random_range(0..=t);
            if slot < size {
                reservoir[slot] = id;
            }
        }
    }
    reservoir.sort_unstable();
    reservoir
}

pub fn reservoir_sample_seeded<I>(stream: I, size: usize, seed: u64) -> Vec<usize>
where
    I: IntoIterator<Item = usize>,
{
    reservoir_sample(stream, size, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSize {
    /// [`required_sample_size`] for the run's `ε`, `δ` and budget.
    #[default]
    Required,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposableOutcome {
    pub solution: Solution,
    pub metrics: SolveMetrics,
    pub sample: Vec<usize>,
}

/// Pass one draws `Ṽ` by reservoir sampling; pass two runs the one-pass solver on `f_Ṽ`.
/// `solution.value` is `f_Ṽ(S)`.
#[allow(clippy::too_many_arguments)]
pub fn two_pass_decomposable(
    components: Arc<dyn Decomposable>,
    std: &StandardizedInstance,
    stream: &[usize],
    epsilon: f64,
    delta: f64,
    seed: u64,
    sample_size: SampleSize,
) -> Result<DecomposableOutcome> {
    check_epsilon(epsilon, std.d())?;
    let size = match sample_size {
        SampleSize::Required => {
            required_sample_size(epsilon, delta, std.budget(), components.ground_size())?
        }
        SampleSize::Fixed(k) => k.min(components.ground_size()),
    };
    let sample = reservoir_sample_seeded(stream.iter().copied(), size, seed);
    let first = SolveMetrics {
        elements_seen: stream.len() as u64,
        passes: 1,
        ..SolveMetrics::default()
    };
    let sampled = Arc::new(SampledObjective::new(components, sample.clone()));
    let obj = Objective::from_arc(sampled.clone());
    let (solution, second) = stream_dknapsack(
        &obj,
        std,
        stream.iter().copied(),
        StreamConfig::new(epsilon),
    )?;
    if sampled.violated() {
        return Err(Error::ContractViolation(
            "a component left [-1, 1] during evaluation".into(),
        ));
    }
    Ok(DecomposableOutcome {
        solution,
        metrics: first.merge(second),
        sample,
    })
}

/// Exemplar-based clustering in the unit square: `f_i(S)` is the drop in the
/// (halved, squared Euclidean) distance from point `i` to its nearest exemplar when `S`
/// joins the phantom exemplar at the origin. Each component lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarClustering {
    points: Vec<[f64; 2]>,
}

impl ExemplarClustering {
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        ExemplarClustering { points }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| [rng.random(), rng.random()]).collect())
    }

    fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)) / 2.0
    }
}

impl Decomposable for ExemplarClustering {
    fn ground_size(&self) -> usize {
        self.points.len()
    }

    fn component(&self, i: usize, set: &[usize]) -> f64 {
        let p = self.points[i - 1];
        let phantom = self.distance(p, [0.0, 0.0]);
        let nearest = set
            .iter()
            .map(|&s| self.distance(p, self.points[s - 1]))
            .fold(phantom, f64::min);
        phantom - nearest
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::KnapsackInstance;
    use crate::objective::{check_monotone_submodular, CoverageFunction};

    #[test]
    fn sample_size_examples() {
        // ⌈32 (2 ln 100 + ln 4)⌉ = 340 before the cap.
        let raw = 32.0 * (2.0 * 100f64.ln() + 4f64.ln());
        assert_eq!(raw.ceil(), 340.0);
        assert_eq!(required_sample_size(0.5, 0.5, 2.0, 100).unwrap(), 100);
        // ⌈32 (2 ln 1000 + ln 4)⌉ = 487.
        assert_eq!(required_sample_size(0.5, 0.5, 2.0, 1000).unwrap(), 487);
        assert!(required_sample_size(0.99, 0.99, 1.0, 2).unwrap() >= 1);
        assert!(required_sample_size(1.0, 0.5, 1.0, 2).is_err());
        assert!(required_sample_size(0.5, 0.0, 1.0, 2).is_err());
        assert!(required_sample_size(0.5, 0.5, 0.5, 2).is_err());
    }

    #[test]
    fn reservoir_edge_cases() {
        assert_eq!(reservoir_sample_seeded(1..=3, 5, 1), vec![1, 2, 3]);
        assert!(reservoir_sample_seeded(1..=3, 0, 1).is_empty());
        let s = reservoir_sample_seeded(1..=100, 10, 9);
        assert_eq!(s.len(), 10);
        assert_eq!(s, reservoir_sample_seeded(1..=100, 10, 9));
    }

    struct Constant(CoverageFunction);

    impl Decomposable for Constant {
        fn ground_size(&self) -> usize {
            self.0.ground_size()
        }

        fn component(&self, _i: usize, set: &[usize]) -> f64 {
            self.0.value(set) / 10.0
        }
    }

    #[test]
    fn identical_components_make_sampling_exact() {
        let cover = CoverageFunction::new(vec![vec![0, 1], vec![2], vec![1, 3], vec![4, 5, 6]]);
        let dec: Arc<dyn Decomposable> = Arc::new(Constant(cover.clone()));
        let std = KnapsackInstance::new(vec![vec![1.0, 1.0, 2.0, 2.0]], vec![3.0])
            .unwrap()
            .standardize();
        let out =
            two_pass_decomposable(dec, &std, &[1, 2, 3, 4], 0.1, 0.2, 5, SampleSize::Fixed(2))
                .unwrap();
        let direct = Objective::new(AverageObjective(Arc::new(Constant(cover))));
        let (expected, _) =
            stream_dknapsack(&direct, &std, [1, 2, 3, 4], StreamConfig::new(0.1)).unwrap();
        assert_eq!(out.solution, expected);
        assert_eq!(out.metrics.passes, 2);
        assert_eq!(out.sample.len(), 2);
    }

    #[test]
    fn full_sample_matches_full_objective() {
        let toy = Arc::new(ExemplarClustering::random(12, 3));
        let std = KnapsackInstance::new(vec![vec![1.0; 12]], vec![3.0])
            .unwrap()
            .standardize();
        let stream: Vec<usize> = (1..=12).collect();
        let out = two_pass_decomposable(
            toy.clone(),
            &std,
            &stream,
            0.1,
            0.2,
            1,
            SampleSize::Required,
        )
        .unwrap();
        assert_eq!(out.sample, stream);
        let full = Objective::new(AverageObjective(toy));
        let (expected, _) =
            stream_dknapsack(&full, &std, stream.iter().copied(), StreamConfig::new(0.1)).unwrap();
        assert_eq!(out.solution.elements, expected.elements);
    }

    struct Oversized;

    impl Decomposable for Oversized {
        fn ground_size(&self) -> usize {
            3
        }

        fn component(&self, _i: usize, set: &[usize]) -> f64 {
            2.0 * set.len() as f64
        }
    }

    #[test]
    fn oversized_components_are_reported() {
        let std = KnapsackInstance::new(vec![vec![1.0; 3]], vec![2.0])
            .unwrap()
            .standardize();
        let err = two_pass_decomposable(
            Arc::new(Oversized),
            &std,
            &[1, 2, 3],
            0.1,
            0.2,
            0,
            SampleSize::Required,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn sampled_objective_is_submodular() {
        let toy: Arc<dyn Decomposable> = Arc::new(ExemplarClustering::random(25, 8));
        for seed in 0..5 {
            let sample = reservoir_sample_seeded(1..=25, 7, seed);
            let obj = Objective::new(SampledObjective::new(toy.clone(), sample));
            assert!(check_monotone_submodular(&obj, 300, seed).passed);
        }
    }
}
