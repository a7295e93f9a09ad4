//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use sieve_knapsack::applications::citation::{citation_objective, run_literature_pipeline};
use sieve_knapsack::applications::news::{build_news_instance, news_objective};
use sieve_knapsack::baselines::{
    biased_pagerank, brute_force_opt, greedy_knapsack, DEFAULT_DAMPING, DEFAULT_MAX_ITER,
    DEFAULT_TOLERANCE,
};
use sieve_knapsack::bounds::{offline_bound, online_bound, BoundVariant};
use sieve_knapsack::decomposable::{
    reservoir_sample_seeded, two_pass_decomposable, AverageObjective, ExemplarClustering,
    SampleSize,
};
use sieve_knapsack::formats::LoadedInstance;
use sieve_knapsack::knapsack::KnapsackInstance;
use sieve_knapsack::objective::{check_monotone_submodular, make_coverage_objective, Objective};
use sieve_knapsack::solvers::{
    grid_size_cap, simple_stream_cardinality, stream_dknapsack, StreamConfig,
};
use sieve_knapsack::synth::{
    citation_data, news_corpus, random_coverage_instance, rng_for, CitationParams, CoverageParams,
    NewsParams,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const TOL: f64 = 1e-9;
const EPS: f64 = 0.05;
const SUITE: u64 = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn suite_instance(seed: u64) -> LoadedInstance {
    let n = 4 + (seed % 9) as usize;
    let d = 1 + (seed % 3) as usize;
    random_coverage_instance(&mut rng_for(seed, 0), CoverageParams::new(n, d))
        .build(Path::new("suite"))
        .expect("suite instance")
}

fn approximation_suite() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    let mut worst = f64::INFINITY;
    for seed in 0..SUITE {
        let loaded = suite_instance(seed);
        let std = loaded.instance.standardize();
        let obj = &loaded.objective;
        let opt = brute_force_opt(obj, &std, false).unwrap().optimum_value;
        let (solution, _) =
            stream_dknapsack(obj, &std, 1..=std.n(), StreamConfig::new(EPS)).unwrap();
        let factor = 1.0 / (1.0 + 2.0 * std.d() as f64) - EPS;
        if solution.value >= factor * opt - TOL && std.is_feasible(&solution.elements) {
            hits += 1;
        }
        if opt > 0.0 {
            worst = worst.min(solution.value / opt);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        hits == SUITE && secs < 60.0,
        format!(
            "{hits}/{SUITE} instances meet the guarantee, worst value/OPT {worst:.3}, {secs:.2}s"
        ),
    )
}

fn cardinality_suite() -> Outcome {
    let mut hits = 0;
    for seed in 0..SUITE {
        let loaded = suite_instance(seed);
        let n = loaded.instance.n();
        let k = 1 + (seed % 4) as usize;
        let unit = KnapsackInstance::new(vec![vec![1.0; n]], vec![k as f64]).unwrap();
        let std = unit.standardize();
        let obj = &loaded.objective;
        let opt = brute_force_opt(obj, &std, false).unwrap().optimum_value;
        let solution = simple_stream_cardinality(obj, 1..=n, k, opt).unwrap();
        if solution.value >= opt / 2.0 - TOL && solution.elements.len() <= k {
            hits += 1;
        }
    }
    outcome(
        hits == SUITE,
        format!("{hits}/{SUITE} instances reach OPT/2"),
    )
}

fn random_feasible_set<R: Rng>(
    rng: &mut R,
    std: &sieve_knapsack::StandardizedInstance,
) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=std.n()).collect();
    order.shuffle(rng);
    let keep = rng.random_range(0..=std.n());
    let mut set = Vec::new();
    for j in order.into_iter().take(keep) {
        set.push(j);
        if !std.is_feasible(&set) {
            set.pop();
        }
    }
    set
}

fn bound_soundness() -> Outcome {
    let mut checks = 0;
    let mut violations = 0;
    for seed in 0..SUITE {
        let loaded = suite_instance(seed);
        let std = loaded.instance.standardize();
        let obj = &loaded.objective;
        let opt = brute_force_opt(obj, &std, false).unwrap().optimum_value;
        let (solution, _) =
            stream_dknapsack(obj, &std, 1..=std.n(), StreamConfig::new(EPS)).unwrap();
        let report = online_bound(obj, &std, &solution.elements, BoundVariant::FullBudget).unwrap();
        let offline = offline_bound(solution.value, std.d(), EPS).unwrap();
        checks += 1;
        if !(report.online_bound >= opt - TOL
            && opt >= solution.value - TOL
            && offline >= opt - TOL)
        {
            violations += 1;
        }
        let mut rng = rng_for(seed, 1);
        for _ in 0..20 {
            let set = random_feasible_set(&mut rng, &std);
            let report = online_bound(obj, &std, &set, BoundVariant::FullBudget).unwrap();
            checks += 1;
            if report.online_bound < opt - TOL || report.solution_value > opt + TOL {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in {checks} checks"),
    )
}

fn worked_bound_example() -> Outcome {
    let obj = make_coverage_objective(vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3], vec![4]]);
    let instance = KnapsackInstance::new(
        vec![vec![1.0, 1.0, 3.0, 1.0], vec![1.0, 2.0, 3.0, 1.0]],
        vec![4.0, 4.0],
    )
    .unwrap();
    let std = instance.standardize();
    let got = online_bound(&obj, &std, &[1], BoundVariant::FullBudget)
        .unwrap()
        .online_bound;
    let want = 2.0 + 11.0 / 3.0;
    outcome(
        (got - want).abs() <= TOL,
        format!("bound {got:.12}, expected {want:.12}"),
    )
}

fn metrics_contracts() -> Outcome {
    let n = 100_000;
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for d in 1..=3 {
        let mut rng = rng_for(500 + d as u64, 0);
        let budgets: Vec<f64> = (0..d).map(|_| rng.random_range(5.0..=15.0)).collect();
        let weights: Vec<Vec<f64>> = budgets
            .iter()
            .map(|&b| (0..n).map(|_| rng.random_range(0.05..=0.6) * b).collect())
            .collect();
        let covers: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                (0..rng.random_range(1..=5))
                    .map(|_| rng.random_range(0..5000))
                    .collect()
            })
            .collect();
        let obj = make_coverage_objective(covers);
        let std = KnapsackInstance::new(weights, budgets)
            .unwrap()
            .standardize();
        let (_, metrics) = stream_dknapsack(&obj, &std, 1..=n, StreamConfig::new(EPS)).unwrap();
        let cap = grid_size_cap(std.budget(), d, EPS);
        let storage = std.budget().floor() as usize * metrics.max_grid_size;
        if metrics.passes != 1 {
            failures.push(format!("d={d}: passes {}", metrics.passes));
        }
        if metrics.elements_seen != n as u64 {
            failures.push(format!("d={d}: saw {} elements", metrics.elements_seen));
        }
        if metrics.peak_stored_elements > storage {
            failures.push(format!(
                "d={d}: stored {} > {storage}",
                metrics.peak_stored_elements
            ));
        }
        if metrics.max_grid_size > cap {
            failures.push(format!("d={d}: grid {} > {cap}", metrics.max_grid_size));
        }
        summary.push(format!(
            "d={d} grid {}/{cap} stored {}/{storage}",
            metrics.max_grid_size, metrics.peak_stored_elements
        ));
    }
    let detail = if failures.is_empty() {
        summary.join(", ")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

fn news_pipeline() -> Outcome {
    let start = Instant::now();
    let mut ratios = Vec::new();
    let mut cheap = 0;
    for seed in 0..20 {
        let corpus = Arc::new(news_corpus(&mut rng_for(seed, 0), NewsParams::default()));
        let problem = build_news_instance(corpus, 20.0).unwrap();
        let std = problem.instance.standardize();
        let obj = &problem.objective;
        obj.reset_count();
        let (solution, metrics) =
            stream_dknapsack(obj, &std, 1..=std.n(), StreamConfig::new(EPS)).unwrap();
        obj.reset_count();
        let greedy = greedy_knapsack(obj, &std, 1).unwrap();
        let greedy_calls = obj.eval_count();
        ratios.push(solution.value / greedy.value);
        if (metrics.oracle_calls as f64) < 0.1 * greedy_calls as f64 {
            cheap += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mid = median(&mut ratios);
    outcome(
        mid >= 0.85 && cheap == 20 && secs < 120.0,
        format!("median utility vs greedy {mid:.3}, cheaper on {cheap}/20 corpora, {secs:.2}s"),
    )
}

fn literature_pipeline() -> Outcome {
    let mut wins = 0;
    let mut gaps = Vec::new();
    for seed in 0..10 {
        let data = citation_data(&mut rng_for(seed, 0), CitationParams::default());
        let model = Arc::new(data.model().unwrap());
        let scores = biased_pagerank(
            &data.graph,
            &data.config.sources,
            DEFAULT_DAMPING,
            DEFAULT_TOLERANCE,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        let point =
            run_literature_pipeline(&data.graph, model, &scores, [20.0, 10.0, 20.0], EPS).unwrap();
        if point.streaming >= point.pagerank - TOL {
            wins += 1;
        }
        gaps.push(point.relative_gap());
    }
    let mid = median(&mut gaps);
    outcome(
        wins >= 9 && mid <= 0.25,
        format!("streaming ≥ pagerank on {wins}/10 graphs, median relative gap {mid:.3}"),
    )
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let coverage = suite_instance(11).objective;
    let news = news_objective(Arc::new(news_corpus(
        &mut rng_for(1, 0),
        NewsParams::default(),
    )));
    let data = citation_data(
        &mut rng_for(2, 0),
        CitationParams {
            papers: 120,
            ..CitationParams::default()
        },
    );
    let citation = citation_objective(Arc::new(data.model().unwrap()));
    for (name, obj) in [
        ("coverage", &coverage),
        ("news", &news),
        ("citation", &citation),
    ] {
        let report = check_monotone_submodular(obj, 1000, 8);
        if !report.passed {
            failures.push(format!("{name}: {} violations", report.violations.len()));
        }
    }

    let draws = 100_000u64;
    let mut counts = [0u64; 10];
    for seed in 0..draws {
        for j in reservoir_sample_seeded(1..=10, 3, seed) {
            counts[j - 1] += 1;
        }
    }
    let expected = draws as f64 * 0.3;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = 1.0 - ChiSquared::new(9.0).unwrap().cdf(stat);
    if p <= 0.01 {
        failures.push(format!("reservoir chi-square p = {p:.4}"));
    }

    let mut mismatches = 0;
    let mut rng = rng_for(3, 0);
    let mut instances = Vec::new();
    for k in 0..10 {
        instances.push(suite_instance(1000 + k).instance);
    }
    for t in 0..1000 {
        let instance = &instances[t % instances.len()];
        let std = instance.standardize();
        let set: Vec<usize> = (1..=instance.n())
            .filter(|_| rng.random_bool(0.3))
            .collect();
        if instance.is_feasible(&set) != std.is_feasible(&set) {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        failures.push(format!("{mismatches} feasibility mismatches"));
    }
    let detail = if failures.is_empty() {
        format!("checkers clean, reservoir p = {p:.3}, feasibility equivalent on 1000 subsets")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

/// Best value over all subsets of at most `max_size` elements that fit.
fn small_subset_opt(obj: &Objective, instance: &KnapsackInstance, max_size: usize) -> f64 {
    fn walk(
        obj: &Objective,
        instance: &KnapsackInstance,
        start: usize,
        set: &mut Vec<usize>,
        left: usize,
        best: &mut f64,
    ) {
        *best = best.max(obj.evaluate(set).unwrap());
        if left == 0 {
            return;
        }
        for j in start..=instance.n() {
            set.push(j);
            if instance.is_feasible(set) {
                walk(obj, instance, j + 1, set, left - 1, best);
            }
            set.pop();
        }
    }
    let mut best = 0.0;
    walk(obj, instance, 1, &mut Vec::new(), max_size, &mut best);
    best
}

fn decomposable_scheme() -> Outcome {
    let (eps, delta, n) = (0.1, 0.2, 30);
    let mut hits = 0;
    let mut fixed_hits = 0;
    for seed in 0..100u64 {
        let clustering = Arc::new(ExemplarClustering::random(n, seed));
        let mut rng = rng_for(seed, 1);
        let mut weights: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
        weights[0] = 1.0;
        let instance = KnapsackInstance::new(vec![weights], vec![3.0]).unwrap();
        let std = instance.standardize();
        let full = Objective::new(AverageObjective(clustering.clone()));
        let opt = small_subset_opt(&full, &instance, 3);
        let stream: Vec<usize> = (1..=n).collect();
        let floor = (1.0 / 3.0 - eps) * (opt - eps);
        let run = two_pass_decomposable(
            clustering.clone(),
            &std,
            &stream,
            eps,
            delta,
            seed,
            SampleSize::Required,
        )
        .unwrap();
        if run.solution.value >= floor - TOL {
            hits += 1;
        }
        let small = two_pass_decomposable(
            clustering,
            &std,
            &stream,
            eps,
            delta,
            seed,
            SampleSize::Fixed(10),
        )
        .unwrap();
        if small.solution.value >= floor - TOL {
            fixed_hits += 1;
        }
    }
    outcome(
        hits as f64 / 100.0 >= 1.0 - delta,
        format!("success rate {hits}/100 (sample size {n}); with |sample| = 10: {fixed_hits}/100"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("approximation guarantee", approximation_suite),
        ("cardinality special case", cardinality_suite),
        ("bound soundness", bound_soundness),
        ("online bound worked example", worked_bound_example),
        ("metrics contracts", metrics_contracts),
        ("news pipeline", news_pipeline),
        ("literature pipeline", literature_pipeline),
        ("property suites", property_suites),
        ("decomposable scheme", decomposable_scheme),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let status = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("criterion {} {status}: {name}: {}", k + 1, result.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
