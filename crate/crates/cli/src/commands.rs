use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sieve_knapsack::applications::citation::{
    run_literature_pipeline, DetectionModel, PipelinePoint,
};
use sieve_knapsack::baselines::{brute_force_opt, greedy_knapsack, pagerank_recommend};
use sieve_knapsack::bounds::{offline_bound, online_bound, BoundVariant, RowBound};
use sieve_knapsack::decomposable::{two_pass_decomposable, SampleSize};
use sieve_knapsack::formats::{
    load_citation_dir, news_instance_file, save_citation_dir, to_pretty_json, ResultRecord,
};
use sieve_knapsack::solvers::{stream_dknapsack, two_pass_exact_m};
use sieve_knapsack::synth::{
    citation_data, exemplar_instance, news_corpus, random_coverage_instance, rng_for,
    CitationParams, CoverageParams, NewsParams,
};
use sieve_knapsack::{Solution, SolveMetrics, StandardizedInstance, StreamConfig};

use crate::args::{BoundArgs, CompareArgs, GenArgs, GenKind, SolveArgs, SweepArgs, Variant};
use crate::input::{citation_budgets, load, pagerank_for, CliError, CliResult, Loaded};

/// Largest instance the compare table solves exactly.
const COMPARE_BRUTE_FORCE_LIMIT: usize = 20;

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stream(
    loaded: &Loaded,
    std: &StandardizedInstance,
    config: StreamConfig,
) -> CliResult<(Solution, SolveMetrics)> {
    Ok(stream_dknapsack(
        &loaded.objective,
        std,
        1..=std.n(),
        config,
    )?)
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let start = Instant::now();
    let loaded = load(&args.common)?;
    let std = loaded.instance.standardize();
    let config = StreamConfig {
        epsilon: args.common.epsilon,
        faithful_early_exit: args.faithful_early_exit,
    };
    let (mut solution, metrics) = if let Some(delta) = args.delta {
        let components = loaded.components.clone().ok_or_else(|| {
            CliError::Usage(
                "--delta needs a decomposable objective (an instance with points)".into(),
            )
        })?;
        let ids: Vec<usize> = (1..=std.n()).collect();
        let run = two_pass_decomposable(
            components,
            &std,
            &ids,
            config.epsilon,
            delta,
            args.seed,
            SampleSize::Required,
        )?;
        (run.solution, run.metrics)
    } else if args.two_pass {
        let ids: Vec<usize> = (1..=std.n()).collect();
        two_pass_exact_m(&loaded.objective, &std, &ids, config)?
    } else {
        stream(&loaded, &std, config)?
    };
    // The sampled scheme reports f on the sample; the record always carries f itself.
    solution.value = loaded.objective.evaluate(&solution.elements)?;
    let bound = online_bound(
        &loaded.objective,
        &std,
        &solution.elements,
        BoundVariant::FullBudget,
    )?;
    let offline = offline_bound(solution.value, std.d(), config.epsilon)?;
    let mut record = ResultRecord::new(
        &solution,
        bound.online_bound,
        offline,
        metrics,
        start.elapsed().as_secs_f64(),
    );
    record.solution = loaded.label_set(&solution.elements);
    emit(args.common.out.as_deref(), &to_pretty_json(&record))
}

fn timed<F>(loaded: &Loaded, run: F) -> CliResult<(f64, u64, f64)>
where
    F: FnOnce() -> CliResult<f64>,
{
    let before = loaded.objective.eval_count();
    let start = Instant::now();
    let value = run()?;
    Ok((
        value,
        loaded.objective.eval_count() - before,
        start.elapsed().as_secs_f64(),
    ))
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let loaded = load(&args.common)?;
    let std = loaded.instance.standardize();
    let config = StreamConfig {
        epsilon: args.common.epsilon,
        faithful_early_exit: args.faithful_early_exit,
    };
    let mut rows: Vec<(&'static str, (f64, u64, f64))> = Vec::new();
    rows.push((
        "streaming",
        timed(&loaded, || Ok(stream(&loaded, &std, config)?.0.value))?,
    ));
    let greedy = timed(&loaded, || {
        Ok(greedy_knapsack(&loaded.objective, &std, args.enum_depth as usize)?.value)
    })?;
    rows.push(("greedy_knapsack", greedy));
    if std.n() <= COMPARE_BRUTE_FORCE_LIMIT {
        rows.push((
            "brute_force",
            timed(&loaded, || {
                Ok(brute_force_opt(&loaded.objective, &std, false)?.optimum_value)
            })?,
        ));
    }
    if let Some(scores) = &loaded.pagerank {
        rows.push((
            "pagerank",
            timed(&loaded, || {
                Ok(loaded
                    .objective
                    .evaluate(&pagerank_recommend(scores, &std))?)
            })?,
        ));
    }
    let reference = greedy.0;
    let mut csv = String::from("method,value,normalized,oracle_calls,wall_time_secs\n");
    for (method, (value, calls, secs)) in rows {
        let normalized = normalize(value, reference);
        writeln!(csv, "{method},{value},{normalized},{calls},{secs}").expect("writing to a String");
    }
    emit(args.common.out.as_deref(), &csv)
}

/// `value / reference`, with `0 / 0` read as 1.
pub fn normalize(value: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        value / reference
    } else if value > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

fn thread_count() -> CliResult<usize> {
    match std::env::var("SIEVE_THREADS") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "SIEVE_THREADS must be a non-negative integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let data = load_citation_dir(&args.citation)?;
    let base = citation_budgets(&data, args.budgets.as_deref()).unwrap_or([20.0, 10.0, 20.0]);
    let model = Arc::new(DetectionModel::new(
        &data.graph,
        &data.config.sources,
        data.config.weights.clone(),
        data.config.t_max,
    )?);
    let scores = pagerank_for(&data)?;
    let row = args.vary.row();
    let budgets = args.range.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let points: Vec<PipelinePoint> = pool.install(|| {
        budgets
            .par_iter()
            .map(|&b| {
                let mut caps = base;
                caps[row] = b;
                run_literature_pipeline(&data.graph, model.clone(), &scores, caps, args.epsilon)
            })
            .collect::<Result<_, _>>()
    })?;
    let mut csv = String::from("budget,streaming,bound,pagerank,gap\n");
    for (b, p) in budgets.iter().zip(&points) {
        writeln!(
            csv,
            "{b},{},{},{},{}",
            p.streaming,
            p.bound,
            p.pagerank,
            p.relative_gap()
        )
        .expect("writing to a String");
    }
    emit(args.out.as_deref(), &csv)
}

pub fn gen(args: &GenArgs) -> CliResult<()> {
    let mut rng = rng_for(args.seed, 0);
    match args.kind {
        GenKind::Instance => {
            if args.d == 0 {
                return Err(CliError::Usage("--d must be at least 1".into()));
            }
            let params = CoverageParams::new(args.n.unwrap_or(12), args.d);
            random_coverage_instance(&mut rng, params).save(&args.out)?;
        }
        GenKind::News => {
            let params = NewsParams {
                articles: args.n.unwrap_or(200),
                features: args.features,
                ..NewsParams::default()
            };
            let budget = args.budget.unwrap_or(20.0);
            if budget < params.max_words as f64 {
                return Err(CliError::Usage(format!(
                    "--budget must be at least {} so every article fits",
                    params.max_words
                )));
            }
            if params.features < params.max_features {
                return Err(CliError::Usage(format!(
                    "--features must be at least {}",
                    params.max_features
                )));
            }
            news_instance_file(&news_corpus(&mut rng, params), budget).save(&args.out)?;
        }
        GenKind::Citation => {
            let params = CitationParams {
                papers: args.n.unwrap_or(500),
                sources: args.sources,
                ..CitationParams::default()
            };
            if params.sources == 0 || params.sources > params.papers.max(1) {
                return Err(CliError::Usage("--sources must lie in 1..=n".into()));
            }
            save_citation_dir(&args.out, &citation_data(&mut rng, params))?;
        }
        GenKind::Exemplar => {
            let budget = args.budget.unwrap_or(3.0);
            if budget < 2.0 {
                return Err(CliError::Usage("--budget must be at least 2".into()));
            }
            exemplar_instance(&mut rng, args.n.unwrap_or(30), budget).save(&args.out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BoundRecord {
    set: Vec<usize>,
    value: f64,
    online_bound: f64,
    /// Only for the streaming solution, which the a-priori bound is about.
    #[serde(skip_serializing_if = "Option::is_none")]
    offline_bound: Option<f64>,
    per_row: Vec<RowBound>,
}

pub fn bound(args: &BoundArgs) -> CliResult<()> {
    let loaded = load(&args.common)?;
    let std = loaded.instance.standardize();
    let (elements, offline) = match &args.set {
        Some(labels) => {
            let elements = loaded.element_ids(labels)?;
            if !std.is_feasible(&elements) {
                return Err(CliError::Infeasible(
                    "the given set exceeds a budget".into(),
                ));
            }
            (elements, None)
        }
        None => {
            let (solution, _) = stream(&loaded, &std, StreamConfig::new(args.common.epsilon))?;
            let offline = offline_bound(solution.value, std.d(), args.common.epsilon)?;
            (solution.elements, Some(offline))
        }
    };
    let variant = match args.variant {
        Variant::Full => BoundVariant::FullBudget,
        Variant::Residual => BoundVariant::ResidualBudget,
    };
    let report = online_bound(&loaded.objective, &std, &elements, variant)?;
    let per_row = report
        .per_row
        .into_iter()
        .map(|mut row| {
            row.fractional_element = row.fractional_element.map(|k| loaded.labels[k - 1]);
            row.order = row.order.iter().map(|&k| loaded.labels[k - 1]).collect();
            row
        })
        .collect();
    let record = BoundRecord {
        set: loaded.label_set(&elements),
        value: report.solution_value,
        online_bound: report.online_bound,
        offline_bound: offline,
        per_row,
    };
    emit(args.common.out.as_deref(), &to_pretty_json(&record))
}
