use std::fmt;
use std::path::Path;
use std::sync::Arc;

use sieve_knapsack::applications::citation::{build_literature_instance, DetectionModel};
use sieve_knapsack::baselines::{
    biased_pagerank, DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use sieve_knapsack::decomposable::Decomposable;
use sieve_knapsack::formats::{load_citation_dir, load_instance, CitationData, FormatError};
use sieve_knapsack::{Error, KnapsackInstance, Objective};

use crate::args::Common;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    Format(FormatError),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Format(FormatError::Instance { .. }) => 3,
            CliError::Format(_) => 2,
            CliError::Core(Error::InvalidInstance(_) | Error::ContractViolation(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Infeasible(msg) => f.write_str(msg),
            CliError::Format(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// An instance ready for the solvers. Element `k` is reported as `labels[k - 1]`.
pub struct Loaded {
    pub objective: Objective,
    pub instance: KnapsackInstance,
    pub labels: Vec<usize>,
    pub components: Option<Arc<dyn Decomposable>>,
    /// PageRank score per element, for citation inputs.
    pub pagerank: Option<Vec<f64>>,
}

impl Loaded {
    pub fn label_set(&self, elements: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = elements.iter().map(|&k| self.labels[k - 1]).collect();
        ids.sort_unstable();
        ids
    }

    /// Maps external labels back to element ids.
    pub fn element_ids(&self, labels: &[usize]) -> CliResult<Vec<usize>> {
        labels
            .iter()
            .map(|&label| {
                self.labels
                    .iter()
                    .position(|&l| l == label)
                    .map(|k| k + 1)
                    .ok_or_else(|| {
                        CliError::Infeasible(format!("{label} is not an admissible element"))
                    })
            })
            .collect()
    }
}

pub fn citation_budgets(data: &CitationData, overrides: Option<&[f64]>) -> Option<[f64; 3]> {
    match overrides {
        Some(b) => Some([b[0], b[1], b[2]]),
        None => data.config.budgets,
    }
}

pub fn pagerank_for(data: &CitationData) -> CliResult<sieve_knapsack::baselines::PageRankScores> {
    Ok(biased_pagerank(
        &data.graph,
        &data.config.sources,
        DEFAULT_DAMPING,
        DEFAULT_TOLERANCE,
        DEFAULT_MAX_ITER,
    )?)
}

pub fn load(common: &Common) -> CliResult<Loaded> {
    if let Some(path) = &common.input.instance {
        if common.budgets.is_some() {
            return Err(CliError::Usage(
                "--budgets applies to citation inputs only".into(),
            ));
        }
        let loaded = load_instance(path)?;
        let n = loaded.instance.n();
        return Ok(Loaded {
            objective: loaded.objective,
            instance: loaded.instance,
            labels: (1..=n).collect(),
            components: loaded.components,
            pagerank: None,
        });
    }
    let dir = common
        .input
        .citation
        .as_deref()
        .expect("clap requires one input");
    load_citation(dir, common.budgets.as_deref())
}

fn load_citation(dir: &Path, overrides: Option<&[f64]>) -> CliResult<Loaded> {
    let data = load_citation_dir(dir)?;
    let budgets = citation_budgets(&data, overrides)
        .ok_or_else(|| CliError::Usage("no budgets in config.json; pass --budgets".into()))?;
    let model = Arc::new(DetectionModel::new(
        &data.graph,
        &data.config.sources,
        data.config.weights.clone(),
        data.config.t_max,
    )?);
    let scores = pagerank_for(&data)?;
    let lit = build_literature_instance(&data.graph, model, &scores, budgets)?;
    if lit.reference_shift != 0.0 {
        eprintln!(
            "note: reference counts shifted by {} to keep weights positive",
            lit.reference_shift
        );
    }
    Ok(Loaded {
        objective: lit.problem.objective,
        instance: lit.problem.instance,
        labels: lit.problem.labels,
        components: None,
        pagerank: Some(lit.element_scores),
    })
}
