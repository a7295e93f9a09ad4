//! On-disk formats: JSON instance files, the citation directory layout and result records.
//!
//! A citation directory holds `edges.tsv` (`src<TAB>dst`, src cites dst), `meta.tsv`
//! (`id<TAB>age_days<TAB>ref_count`) and `config.json`. Blank lines and lines starting
//! with `#` are ignored in both TSV files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::applications::citation::{CitationGraph, DetectionModel};
use crate::applications::news::{news_objective, Article, NewsCorpus};
use crate::decomposable::{AverageObjective, Decomposable, ExemplarClustering};
use crate::error::Error;
use crate::knapsack::KnapsackInstance;
use crate::objective::{make_coverage_objective, Objective};
use crate::solvers::{Solution, SolveMetrics};

pub const EDGES_FILE: &str = "edges.tsv";
pub const META_FILE: &str = "meta.tsv";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}:{line}: {message}")]
    Line {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    /// The file is well formed but describes an instance the library rejects.
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: Error },
}

impl FormatError {
    fn invalid(path: &Path, message: impl fmt::Display) -> Self {
        FormatError::Invalid {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    fn instance(path: &Path, source: Error) -> Self {
        FormatError::Instance {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub id: usize,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<usize>>,
}

/// The objective is chosen by the optional top-level fields:
/// - `points`: exemplar clustering over the given unit-square points, one per element;
/// - `preference`: the news utility `Σ_j w_j ln(1 + count_j)` with `w = preference`;
/// - neither: coverage of the element `features` (missing features mean none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub d: usize,
    pub budgets: Vec<f64>,
    pub elements: Vec<ElementRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

pub struct LoadedInstance {
    pub file: InstanceFile,
    pub instance: KnapsackInstance,
    pub objective: Objective,
    /// Per-element components when the objective is additively decomposable.
    pub components: Option<Arc<dyn Decomposable>>,
}

impl fmt::Debug for LoadedInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoadedInstance")
            .field("instance", &self.instance)
            .field("objective", &self.objective)
            .field("decomposable", &self.components.is_some())
            .finish()
    }
}

impl InstanceFile {
    pub fn parse(path: &Path, text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = parse_json(path, text)?;
        if file.budgets.len() != file.d {
            return Err(FormatError::invalid(
                path,
                format!("d = {} but {} budgets given", file.d, file.budgets.len()),
            ));
        }
        for (k, e) in file.elements.iter().enumerate() {
            if e.id != k + 1 {
                return Err(FormatError::invalid(
                    path,
                    format!(
                        "element #{} has id {}; ids must be 1..n in order",
                        k + 1,
                        e.id
                    ),
                ));
            }
            if e.weights.len() != file.d {
                return Err(FormatError::invalid(
                    path,
                    format!(
                        "element {} has {} weights, expected {}",
                        e.id,
                        e.weights.len(),
                        file.d
                    ),
                ));
            }
        }
        if file.points.is_some() && file.preference.is_some() {
            return Err(FormatError::invalid(
                path,
                "points and preference are mutually exclusive",
            ));
        }
        if let Some(points) = &file.points {
            if points.len() != file.elements.len() {
                return Err(FormatError::invalid(
                    path,
                    format!(
                        "{} points for {} elements",
                        points.len(),
                        file.elements.len()
                    ),
                ));
            }
            if let Some(k) = points
                .iter()
                .position(|p| p.iter().any(|x| !(0.0..=1.0).contains(x)))
            {
                return Err(FormatError::invalid(
                    path,
                    format!("point {} lies outside the unit square", k + 1),
                ));
            }
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::parse(path, &read(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), FormatError> {
        write(path, &to_pretty_json(self))
    }

    fn features(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|e| e.features.clone().unwrap_or_default())
            .collect()
    }

    /// Builds the knapsack instance and objective; `path` only labels diagnostics.
    pub fn build(self, path: &Path) -> Result<LoadedInstance, FormatError> {
        let rows = (0..self.d)
            .map(|i| self.elements.iter().map(|e| e.weights[i]).collect())
            .collect();
        let instance = KnapsackInstance::new(rows, self.budgets.clone())
            .map_err(|e| FormatError::instance(path, e))?;
        let mut components = None;
        let objective = match (&self.points, &self.preference) {
            (Some(points), _) => {
                let clustering: Arc<dyn Decomposable> =
                    Arc::new(ExemplarClustering::new(points.clone()));
                components = Some(clustering.clone());
                Objective::new(AverageObjective(clustering))
            }
            (None, None) => make_coverage_objective(self.features()),
            (None, Some(pref)) => {
                let articles = self
                    .features()
                    .into_iter()
                    .map(|features| Article { features, words: 1 })
                    .collect();
                let corpus = NewsCorpus::new(pref.len(), articles, pref.clone())
                    .map_err(|e| FormatError::invalid(path, e))?;
                news_objective(Arc::new(corpus))
            }
        };
        Ok(LoadedInstance {
            file: self,
            instance,
            objective,
            components,
        })
    }
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance, FormatError> {
    InstanceFile::load(path)?.build(path)
}

/// Writes a news corpus as a one-row instance file with word counts as weights.
pub fn news_instance_file(corpus: &NewsCorpus, budget: f64) -> InstanceFile {
    InstanceFile {
        d: 1,
        budgets: vec![budget],
        elements: corpus
            .articles()
            .iter()
            .enumerate()
            .map(|(k, a)| ElementRecord {
                id: k + 1,
                weights: vec![a.words as f64],
                features: Some(a.features.clone()),
            })
            .collect(),
        preference: Some(corpus.preference().to_vec()),
        points: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CitationConfig {
    pub sources: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub t_max: u32,
    /// Recency, PageRank and reference-count budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CitationData {
    pub graph: CitationGraph,
    pub config: CitationConfig,
}

impl CitationData {
    pub fn model(&self) -> Result<DetectionModel, Error> {
        DetectionModel::new(
            &self.graph,
            &self.config.sources,
            self.config.weights.clone(),
            self.config.t_max,
        )
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (k + 1, line.split('\t').collect()))
    })
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    raw: &str,
    what: &str,
) -> Result<T, FormatError> {
    raw.trim().parse().map_err(|_| FormatError::Line {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse {what} from {raw:?}"),
    })
}

fn expect_fields(
    path: &Path,
    line: usize,
    fields: &[&str],
    count: usize,
) -> Result<(), FormatError> {
    if fields.len() != count {
        return Err(FormatError::Line {
            path: path.to_path_buf(),
            line,
            message: format!(
                "expected {count} tab-separated fields, found {}",
                fields.len()
            ),
        });
    }
    Ok(())
}

pub fn parse_edges(path: &Path, text: &str) -> Result<Vec<(usize, usize)>, FormatError> {
    data_lines(text)
        .map(|(line, fields)| {
            expect_fields(path, line, &fields, 2)?;
            Ok((
                field(path, line, fields[0], "src")?,
                field(path, line, fields[1], "dst")?,
            ))
        })
        .collect()
}

/// Returns ages and reference counts indexed by `id - 1`.
pub fn parse_meta(path: &Path, text: &str) -> Result<(Vec<f64>, Vec<u32>), FormatError> {
    let mut rows: Vec<(usize, usize, f64, u32)> = Vec::new();
    for (line, fields) in data_lines(text) {
        expect_fields(path, line, &fields, 3)?;
        rows.push((
            line,
            field(path, line, fields[0], "id")?,
            field(path, line, fields[1], "age_days")?,
            field(path, line, fields[2], "ref_count")?,
        ));
    }
    let n = rows.len();
    let mut ages = vec![f64::NAN; n];
    let mut refs = vec![0; n];
    for (line, id, age, count) in rows {
        if id == 0 || id > n || !ages[id - 1].is_nan() {
            return Err(FormatError::Line {
                path: path.to_path_buf(),
                line,
                message: format!("id {id} is out of range or repeated; ids must cover 1..={n}"),
            });
        }
        if !(age.is_finite() && age > 0.0) {
            return Err(FormatError::Line {
                path: path.to_path_buf(),
                line,
                message: format!("age_days must be positive, got {age}"),
            });
        }
        ages[id - 1] = age;
        refs[id - 1] = count;
    }
    Ok((ages, refs))
}

pub fn load_citation_dir(dir: &Path) -> Result<CitationData, FormatError> {
    let edges_path = dir.join(EDGES_FILE);
    let meta_path = dir.join(META_FILE);
    let config_path = dir.join(CONFIG_FILE);
    let arcs = parse_edges(&edges_path, &read(&edges_path)?)?;
    let (ages, refs) = parse_meta(&meta_path, &read(&meta_path)?)?;
    let config: CitationConfig = parse_json(&config_path, &read(&config_path)?)?;
    let graph =
        CitationGraph::new(&arcs, ages, refs).map_err(|e| FormatError::instance(&edges_path, e))?;
    let data = CitationData { graph, config };
    data.model()
        .map_err(|e| FormatError::instance(&config_path, e))?;
    Ok(data)
}

pub fn save_citation_dir(dir: &Path, data: &CitationData) -> Result<(), FormatError> {
    fs::create_dir_all(dir).map_err(|source| FormatError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut edges = String::new();
    for (src, dst) in data.graph.arcs() {
        edges.push_str(&format!("{src}\t{dst}\n"));
    }
    let mut meta = String::new();
    for (k, (age, refs)) in data
        .graph
        .age_days()
        .iter()
        .zip(data.graph.ref_counts())
        .enumerate()
    {
        meta.push_str(&format!("{}\t{age}\t{refs}\n", k + 1));
    }
    write(&dir.join(EDGES_FILE), &edges)?;
    write(&dir.join(META_FILE), &meta)?;
    write(&dir.join(CONFIG_FILE), &to_pretty_json(&data.config))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub solution: Vec<usize>,
    pub value: f64,
    pub online_bound: f64,
    pub offline_bound: f64,
    pub metrics: SolveMetrics,
    pub wall_time_secs: f64,
}

impl ResultRecord {
    pub fn new(
        solution: &Solution,
        online_bound: f64,
        offline_bound: f64,
        metrics: SolveMetrics,
        wall_time_secs: f64,
    ) -> Self {
        ResultRecord {
            solution: solution.sorted_elements(),
            value: solution.value,
            online_bound,
            offline_bound,
            metrics,
            wall_time_secs,
        }
    }
}
