//! Seeded synthetic inputs: random coverage instances, news corpora and citation DAGs.
//!
//! Every generator draws from a ChaCha8 stream derived from one 64-bit seed, so the same
//! seed always produces the same data.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::applications::citation::CitationGraph;
use crate::applications::news::{Article, NewsCorpus};
use crate::formats::{CitationConfig, CitationData, ElementRecord, InstanceFile};

/// Independent generator number `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    pub n: usize,
    pub d: usize,
    pub universe: usize,
    pub max_features: usize,
}

impl CoverageParams {
    pub fn new(n: usize, d: usize) -> Self {
        CoverageParams {
            n,
            d,
            universe: 2 * n.max(1),
            max_features: 4,
        }
    }
}

/// Budgets uniform in `[2, 10]`; each weight is `b_i u²` with `u` uniform in `[0.15, 1]`,
/// so most items are light and a few nearly fill a row. Items cover between one and
/// `max_features` distinct universe elements.
pub fn random_coverage_instance<R: Rng>(rng: &mut R, params: CoverageParams) -> InstanceFile {
    let budgets: Vec<f64> = (0..params.d)
        .map(|_| rng.random_range(2.0..=10.0))
        .collect();
    let universe = params.universe.max(1);
    let elements = (1..=params.n)
        .map(|id| {
            let weights = budgets
                .iter()
                .map(|&b| {
                    let u: f64 = rng.random_range(0.15..=1.0);
                    b * u * u
                })
                .collect();
            let count = rng.random_range(1..=params.max_features.clamp(1, universe));
            let mut features = sample(rng, universe, count).into_vec();
            features.sort_unstable();
            ElementRecord {
                id,
                weights,
                features: Some(features),
            }
        })
        .collect();
    InstanceFile {
        d: params.d,
        budgets,
        elements,
        preference: None,
        points: None,
    }
}

/// Exemplar clustering over `n` uniform points of the unit square with one row of
/// weights uniform in `[1, 2]` and budget `budget`.
pub fn exemplar_instance<R: Rng>(rng: &mut R, n: usize, budget: f64) -> InstanceFile {
    let points = (0..n)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let elements = (1..=n)
        .map(|id| ElementRecord {
            id,
            weights: vec![rng.random_range(1.0..=2.0f64).min(budget)],
            features: None,
        })
        .collect();
    InstanceFile {
        d: 1,
        budgets: vec![budget],
        elements,
        preference: None,
        points: Some(points),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewsParams {
    pub articles: usize,
    pub features: usize,
    pub min_features: usize,
    pub max_features: usize,
    pub max_words: u32,
    pub zipf_exponent: f64,
}

impl Default for NewsParams {
    fn default() -> Self {
        NewsParams {
            articles: 200,
            features: 480,
            min_features: 3,
            max_features: 12,
            max_words: 5,
            zipf_exponent: 1.0,
        }
    }
}

/// Feature popularity follows a Zipf law over a random permutation of the feature ids;
/// word counts are uniform on `1..=max_words` and preferences uniform on `[0, 1)`.
pub fn news_corpus<R: Rng>(rng: &mut R, params: NewsParams) -> NewsCorpus {
    let m = params.features.max(1);
    let popularity = sample(rng, m, m).into_vec();
    let zipf = Zipf::new(m as f64, params.zipf_exponent).expect("valid Zipf parameters");
    let articles = (0..params.articles)
        .map(|_| {
            let want = rng
                .random_range(params.min_features..=params.max_features)
                .min(m);
            let mut features = Vec::with_capacity(want);
            while features.len() < want {
                let f = popularity[zipf.sample(rng) as usize - 1];
                if !features.contains(&f) {
                    features.push(f);
                }
            }
            features.sort_unstable();
            Article {
                features,
                words: rng.random_range(1..=params.max_words),
            }
        })
        .collect();
    let preference = (0..m).map(|_| rng.random::<f64>()).collect();
    NewsCorpus::new(m, articles, preference).expect("generated corpus is valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CitationParams {
    pub papers: usize,
    pub sources: usize,
    pub max_references: usize,
    pub max_age_days: f64,
    pub t_max: u32,
    pub budgets: [f64; 3],
}

impl Default for CitationParams {
    fn default() -> Self {
        CitationParams {
            papers: 500,
            sources: 5,
            max_references: 6,
            max_age_days: 30.0,
            t_max: 50,
            budgets: [20.0, 10.0, 20.0],
        }
    }
}

/// Papers are numbered in publication order and only cite earlier papers, so the graph
/// is a DAG by construction. Most citations go to the 60 most recent predecessors. Age
/// decreases linearly from `max_age_days` for paper 1 to 1 for paper `n`; each reference
/// count is the out-degree plus up to three references outside the graph. Sources are
/// drawn from the older half with uniform weights.
pub fn citation_data<R: Rng>(rng: &mut R, params: CitationParams) -> CitationData {
    let n = params.papers.max(1);
    let mut arcs = Vec::new();
    let mut ref_counts = vec![0u32; n];
    for t in 2..=n {
        let k = rng.random_range(1..=params.max_references.min(t - 1).max(1));
        let mut cited: Vec<usize> = Vec::with_capacity(k);
        while cited.len() < k {
            let target = if rng.random_bool(0.7) {
                rng.random_range(t.saturating_sub(60).max(1)..t)
            } else {
                rng.random_range(1..t)
            };
            if !cited.contains(&target) {
                cited.push(target);
            }
        }
        ref_counts[t - 1] = k as u32;
        arcs.extend(cited.into_iter().map(|dst| (t, dst)));
    }
    for count in &mut ref_counts {
        *count += rng.random_range(0..=3);
    }
    let age_days = (1..=n)
        .map(|t| (1.0 + (params.max_age_days - 1.0) * (n - t) as f64 / n as f64).round())
        .collect();
    let older = (n / 2).max(params.sources.min(n));
    let mut sources: Vec<usize> = sample(rng, older, params.sources.min(older))
        .into_iter()
        .map(|v| v + 1)
        .collect();
    sources.sort_unstable();
    let graph = CitationGraph::new(&arcs, age_days, ref_counts).expect("generated graph is a DAG");
    CitationData {
        graph,
        config: CitationConfig {
            weights: Some(vec![1.0 / sources.len() as f64; sources.len()]),
            sources,
            t_max: params.t_max,
            budgets: Some(params.budgets),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, 0).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| rng_for(7, 0).random()).collect();
        assert_eq!(a, b);
        let x: u64 = rng_for(7, 0).random();
        let y: u64 = rng_for(7, 1).random();
        assert_ne!(x, y);
    }

    #[test]
    fn coverage_instances_validate() {
        for seed in 0..20 {
            let file = random_coverage_instance(&mut rng_for(seed, 0), CoverageParams::new(12, 3));
            let again = random_coverage_instance(&mut rng_for(seed, 0), CoverageParams::new(12, 3));
            assert_eq!(file, again);
            let loaded = file.build(Path::new("synthetic")).unwrap();
            assert_eq!(loaded.instance.n(), 12);
            assert_eq!(loaded.instance.d(), 3);
        }
    }

    #[test]
    fn exemplar_instances_validate() {
        let file = exemplar_instance(&mut rng_for(4, 0), 30, 3.0);
        let loaded = file.build(Path::new("synthetic")).unwrap();
        assert!(loaded.components.is_some());
        assert_eq!(loaded.instance.n(), 30);
    }

    #[test]
    fn news_corpus_shape() {
        let corpus = news_corpus(&mut rng_for(3, 0), NewsParams::default());
        assert_eq!(corpus.articles().len(), 200);
        assert_eq!(corpus.num_features(), 480);
        assert!(corpus.articles().iter().all(|a| (1..=5).contains(&a.words)));
        assert!(corpus
            .articles()
            .iter()
            .all(|a| (3..=12).contains(&a.features.len())
                && a.features.windows(2).all(|w| w[0] < w[1])));
        assert!(corpus.preference().iter().all(|w| (0.0..1.0).contains(w)));
    }

    #[test]
    fn citation_graph_is_valid() {
        let data = citation_data(&mut rng_for(5, 0), CitationParams::default());
        assert_eq!(data.graph.n(), 500);
        assert!(data.graph.arcs().all(|(src, dst)| src > dst));
        assert_eq!(data.config.sources.len(), 5);
        assert!(data.model().is_ok());
        for v in 1..=500 {
            assert!(data.graph.ref_counts()[v - 1] as usize >= data.graph.references(v).len());
        }
        let ages = data.graph.age_days();
        assert_eq!(ages[0], 30.0);
        assert_eq!(ages[499], 1.0);
    }
}
