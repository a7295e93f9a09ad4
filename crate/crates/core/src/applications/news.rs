//! News recommendation: `f(S) = Σ_j w_j ln(1 + #{s ∈ S : s has feature j})` under a
//! word-count budget.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Problem;
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::objective::{Objective, Restricted, SetFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    /// Feature ids in `0..num_features`.
    pub features: Vec<usize>,
    pub words: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsCorpus {
    num_features: usize,
    articles: Vec<Article>,
    preference: Vec<f64>,
}

impl NewsCorpus {
    pub fn new(
        num_features: usize,
        mut articles: Vec<Article>,
        preference: Vec<f64>,
    ) -> Result<Self> {
        if preference.len() != num_features {
            return Err(Error::InvalidArgument(format!(
                "preference vector has {} entries for {num_features} features",
                preference.len()
            )));
        }
        if let Some(w) = preference.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "preference weights must be nonnegative, got {w}"
            )));
        }
        for (k, a) in articles.iter_mut().enumerate() {
            if a.words == 0 {
                return Err(Error::InvalidArgument(format!(
                    "article {} has no words",
                    k + 1
                )));
            }
            if let Some(&f) = a.features.iter().find(|&&f| f >= num_features) {
                return Err(Error::InvalidArgument(format!(
                    "article {} has feature {f} outside 0..{num_features}",
                    k + 1
                )));
            }
            a.features.sort_unstable();
            a.features.dedup();
        }
        Ok(NewsCorpus {
            num_features,
            articles,
            preference,
        })
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn preference(&self) -> &[f64] {
        &self.preference
    }
}

pub struct NewsFunction {
    corpus: Arc<NewsCorpus>,
}

impl NewsFunction {
    pub fn new(corpus: Arc<NewsCorpus>) -> Self {
        NewsFunction { corpus }
    }
}

impl SetFunction for NewsFunction {
    fn ground_size(&self) -> usize {
        self.corpus.articles.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        let mut features: Vec<usize> = set
            .iter()
            .flat_map(|&j| self.corpus.articles[j - 1].features.iter().copied())
            .collect();
        features.sort_unstable();
        features
            .chunk_by(|a, b| a == b)
            .map(|run| self.corpus.preference[run[0]] * (run.len() as f64).ln_1p())
            .sum()
    }
}

pub fn news_objective(corpus: Arc<NewsCorpus>) -> Objective {
    Objective::new(NewsFunction::new(corpus))
}

/// One row of word counts against the reading budget `b`. Articles longer than `b` are
/// left out.
pub fn build_news_instance(corpus: Arc<NewsCorpus>, budget: f64) -> Result<Problem> {
    let words = corpus.articles.iter().map(|a| a.words as f64).collect();
    let (instance, labels) = KnapsackInstance::admissible(vec![words], vec![budget])?;
    let full: Arc<dyn SetFunction> = Arc::new(NewsFunction::new(corpus));
    let objective = if labels.len() == full.ground_size() {
        Objective::from_arc(full)
    } else {
        Objective::new(Restricted::new(full, labels.clone()))
    };
    Ok(Problem {
        objective,
        instance,
        labels,
    })
}
