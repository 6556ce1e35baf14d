//! Classifiers over the feature bits of a labelled dataset: the RBM itself
//! (scored by free energy), k-nearest neighbours and Bernoulli naive Bayes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::binary::BinaryVector;
use crate::data::{ClassLabel, Dataset};
use crate::error::{check_dim, Error, Result};
use crate::rbm::{self, RbmParams, TrainConfig};
use crate::rng;
use crate::sampler::ModelTermSampler;

fn check_bits(query: &[u8]) -> Result<()> {
    match query.iter().position(|&b| b > 1) {
        Some(index) => Err(Error::Domain {
            domain: "binary",
            index,
            value: query[index] as i64,
        }),
        None => Ok(()),
    }
}

fn completion(features: &[u8], label: ClassLabel) -> Result<BinaryVector> {
    let mut bits = features.to_vec();
    bits.extend_from_slice(&label.code().expect("real class"));
    BinaryVector::new(bits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbmDecision {
    pub label: ClassLabel,
    /// `F(features + attack code) − F(features + benign code)`; positive
    /// favours benign.
    pub gap: f64,
}

/// Scores both valid label completions of `features` by free energy and
/// picks the lower one. Exact ties go to benign.
pub fn rbm_classify(params: &RbmParams, features: &[u8]) -> Result<RbmDecision> {
    check_dim("feature vector", params.n_visible().saturating_sub(2), features.len())?;
    let benign = params.free_energy(&completion(features, ClassLabel::Benign)?)?;
    let attack = params.free_energy(&completion(features, ClassLabel::Attack)?)?;
    let gap = attack - benign;
    let label = if gap >= 0.0 {
        ClassLabel::Benign
    } else {
        ClassLabel::Attack
    };
    Ok(RbmDecision { label, gap })
}

/// Alternative inference: clamps the features with both label bits at 0,
/// reconstructs the visible layer once through the hidden probabilities and
/// thresholds the two label bits at 0.5. May return indeterminate.
pub fn rbm_classify_reconstruction(params: &RbmParams, features: &[u8]) -> Result<ClassLabel> {
    check_dim("feature vector", params.n_visible().saturating_sub(2), features.len())?;
    let mut bits = features.to_vec();
    bits.extend_from_slice(&[0, 0]);
    let v = BinaryVector::new(bits)?;
    let h = params.hidden_activation_probs(&v)?;
    let recon = params.visible_probs_of(h.view());
    let n = recon.len();
    Ok(ClassLabel::from_code(
        (recon[n - 2] > 0.5) as u8,
        (recon[n - 1] > 0.5) as u8,
    ))
}

/// Majority label among the `k` training records nearest in Hamming
/// distance over feature bits. Equal distances prefer the lower record
/// index; equal votes prefer benign over attack.
pub fn knn_classify(train: &Dataset, query: &[u8], k: usize) -> Result<ClassLabel> {
    if train.is_empty() {
        return Err(Error::Empty("training data"));
    }
    if k == 0 || k > train.len() {
        return Err(Error::Config(format!(
            "k must be between 1 and {}, got {k}",
            train.len()
        )));
    }
    check_dim("feature vector", train.feature_width(), query.len())?;
    check_bits(query)?;
    let mut dist: Vec<(usize, usize)> = (0..train.len())
        .map(|i| {
            let d = train.features(i).iter().zip(query).filter(|(a, b)| a != b).count();
            (d, i)
        })
        .collect();
    dist.select_nth_unstable(k - 1);
    let mut votes = [0usize; 3];
    for &(_, i) in &dist[..k] {
        votes[train.label(i) as usize] += 1;
    }
    let best = (0..3)
        .max_by_key(|&c| (votes[c], std::cmp::Reverse(c)))
        .expect("three classes");
    Ok([ClassLabel::Benign, ClassLabel::Attack, ClassLabel::Indeterminate][best])
}

/// Bernoulli naive Bayes with Laplace smoothing (α = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    /// Indexed benign = 0, attack = 1.
    log_prior: [f64; 2],
    log_p_one: [Vec<f64>; 2],
    log_p_zero: [Vec<f64>; 2],
}

pub fn nb_fit(train: &Dataset) -> Result<NaiveBayes> {
    let width = train.feature_width();
    let mut n = [0usize; 2];
    let mut ones = [vec![0usize; width], vec![0usize; width]];
    for i in 0..train.len() {
        let c = match train.label(i) {
            ClassLabel::Benign => 0,
            ClassLabel::Attack => 1,
            ClassLabel::Indeterminate => continue,
        };
        n[c] += 1;
        for (count, &bit) in ones[c].iter_mut().zip(train.features(i)) {
            *count += bit as usize;
        }
    }
    for (c, label) in [(0, ClassLabel::Benign), (1, ClassLabel::Attack)] {
        if n[c] == 0 {
            return Err(Error::EmptyClass(label));
        }
    }
    let total = (n[0] + n[1]) as f64;
    let p_one = |c: usize| -> Vec<f64> {
        ones[c]
            .iter()
            .map(|&k| (k as f64 + 1.0) / (n[c] as f64 + 2.0))
            .collect()
    };
    let (p0, p1) = (p_one(0), p_one(1));
    Ok(NaiveBayes {
        log_prior: [(n[0] as f64 / total).ln(), (n[1] as f64 / total).ln()],
        log_p_one: [p0.iter().map(|p| p.ln()).collect(), p1.iter().map(|p| p.ln()).collect()],
        log_p_zero: [
            p0.iter().map(|p| (1.0 - p).ln()).collect(),
            p1.iter().map(|p| (1.0 - p).ln()).collect(),
        ],
    })
}

impl NaiveBayes {
    pub fn feature_width(&self) -> usize {
        self.log_p_one[0].len()
    }

    /// Smoothed `P(x_i = 1 | class)`.
    pub fn p_one(&self, class: ClassLabel, feature: usize) -> f64 {
        let c = match class {
            ClassLabel::Benign => 0,
            _ => 1,
        };
        self.log_p_one[c][feature].exp()
    }

    /// Unnormalised log posteriors `[benign, attack]`.
    pub fn log_posteriors(&self, query: &[u8]) -> Result<[f64; 2]> {
        check_dim("feature vector", self.feature_width(), query.len())?;
        check_bits(query)?;
        let score = |c: usize| {
            self.log_prior[c]
                + query
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| {
                        if b == 1 {
                            self.log_p_one[c][i]
                        } else {
                            self.log_p_zero[c][i]
                        }
                    })
                    .sum::<f64>()
        };
        Ok([score(0), score(1)])
    }

    /// Maximum-posterior class; ties go to benign.
    pub fn classify(&self, query: &[u8]) -> Result<ClassLabel> {
        let [benign, attack] = self.log_posteriors(query)?;
        Ok(if attack > benign {
            ClassLabel::Attack
        } else {
            ClassLabel::Benign
        })
    }
}

pub fn nb_classify(model: &NaiveBayes, query: &[u8]) -> Result<ClassLabel> {
    model.classify(query)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    Rbm,
    Knn,
    NaiveBayes,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Rbm => "rbm",
            ClassifierKind::Knn => "knn",
            ClassifierKind::NaiveBayes => "nb",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Rbm => "Restricted Boltzmann Machine",
            ClassifierKind::Knn => "K-Nearest Neighbor (k=3)",
            ClassifierKind::NaiveBayes => "Naive Bayes (Bernoulli)",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rbm" => Ok(ClassifierKind::Rbm),
            "knn" => Ok(ClassifierKind::Knn),
            "nb" | "naive-bayes" | "naive_bayes" => Ok(ClassifierKind::NaiveBayes),
            other => Err(Error::Config(format!("unknown classifier `{other}`"))),
        }
    }
}

pub const DEFAULT_KNN_K: usize = 3;

/// How to fit an RBM: layer size, initial weight scale, optimiser settings
/// and the model-term source.
#[derive(Debug, Clone)]
pub struct RbmTrainer {
    pub n_hidden: usize,
    pub init_std: f64,
    pub config: TrainConfig,
    pub sampler: ModelTermSampler,
}

impl RbmTrainer {
    /// Initialises from `seed` and trains on every record of `data`
    /// (features and label bits together).
    pub fn fit(&self, data: &[BinaryVector], seed: u64) -> Result<rbm::TrainOutcome> {
        let width = data
            .first()
            .map(BinaryVector::len)
            .ok_or(Error::Empty("training data"))?;
        if self.n_hidden == 0 {
            return Err(Error::Config("the hidden layer needs at least one unit".into()));
        }
        let init = RbmParams::random(width, self.n_hidden, self.init_std, &mut rng::derive(seed, 0));
        let config = TrainConfig {
            rng_seed: seed,
            ..self.config.clone()
        };
        rbm::train(init, data, &config, &self.sampler)
    }
}

#[derive(Debug, Clone)]
pub enum FittedClassifier {
    Rbm(RbmParams),
    Knn { train: Dataset, k: usize },
    NaiveBayes(NaiveBayes),
}

impl FittedClassifier {
    pub fn fit(kind: ClassifierKind, train: &Dataset, trainer: &RbmTrainer, seed: u64) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Rbm => FittedClassifier::Rbm(trainer.fit(train.records(), seed)?.params),
            ClassifierKind::Knn => FittedClassifier::Knn {
                train: train.clone(),
                k: DEFAULT_KNN_K,
            },
            ClassifierKind::NaiveBayes => FittedClassifier::NaiveBayes(nb_fit(train)?),
        })
    }

    pub fn predict(&self, features: &[u8]) -> Result<ClassLabel> {
        match self {
            FittedClassifier::Rbm(p) => rbm_classify(p, features).map(|d| d.label),
            FittedClassifier::Knn { train, k } => knn_classify(train, features, *k),
            FittedClassifier::NaiveBayes(nb) => nb.classify(features),
        }
    }

    /// Predictions for every record of `test`, in order.
    pub fn predict_all(&self, test: &Dataset) -> Result<Vec<ClassLabel>> {
        (0..test.len())
            .into_par_iter()
            .map(|i| self.predict(test.features(i)))
            .collect()
    }
}
