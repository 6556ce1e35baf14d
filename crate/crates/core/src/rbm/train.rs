use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use super::{batch_matrix, exact::ENUMERATION_LIMIT, gradient_data_term, log_likelihood_exact, RbmParams};
use crate::binary::BinaryVector;
use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::sampler::ModelTermSampler;

/// Stop once reconstruction error has not improved by `min_delta` for
/// `patience` consecutive epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub patience: usize,
    pub min_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub rng_seed: u64,
    pub early_stop: Option<EarlyStop>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 50,
            batch_size: 20,
            rng_seed: 0,
            early_stop: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if let Some(stop) = self.early_stop {
            if stop.patience == 0 || stop.min_delta.is_nan() || stop.min_delta < 0.0 {
                return Err(Error::Config("early stop needs patience ≥ 1 and min_delta ≥ 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    /// 1-based epoch number.
    pub epoch: usize,
    pub reconstruction_error: f64,
    /// Mean exact log-likelihood per record, when the model is enumerable.
    pub log_likelihood: Option<f64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: RbmParams,
    pub log: Vec<EpochLog>,
    /// Mean exact log-likelihood before the first update, when enumerable.
    pub initial_log_likelihood: Option<f64>,
    pub stopped_early: bool,
}

/// Mean squared difference between records and their one-step mean-field
/// reconstructions `σ(b + σ(c + vW) Wᵀ)`.
pub fn reconstruction_error(params: &RbmParams, data: &[BinaryVector]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("data"));
    }
    let refs: Vec<&BinaryVector> = data.iter().collect();
    let v = batch_matrix(&refs, params.n_visible())?;
    let recon = params.visible_probs_batch(&params.hidden_probs_batch(&v));
    let sq: f64 = (&v - &recon).iter().map(|d| d * d).sum();
    Ok(sq / v.len() as f64)
}

fn mean_log_likelihood(params: &RbmParams, data: &[BinaryVector]) -> Result<Option<f64>> {
    if params.n_visible() + params.n_hidden() > ENUMERATION_LIMIT {
        return Ok(None);
    }
    Ok(Some(log_likelihood_exact(params, data)? / data.len() as f64))
}

/// Minibatch gradient ascent on the log-likelihood.
///
/// Each step pairs the data term of the batch with the model term supplied
/// by `sampler` and moves every parameter by `learning_rate` times the
/// difference. Records are reshuffled at the start of each epoch; a short
/// final batch is used with its own size. All randomness derives from
/// `config.rng_seed`.
pub fn train(
    params: RbmParams,
    data: &[BinaryVector],
    config: &TrainConfig,
    sampler: &ModelTermSampler,
) -> Result<TrainOutcome> {
    config.validate()?;
    sampler.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training data"));
    }
    for record in data {
        check_dim("record width", params.n_visible(), record.len())?;
    }

    let mut params = params;
    let mut rng = rng::seeded(config.rng_seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);
    let initial_log_likelihood = mean_log_likelihood(&params, data)?;
    let mut best_error = f64::INFINITY;
    let mut stale = 0;
    let mut stopped_early = false;
    let mut step = 0;
    let start = Instant::now();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&BinaryVector> = chunk.iter().map(|&i| &data[i]).collect();
            let wrap = |e: Error| Error::Step {
                step,
                source: Box::new(e),
            };
            let data_term = gradient_data_term(&params, &batch).map_err(wrap)?;
            let model_term = sampler.model_term(&params, &batch, &mut rng).map_err(wrap)?;
            params
                .apply_update_in_place(&data_term.minus(&model_term), config.learning_rate)
                .map_err(wrap)?;
            step += 1;
        }

        let reconstruction_error = reconstruction_error(&params, data)?;
        log.push(EpochLog {
            epoch,
            reconstruction_error,
            log_likelihood: mean_log_likelihood(&params, data)?,
            elapsed: start.elapsed(),
        });

        if let Some(stop) = config.early_stop {
            if reconstruction_error < best_error - stop.min_delta {
                best_error = reconstruction_error;
                stale = 0;
            } else {
                stale += 1;
                if stale >= stop.patience {
                    stopped_early = true;
                    break;
                }
            }
        }
    }

    Ok(TrainOutcome {
        params,
        log,
        initial_log_likelihood,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Vec<BinaryVector> {
        (0..6).map(|i| BinaryVector::from_index(i * 5 % 16, 4)).collect()
    }

    #[test]
    fn zero_epochs_is_identity() {
        let p = RbmParams::random(4, 3, 0.1, &mut rng::seeded(2));
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let out = train(p.clone(), &data(), &cfg, &ModelTermSampler::Cd { k: 1 }).unwrap();
        assert_eq!(out.params, p);
        assert!(out.log.is_empty());
    }

    #[test]
    fn rejects_bad_config_and_data() {
        let p = RbmParams::zeros(4, 3);
        let sampler = ModelTermSampler::Cd { k: 1 };
        let bad = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(p.clone(), &data(), &bad, &sampler),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            train(p.clone(), &[], &TrainConfig::default(), &sampler),
            Err(Error::Empty(_))
        ));
        let wide = vec![BinaryVector::zeros(5)];
        assert!(matches!(
            train(p, &wide, &TrainConfig::default(), &sampler),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn divergence_carries_step_index() {
        let p = RbmParams::random(4, 3, 0.1, &mut rng::seeded(2));
        let cfg = TrainConfig {
            learning_rate: f64::MAX,
            epochs: 50,
            batch_size: 2,
            ..TrainConfig::default()
        };
        let err = train(p, &data(), &cfg, &ModelTermSampler::Exact).unwrap_err();
        assert!(err.is_divergence(), "{err}");
        assert!(matches!(err, Error::Step { .. }));
    }

    #[test]
    fn early_stop_on_plateau() {
        let p = RbmParams::zeros(4, 3);
        let cfg = TrainConfig {
            learning_rate: 1e-12,
            epochs: 100,
            early_stop: Some(EarlyStop {
                patience: 3,
                min_delta: 1e-3,
            }),
            ..TrainConfig::default()
        };
        let out = train(p, &data(), &cfg, &ModelTermSampler::Cd { k: 1 }).unwrap();
        assert!(out.stopped_early);
        assert_eq!(out.log.len(), 4);
    }

    #[test]
    fn logs_likelihood_when_enumerable() {
        let p = RbmParams::zeros(4, 3);
        let cfg = TrainConfig {
            epochs: 2,
            ..TrainConfig::default()
        };
        let out = train(p, &data(), &cfg, &ModelTermSampler::Exact).unwrap();
        assert!(out.initial_log_likelihood.is_some());
        assert!(out.log.iter().all(|e| e.log_likelihood.is_some()));
    }
}
