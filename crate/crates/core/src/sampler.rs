//! Estimators of the model-dependent gradient term `⟨v h⟩`, `⟨v⟩`, `⟨h⟩`
//! under the RBM's own distribution.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::binary::BinaryVector;
use crate::error::{check_dim, Error, Result};
use crate::ising::{self, AnnealSchedule, RemoteAnnealer};
use crate::rbm::{batch_matrix, RbmParams};

pub use crate::rbm::{exact_model_expectations, ModelTermEstimate, Moments};

pub const DEFAULT_SWEEPS: usize = 50;
/// Reads requested when generating synthetic data from the annealer.
pub const DEFAULT_NUM_READS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EmulatorSettings {
    /// Energy scale `S`: samples follow `exp(−E/S)`.
    pub scale_s: f64,
    /// Reads per training step; `None` uses the batch size.
    pub num_reads: Option<usize>,
    pub sweeps: usize,
}

impl Default for EmulatorSettings {
    fn default() -> Self {
        EmulatorSettings {
            scale_s: 1.0,
            num_reads: None,
            sweeps: DEFAULT_SWEEPS,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelTermSampler {
    /// CD-k chains started at the batch.
    Cd {
        k: usize,
    },
    /// Exact enumeration (small models only).
    Exact,
    AnnealerEmulator(EmulatorSettings),
    AnnealerRemote(RemoteAnnealer),
}

impl ModelTermSampler {
    pub fn name(&self) -> &'static str {
        match self {
            ModelTermSampler::Cd { .. } => "cd",
            ModelTermSampler::Exact => "exact",
            ModelTermSampler::AnnealerEmulator(_) => "annealer_emulator",
            ModelTermSampler::AnnealerRemote(_) => "annealer_remote",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive_scale = |s: f64| {
            if s > 0.0 && s.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("scale S must be positive, got {s}")))
            }
        };
        match self {
            ModelTermSampler::Cd { k } if *k == 0 => Err(Error::Config("CD needs k ≥ 1".into())),
            ModelTermSampler::AnnealerEmulator(s) => {
                positive_scale(s.scale_s)?;
                if s.sweeps == 0 || s.num_reads == Some(0) {
                    return Err(Error::Config("sweeps and reads must be at least 1".into()));
                }
                Ok(())
            }
            ModelTermSampler::AnnealerRemote(r) => {
                positive_scale(r.scale_s)?;
                if r.num_reads == Some(0) {
                    return Err(Error::Config("reads must be at least 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Model term for one training step on `batch`.
    pub fn model_term<R: Rng + ?Sized>(
        &self,
        params: &RbmParams,
        batch: &[&BinaryVector],
        rng: &mut R,
    ) -> Result<Moments> {
        match self {
            ModelTermSampler::Cd { k } => cd_model_term(params, batch, *k, rng),
            ModelTermSampler::Exact => exact_model_expectations(params),
            ModelTermSampler::AnnealerEmulator(s) => {
                let reads = s.num_reads.unwrap_or(batch.len().max(1));
                let samples = annealer_emulator_sample(params, s.scale_s, reads, s.sweeps, rng)?;
                model_term_from_samples(&samples)
            }
            ModelTermSampler::AnnealerRemote(remote) => {
                let reads = remote.num_reads.unwrap_or(batch.len().max(1));
                let samples = remote.sample(params, reads, rng)?;
                model_term_from_samples(&samples)
            }
        }
    }
}

fn bernoulli<R: Rng + ?Sized>(probs: &Array2<f64>, rng: &mut R) -> Array2<f64> {
    probs.mapv(|p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
}

fn bernoulli_bits<R: Rng + ?Sized>(probs: &Array1<f64>, rng: &mut R) -> Vec<u8> {
    probs.iter().map(|&p| (rng.random::<f64>() < p) as u8).collect()
}

/// CD-k estimate of the model term.
///
/// Starts from `H = P(h | V)` for the batch. With `k = 1` the reconstruction
/// is `V′ = σ(b + H Wᵀ)`, `H′ = σ(c + V′ W)` on probabilities throughout.
/// For `k > 1` the chain runs `k` rounds on Bernoulli-sampled states and
/// pairs the final binary `V′` with `H′ = P(h | V′)`, which stays unbiased
/// as the chain mixes. Returns batch means of `V′ᵀH′`, `V′` and `H′`.
pub fn cd_model_term<R: Rng + ?Sized>(
    params: &RbmParams,
    batch: &[&BinaryVector],
    k: usize,
    rng: &mut R,
) -> Result<Moments> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    if k == 0 {
        return Err(Error::Config("CD needs k ≥ 1".into()));
    }
    let v0 = batch_matrix(batch, params.n_visible())?;
    let h0 = params.hidden_probs_batch(&v0);
    if k == 1 {
        let v_recon = params.visible_probs_batch(&h0);
        let h_recon = params.hidden_probs_batch(&v_recon);
        return Ok(Moments::from_rows(&v_recon, &h_recon));
    }
    let mut h = bernoulli(&h0, rng);
    let mut v = v0;
    for round in 0..k {
        v = bernoulli(&params.visible_probs_batch(&h), rng);
        if round + 1 < k {
            h = bernoulli(&params.hidden_probs_batch(&v), rng);
        }
    }
    let h_recon = params.hidden_probs_batch(&v);
    Ok(Moments::from_rows(&v, &h_recon))
}

/// Block Gibbs chain from `v0`: each cycle samples `h ~ P(h|v)` then
/// `v ~ P(v|h)`. Returns the final visible state with a hidden state drawn
/// from `P(h|v)`; with zero cycles that is `v0` and one hidden draw.
pub fn gibbs_chain<R: Rng + ?Sized>(
    params: &RbmParams,
    v0: &BinaryVector,
    cycles: usize,
    rng: &mut R,
) -> Result<(BinaryVector, BinaryVector)> {
    check_dim("visible vector", params.n_visible(), v0.len())?;
    let mut v = v0.clone();
    for _ in 0..cycles {
        let h = BinaryVector::from_bits_unchecked(bernoulli_bits(&params.hidden_probs_of(v.to_f64().view()), rng));
        v = BinaryVector::from_bits_unchecked(bernoulli_bits(&params.visible_probs_of(h.to_f64().view()), rng));
    }
    let h = BinaryVector::from_bits_unchecked(bernoulli_bits(&params.hidden_probs_of(v.to_f64().view()), rng));
    Ok((v, h))
}

/// Samples the RBM through its Ising form with classical thermal annealing.
///
/// The problem is scaled by `1/scale_s`, and each read ramps the temperature
/// geometrically from 10 down to 1 over `sweeps` sweeps, so reads
/// approximate `exp(−E(v, h)/scale_s)/Z`.
pub fn annealer_emulator_sample<R: Rng + ?Sized>(
    params: &RbmParams,
    scale_s: f64,
    num_reads: usize,
    sweeps: usize,
    rng: &mut R,
) -> Result<Vec<(BinaryVector, BinaryVector)>> {
    if num_reads == 0 {
        return Err(Error::Config("reads must be at least 1".into()));
    }
    let problem = ising::rbm_to_ising(params, scale_s)?;
    let schedule = AnnealSchedule::geometric(sweeps, ising::DEFAULT_START_RATIO)?;
    ising::anneal(&problem, &schedule, num_reads, rng)
        .iter()
        .map(|spins| ising::split_logical(spins, params.n_visible()))
        .collect()
}

/// Empirical means of `v_i h_j`, `v_i`, `h_j` over the samples.
pub fn model_term_from_samples(samples: &[(BinaryVector, BinaryVector)]) -> Result<Moments> {
    let Some((v0, h0)) = samples.first() else {
        return Err(Error::Empty("sample list"));
    };
    let vs: Vec<&BinaryVector> = samples.iter().map(|(v, _)| v).collect();
    let hs: Vec<&BinaryVector> = samples.iter().map(|(_, h)| h).collect();
    let v = batch_matrix(&vs, v0.len())?;
    let h = batch_matrix(&hs, h0.len())?;
    Ok(Moments::from_rows(&v, &h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn cd_on_zero_model() {
        let p = RbmParams::zeros(3, 2);
        let records = [BinaryVector::ones(3), BinaryVector::zeros(3)];
        let batch: Vec<_> = records.iter().collect();
        let m = cd_model_term(&p, &batch, 1, &mut seeded(1)).unwrap();
        assert!(m.vh.iter().all(|&x| x == 0.25));
        assert!(m.v.iter().chain(m.h.iter()).all(|&x| x == 0.5));
        // Longer chains end on sampled visible states.
        let m = cd_model_term(&p, &batch, 3, &mut seeded(1)).unwrap();
        assert!(m.h.iter().all(|&x| x == 0.5));
        assert!(m.v.iter().all(|&x| x == 0.0 || x == 0.5 || x == 1.0));
        for ((i, _), &x) in m.vh.indexed_iter() {
            assert_eq!(x, m.v[i] * 0.5);
        }
        let p = RbmParams::zeros(1, 1);
        let one = BinaryVector::ones(1);
        assert_eq!(cd_model_term(&p, &[&one], 1, &mut seeded(1)).unwrap().vh[[0, 0]], 0.25);
    }

    #[test]
    fn cd_validates() {
        let p = RbmParams::zeros(2, 2);
        assert!(cd_model_term(&p, &[], 1, &mut seeded(0)).is_err());
        let r = BinaryVector::ones(2);
        assert!(cd_model_term(&p, &[&r], 0, &mut seeded(0)).is_err());
    }

    #[test]
    fn cd_one_matches_hand_computation() {
        let p = RbmParams::random(2, 2, 1.0, &mut seeded(11));
        let v = BinaryVector::new(vec![1, 0]).unwrap();
        let h = p.hidden_activation_probs(&v).unwrap();
        let v1 = p.visible_probs_of(h.view());
        let h1 = p.hidden_probs_of(v1.view());
        let m = cd_model_term(&p, &[&v], 1, &mut seeded(0)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.vh[[i, j]] - v1[i] * h1[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gibbs_zero_cycles_returns_start() {
        let p = RbmParams::random(4, 3, 1.0, &mut seeded(2));
        let v0 = BinaryVector::new(vec![1, 0, 1, 1]).unwrap();
        let (v, h) = gibbs_chain(&p, &v0, 0, &mut seeded(3)).unwrap();
        assert_eq!(v, v0);
        assert_eq!(h.len(), 3);
        assert!(gibbs_chain(&p, &BinaryVector::zeros(2), 1, &mut seeded(3)).is_err());
    }

    #[test]
    fn sample_means() {
        let ones = (BinaryVector::ones(2), BinaryVector::ones(3));
        let m = model_term_from_samples(std::slice::from_ref(&ones)).unwrap();
        assert!(m.iter().all(|x| x == 1.0));
        let zeros = (BinaryVector::zeros(2), BinaryVector::zeros(3));
        let m = model_term_from_samples(&[ones, zeros]).unwrap();
        assert!(m.iter().all(|x| x == 0.5));
        assert!(matches!(model_term_from_samples(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn emulator_is_seeded() {
        let p = RbmParams::random(3, 2, 1.0, &mut seeded(5));
        let a = annealer_emulator_sample(&p, 1.0, 30, 10, &mut seeded(1)).unwrap();
        let b = annealer_emulator_sample(&p, 1.0, 30, 10, &mut seeded(1)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|(v, h)| v.len() == 3 && h.len() == 2));
        assert!(annealer_emulator_sample(&p, 1.0, 0, 10, &mut seeded(1)).is_err());
        assert!(annealer_emulator_sample(&p, 0.0, 5, 10, &mut seeded(1)).is_err());
    }

    #[test]
    fn sampler_validation() {
        assert!(ModelTermSampler::Cd { k: 0 }.validate().is_err());
        let bad = ModelTermSampler::AnnealerEmulator(EmulatorSettings {
            sweeps: 0,
            ..Default::default()
        });
        assert!(bad.validate().is_err());
        let bad = ModelTermSampler::AnnealerEmulator(EmulatorSettings {
            scale_s: -1.0,
            ..Default::default()
        });
        assert!(bad.validate().is_err());
        assert!(ModelTermSampler::Exact.validate().is_ok());
    }
}
