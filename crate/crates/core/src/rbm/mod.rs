//! The restricted Boltzmann machine: parameters, energy, conditionals and
//! the shared training loop.
//!
//! Energy convention: `E(v, h) = -b·v - c·h - vᵀ W h` with `W` stored as an
//! `n_visible × n_hidden` matrix.

mod exact;
mod persist;
mod train;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::binary::BinaryVector;
use crate::error::{check_dim, Error, Result};

pub use exact::{exact_model_expectations, log_likelihood_exact, log_partition, ENUMERATION_LIMIT};
pub use persist::{load_model, read_model, save_model, write_model, MODEL_HEADER};
pub use train::{reconstruction_error, train, EarlyStop, EpochLog, TrainConfig, TrainOutcome};

/// Logistic function, evaluated without overflow for any finite input.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbmParams {
    weights: Array2<f64>,
    visible_bias: Array1<f64>,
    hidden_bias: Array1<f64>,
}

impl RbmParams {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        RbmParams {
            weights: Array2::zeros((n_visible, n_hidden)),
            visible_bias: Array1::zeros(n_visible),
            hidden_bias: Array1::zeros(n_hidden),
        }
    }

    /// Builds parameters from explicit arrays, checking shapes and finiteness.
    pub fn from_parts(weights: Array2<f64>, visible_bias: Array1<f64>, hidden_bias: Array1<f64>) -> Result<Self> {
        let (n, m) = weights.dim();
        if n == 0 || m == 0 {
            return Err(Error::Empty("layer"));
        }
        check_dim("visible bias", n, visible_bias.len())?;
        check_dim("hidden bias", m, hidden_bias.len())?;
        let params = RbmParams {
            weights,
            visible_bias,
            hidden_bias,
        };
        if !params.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(params)
    }

    /// Weights drawn i.i.d. from N(0, std²); biases zero.
    pub fn random<R: Rng + ?Sized>(n_visible: usize, n_hidden: usize, std: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, std).expect("standard deviation must be finite and non-negative");
        let weights = Array2::from_shape_simple_fn((n_visible, n_hidden), || normal.sample(rng));
        RbmParams {
            weights,
            visible_bias: Array1::zeros(n_visible),
            hidden_bias: Array1::zeros(n_hidden),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.visible_bias.len()
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_bias.len()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn visible_bias(&self) -> &Array1<f64> {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &Array1<f64> {
        &self.hidden_bias
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|x| x.is_finite())
            && self.visible_bias.iter().all(|x| x.is_finite())
            && self.hidden_bias.iter().all(|x| x.is_finite())
    }

    pub fn energy(&self, v: &BinaryVector, h: &BinaryVector) -> Result<f64> {
        check_dim("visible vector", self.n_visible(), v.len())?;
        check_dim("hidden vector", self.n_hidden(), h.len())?;
        let v = v.to_f64();
        let h = h.to_f64();
        Ok(-self.visible_bias.dot(&v) - self.hidden_bias.dot(&h) - v.dot(&self.weights).dot(&h))
    }

    /// `P(h_j = 1 | v)` for every hidden unit.
    pub fn hidden_activation_probs(&self, v: &BinaryVector) -> Result<Array1<f64>> {
        check_dim("visible vector", self.n_visible(), v.len())?;
        Ok(self.hidden_probs_of(v.to_f64().view()))
    }

    /// `P(v_i = 1 | h)` for every visible unit.
    pub fn visible_activation_probs(&self, h: &BinaryVector) -> Result<Array1<f64>> {
        check_dim("hidden vector", self.n_hidden(), h.len())?;
        Ok(self.visible_probs_of(h.to_f64().view()))
    }

    /// `F(v) = -log Σ_h exp(-E(v, h))`, in closed form.
    pub fn free_energy(&self, v: &BinaryVector) -> Result<f64> {
        check_dim("visible vector", self.n_visible(), v.len())?;
        Ok(self.free_energy_of(v.to_f64().view()))
    }

    pub(crate) fn hidden_input(&self, v: ArrayView1<f64>) -> Array1<f64> {
        &self.hidden_bias + &v.dot(&self.weights)
    }

    pub(crate) fn visible_input(&self, h: ArrayView1<f64>) -> Array1<f64> {
        &self.visible_bias + &self.weights.dot(&h)
    }

    pub(crate) fn hidden_probs_of(&self, v: ArrayView1<f64>) -> Array1<f64> {
        self.hidden_input(v).mapv_into(sigmoid)
    }

    pub(crate) fn visible_probs_of(&self, h: ArrayView1<f64>) -> Array1<f64> {
        self.visible_input(h).mapv_into(sigmoid)
    }

    /// Row-wise `σ(c + V W)` for a batch matrix `V` (records × n_visible).
    pub(crate) fn hidden_probs_batch(&self, v: &Array2<f64>) -> Array2<f64> {
        (v.dot(&self.weights) + &self.hidden_bias).mapv_into(sigmoid)
    }

    /// Row-wise `σ(b + H Wᵀ)` for a batch matrix `H` (records × n_hidden).
    pub(crate) fn visible_probs_batch(&self, h: &Array2<f64>) -> Array2<f64> {
        (h.dot(&self.weights.t()) + &self.visible_bias).mapv_into(sigmoid)
    }

    pub(crate) fn free_energy_of(&self, v: ArrayView1<f64>) -> f64 {
        -self.visible_bias.dot(&v) - self.hidden_input(v).iter().map(|&x| softplus(x)).sum::<f64>()
    }

    /// Free energy of a hidden configuration with the visible layer summed out.
    pub(crate) fn hidden_free_energy_of(&self, h: ArrayView1<f64>) -> f64 {
        -self.hidden_bias.dot(&h) - self.visible_input(h).iter().map(|&x| softplus(x)).sum::<f64>()
    }

    /// Returns `self + learning_rate · grad`.
    pub fn apply_update(&self, grad: &Gradient, learning_rate: f64) -> Result<RbmParams> {
        let mut next = self.clone();
        next.apply_update_in_place(grad, learning_rate)?;
        Ok(next)
    }

    pub(crate) fn apply_update_in_place(&mut self, grad: &Gradient, learning_rate: f64) -> Result<()> {
        check_dim("weight gradient rows", self.n_visible(), grad.weights.nrows())?;
        check_dim("weight gradient columns", self.n_hidden(), grad.weights.ncols())?;
        check_dim("visible bias gradient", self.n_visible(), grad.visible_bias.len())?;
        check_dim("hidden bias gradient", self.n_hidden(), grad.hidden_bias.len())?;
        if !grad.is_finite() {
            return Err(Error::Divergence("gradient"));
        }
        self.weights.scaled_add(learning_rate, &grad.weights);
        self.visible_bias.scaled_add(learning_rate, &grad.visible_bias);
        self.hidden_bias.scaled_add(learning_rate, &grad.hidden_bias);
        if !self.is_finite() {
            return Err(Error::Divergence("parameters"));
        }
        Ok(())
    }
}

/// First and second moments of a (possibly estimated) joint distribution
/// over visible and hidden units: `⟨v_i h_j⟩`, `⟨v_i⟩`, `⟨h_j⟩`.
///
/// Serves both as the data-dependent term of the likelihood gradient and as
/// the model-dependent term estimated by a sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub vh: Array2<f64>,
    pub v: Array1<f64>,
    pub h: Array1<f64>,
}

/// Estimate of the model expectation term.
pub type ModelTermEstimate = Moments;

impl Moments {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        Moments {
            vh: Array2::zeros((n_visible, n_hidden)),
            v: Array1::zeros(n_visible),
            h: Array1::zeros(n_hidden),
        }
    }

    /// Averages over the rows of paired visible/hidden matrices.
    pub(crate) fn from_rows(v: &Array2<f64>, h: &Array2<f64>) -> Self {
        let m = v.nrows() as f64;
        Moments {
            vh: v.t().dot(h) / m,
            v: v.mean_axis(Axis(0)).expect("non-empty batch"),
            h: h.mean_axis(Axis(0)).expect("non-empty batch"),
        }
    }

    /// `self − model`, the ascent direction of the log-likelihood.
    pub fn minus(&self, model: &Moments) -> Gradient {
        Gradient {
            weights: &self.vh - &model.vh,
            visible_bias: &self.v - &model.v,
            hidden_bias: &self.h - &model.h,
        }
    }

    pub fn max_abs_diff(&self, other: &Moments) -> f64 {
        self.vh
            .iter()
            .zip(other.vh.iter())
            .chain(self.v.iter().zip(other.v.iter()))
            .chain(self.h.iter().zip(other.h.iter()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.vh.iter().chain(self.v.iter()).chain(self.h.iter()).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

impl Gradient {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        Gradient {
            weights: Array2::zeros((n_visible, n_hidden)),
            visible_bias: Array1::zeros(n_visible),
            hidden_bias: Array1::zeros(n_hidden),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|x| x.is_finite())
            && self.visible_bias.iter().all(|x| x.is_finite())
            && self.hidden_bias.iter().all(|x| x.is_finite())
    }
}

/// Stacks records into a `records × width` matrix of 0.0/1.0.
pub(crate) fn batch_matrix(batch: &[&BinaryVector], width: usize) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((batch.len(), width));
    for (mut row, record) in out.rows_mut().into_iter().zip(batch) {
        check_dim("record width", width, record.len())?;
        for (dst, &bit) in row.iter_mut().zip(record.as_slice()) {
            *dst = bit as f64;
        }
    }
    Ok(out)
}

/// Data-dependent gradient term: means of `v ⊗ P(h|v)`, `v` and `P(h|v)`
/// over the batch. Hidden units enter as probabilities, not samples.
pub fn gradient_data_term(params: &RbmParams, batch: &[&BinaryVector]) -> Result<Moments> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let v = batch_matrix(batch, params.n_visible())?;
    let h = params.hidden_probs_batch(&v);
    Ok(Moments::from_rows(&v, &h))
}
