//! Ising form of an RBM and a classical annealing sampler for it.
//!
//! Spin energies follow the minimisation convention
//! `E(s) = Σ_i h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s_i ∈ {−1, +1}`.

mod chimera;
mod remote;

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::binary::BinaryVector;
use crate::error::{Error, Result};
use crate::rbm::{sigmoid, RbmParams};
use crate::rng;

pub use chimera::{
    build_chimera_embedding, resolve_chains, ChimeraEmbedding, ChimeraGraph, LogicalCoupling, Shore,
    DEFAULT_CHAIN_COUPLING,
};
pub use remote::{AnnealerClient, RemoteAnnealer, SimulatedAnnealerClient, DEFAULT_ANNEAL_TIME_US};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingProblem {
    fields: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
}

impl IsingProblem {
    pub fn new(num_spins: usize) -> Self {
        IsingProblem {
            fields: vec![0.0; num_spins],
            couplings: BTreeMap::new(),
        }
    }

    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    fn check_spin(&self, i: usize) -> Result<()> {
        if i >= self.num_spins() {
            return Err(Error::Config(format!(
                "spin {i} out of range for {} spins",
                self.num_spins()
            )));
        }
        Ok(())
    }

    fn check_value(value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite("Ising coefficient"));
        }
        Ok(())
    }

    pub fn add_field(&mut self, i: usize, value: f64) -> Result<()> {
        self.check_spin(i)?;
        Self::check_value(value)?;
        self.fields[i] += value;
        Ok(())
    }

    /// Adds `value` to `J_ij`; `(i, j)` and `(j, i)` name the same coupling.
    pub fn add_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_spin(i)?;
        self.check_spin(j)?;
        Self::check_value(value)?;
        if i == j {
            return Err(Error::Config(format!("self-coupling on spin {i}")));
        }
        *self.couplings.entry((i.min(j), i.max(j))).or_insert(0.0) += value;
        Ok(())
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    /// Couplings as `(i, j, J_ij)` with `i < j`, in key order.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn num_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        crate::error::check_dim("spin vector", self.num_spins(), spins.len())?;
        if let Some((index, &s)) = spins.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(Error::Domain {
                domain: "bipolar",
                index,
                value: s as i64,
            });
        }
        let linear: f64 = self.fields.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
        let quadratic: f64 = self.couplings().map(|(i, j, v)| v * (spins[i] * spins[j]) as f64).sum();
        Ok(linear + quadratic)
    }

    /// Neighbour lists `(j, J_ij)` for every spin.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_spins()];
        for (i, j, v) in self.couplings() {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        adj
    }
}

/// Maps an RBM onto spins: visible unit `i` becomes spin `i`, hidden unit
/// `j` becomes spin `n_visible + j`.
///
/// With `v = (s + 1) / 2` the binary energy becomes
/// `E(v, h) = −(b′·s + c′·t + sᵀ W′ t) + const`, where
/// `b′_i = b_i/2 + Σ_j W_ij/4`, `c′_j = c_j/2 + Σ_i W_ij/4`, `W′ = W/4`.
/// Fields and couplings are therefore `−b′/S`, `−c′/S`, `−W′/S`, so that
/// `exp(−E_ising(s)) ∝ exp(−E(v, h)/S)` and low RBM energy is low Ising energy.
pub fn rbm_to_ising(params: &RbmParams, scale_s: f64) -> Result<IsingProblem> {
    if !(scale_s > 0.0 && scale_s.is_finite()) {
        return Err(Error::Config(format!("scale S must be positive, got {scale_s}")));
    }
    let (n, m) = (params.n_visible(), params.n_hidden());
    let w = params.weights();
    let mut problem = IsingProblem::new(n + m);
    for i in 0..n {
        let b_prime = params.visible_bias()[i] / 2.0 + w.row(i).sum() / 4.0;
        problem.fields[i] = -b_prime / scale_s;
    }
    for j in 0..m {
        let c_prime = params.hidden_bias()[j] / 2.0 + w.column(j).sum() / 4.0;
        problem.fields[n + j] = -c_prime / scale_s;
    }
    for i in 0..n {
        for j in 0..m {
            let value = -w[[i, j]] / 4.0 / scale_s;
            if value != 0.0 {
                problem.couplings.insert((i, n + j), value);
            }
        }
    }
    Ok(problem)
}

pub fn binary_to_bipolar(bits: &BinaryVector) -> Vec<i8> {
    bits.as_slice().iter().map(|&b| if b == 1 { 1 } else { -1 }).collect()
}

/// Replaces every −1 with 0.
pub fn bipolar_to_binary(spins: &[i8]) -> Result<BinaryVector> {
    spins
        .iter()
        .enumerate()
        .map(|(index, &s)| match s {
            -1 => Ok(0),
            1 => Ok(1),
            other => Err(Error::Domain {
                domain: "bipolar",
                index,
                value: other as i64,
            }),
        })
        .collect::<Result<Vec<u8>>>()
        .map(BinaryVector::from_bits_unchecked)
}

/// Splits a logical spin vector into visible and hidden binary states.
pub fn split_logical(spins: &[i8], n_visible: usize) -> Result<(BinaryVector, BinaryVector)> {
    if spins.len() < n_visible {
        return Err(Error::Dimension {
            what: "logical spin vector",
            expected: n_visible,
            found: spins.len(),
        });
    }
    Ok((
        bipolar_to_binary(&spins[..n_visible])?,
        bipolar_to_binary(&spins[n_visible..])?,
    ))
}

/// Inverse temperatures applied sweep by sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    betas: Vec<f64>,
}

impl AnnealSchedule {
    /// Geometric ramp from temperature `start_ratio` down to 1 over `sweeps`
    /// sweeps. The last sweep always runs at unit temperature.
    pub fn geometric(sweeps: usize, start_ratio: f64) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::Config("at least one sweep is required".into()));
        }
        if !(start_ratio >= 1.0 && start_ratio.is_finite()) {
            return Err(Error::Config(format!("start ratio must be ≥ 1, got {start_ratio}")));
        }
        if sweeps == 1 {
            return Ok(AnnealSchedule { betas: vec![1.0] });
        }
        let log_start = -start_ratio.ln();
        let step = -log_start / (sweeps - 1) as f64;
        let mut betas: Vec<f64> = (0..sweeps).map(|i| (log_start + step * i as f64).exp()).collect();
        *betas.last_mut().expect("sweeps ≥ 2") = 1.0;
        Ok(AnnealSchedule { betas })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// Temperature ratio at the start of the emulator's ramp.
pub const DEFAULT_START_RATIO: f64 = 10.0;

/// Compressed neighbour lists: spin `i` couples to `idx[start[i]..start[i + 1]]`.
struct Csr {
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn new(problem: &IsingProblem) -> Self {
        let adjacency = problem.adjacency();
        let mut csr = Csr {
            start: Vec::with_capacity(adjacency.len() + 1),
            idx: Vec::new(),
            val: Vec::new(),
        };
        csr.start.push(0);
        for row in adjacency {
            for (j, v) in row {
                csr.idx.push(j);
                csr.val.push(v);
            }
            csr.start.push(csr.idx.len());
        }
        csr
    }
}

fn anneal_one(csr: &Csr, fields: &[f64], betas: &[f64], seed: u64, read: u64) -> Vec<i8> {
    let mut rng = rng::derive(seed, read);
    let mut spins: Vec<f64> = (0..fields.len())
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    for &beta in betas {
        for i in 0..spins.len() {
            let (lo, hi) = (csr.start[i], csr.start[i + 1]);
            let local = fields[i]
                + csr.idx[lo..hi]
                    .iter()
                    .zip(&csr.val[lo..hi])
                    .map(|(&j, &v)| v * spins[j])
                    .sum::<f64>();
            // Heat bath: P(s_i = +1) ∝ exp(−β local), P(−1) ∝ exp(β local).
            let p_up = sigmoid(-2.0 * beta * local);
            spins[i] = if rng.random::<f64>() < p_up { 1.0 } else { -1.0 };
        }
    }
    spins.into_iter().map(|s| s as i8).collect()
}

/// Runs `num_reads` independent annealing reads with heat-bath sweeps in
/// spin-index order. Read `r` uses its own generator derived from one draw
/// of `rng`, and results are returned in read order regardless of threading.
pub fn anneal<R: Rng + ?Sized>(
    problem: &IsingProblem,
    schedule: &AnnealSchedule,
    num_reads: usize,
    rng: &mut R,
) -> Vec<Vec<i8>> {
    let seed = rng::fork(rng);
    let csr = Csr::new(problem);
    (0..num_reads as u64)
        .into_par_iter()
        .map(|read| anneal_one(&csr, &problem.fields, schedule.betas(), seed, read))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_params_give_empty_problem() {
        let p = rbm_to_ising(&RbmParams::zeros(3, 2), 1.0).unwrap();
        assert_eq!(p.num_spins(), 5);
        assert!(p.fields().iter().all(|&h| h == 0.0));
        assert_eq!(p.num_couplings(), 0);
    }

    #[test]
    fn single_visible_bias() {
        let params = RbmParams::from_parts(array![[0.0]], array![2.0], array![0.0]).unwrap();
        let p = rbm_to_ising(&params, 1.0).unwrap();
        // b′ = 2/2 + 0/4 = 1; the field carries the opposite sign.
        assert_eq!(p.field(0), -1.0);
        assert_eq!(p.field(1), 0.0);
        let p = rbm_to_ising(&params, 4.0).unwrap();
        assert_eq!(p.field(0), -0.25);
    }

    #[test]
    fn reduced_biases_use_row_and_column_sums() {
        let params =
            RbmParams::from_parts(array![[1.0, 2.0], [3.0, 4.0]], array![0.5, -0.5], array![1.0, 0.0]).unwrap();
        let p = rbm_to_ising(&params, 1.0).unwrap();
        assert_eq!(p.field(0), -(0.25 + 3.0 / 4.0));
        assert_eq!(p.field(1), -(-0.25 + 7.0 / 4.0));
        assert_eq!(p.field(2), -(0.5 + 4.0 / 4.0));
        assert_eq!(p.field(3), -(0.0 + 6.0 / 4.0));
        assert_eq!(p.coupling(1, 3), -1.0);
        assert_eq!(p.coupling(3, 1), -1.0);
        assert_eq!(p.coupling(0, 1), 0.0);
    }

    #[test]
    fn rejects_bad_scale() {
        let params = RbmParams::zeros(1, 1);
        assert!(rbm_to_ising(&params, 0.0).is_err());
        assert!(rbm_to_ising(&params, -1.0).is_err());
    }

    #[test]
    fn bipolar_conversion() {
        assert_eq!(bipolar_to_binary(&[-1, -1]).unwrap().as_slice(), &[0, 0]);
        assert_eq!(bipolar_to_binary(&[1, -1, 1]).unwrap().as_slice(), &[1, 0, 1]);
        assert!(matches!(
            bipolar_to_binary(&[1, 0]),
            Err(Error::Domain { index: 1, .. })
        ));
        for i in 0..16 {
            let b = BinaryVector::from_index(i, 4);
            assert_eq!(bipolar_to_binary(&binary_to_bipolar(&b)).unwrap(), b);
        }
    }

    #[test]
    fn problem_validation() {
        let mut p = IsingProblem::new(3);
        assert!(p.add_coupling(1, 1, 0.5).is_err());
        assert!(p.add_coupling(0, 3, 0.5).is_err());
        assert!(p.add_field(0, f64::NAN).is_err());
        p.add_coupling(2, 0, 0.5).unwrap();
        assert_eq!(p.couplings().collect::<Vec<_>>(), vec![(0, 2, 0.5)]);
        assert_eq!(p.energy(&[1, 1, -1]).unwrap(), -0.5);
        assert!(p.energy(&[1, 0, 1]).is_err());
    }

    #[test]
    fn schedule_shape() {
        let s = AnnealSchedule::geometric(50, 10.0).unwrap();
        assert_eq!(s.betas().len(), 50);
        assert!((s.betas()[0] - 0.1).abs() < 1e-12);
        assert_eq!(*s.betas().last().unwrap(), 1.0);
        assert!(s.betas().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(AnnealSchedule::geometric(1, 10.0).unwrap().betas(), &[1.0]);
        assert!(AnnealSchedule::geometric(0, 10.0).is_err());
    }

    #[test]
    fn anneal_is_seed_deterministic() {
        let params = RbmParams::random(3, 3, 1.0, &mut rng::seeded(4));
        let problem = rbm_to_ising(&params, 1.0).unwrap();
        let schedule = AnnealSchedule::geometric(10, 10.0).unwrap();
        let a = anneal(&problem, &schedule, 50, &mut rng::seeded(9));
        let b = anneal(&problem, &schedule, 50, &mut rng::seeded(9));
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.len() == 6 && s.iter().all(|&x| x == 1 || x == -1)));
    }
}
