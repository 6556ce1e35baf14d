//! Contract for hardware annealers reached over some transport.
//!
//! A client receives a problem already placed on physical qubits and returns
//! one bipolar vector per read. Transport, authentication and queuing belong
//! to the implementation.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;

use super::{anneal, rbm_to_ising, resolve_chains, AnnealSchedule, ChimeraEmbedding, ChimeraGraph, IsingProblem};
use crate::binary::BinaryVector;
use crate::error::{Error, Result};
use crate::rbm::RbmParams;

/// Anneal time per read, in microseconds.
pub const DEFAULT_ANNEAL_TIME_US: f64 = 20.0;

pub trait AnnealerClient: Send + Sync {
    /// Returns `num_reads` bipolar samples, each covering every qubit of the
    /// problem.
    fn submit(&self, problem: &IsingProblem, num_reads: usize, anneal_time_us: f64) -> Result<Vec<Vec<i8>>>;
}

/// Model-term source backed by an [`AnnealerClient`]: maps the RBM to Ising
/// form, embeds it on the hardware graph, submits, and repairs chains.
#[derive(Clone)]
pub struct RemoteAnnealer {
    pub client: Arc<dyn AnnealerClient>,
    pub graph: ChimeraGraph,
    pub embedding: ChimeraEmbedding,
    pub scale_s: f64,
    pub num_reads: Option<usize>,
    pub anneal_time_us: f64,
}

impl fmt::Debug for RemoteAnnealer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteAnnealer")
            .field("graph_size", &self.graph.size())
            .field("n_visible", &self.embedding.n_visible())
            .field("n_hidden", &self.embedding.n_hidden())
            .field("scale_s", &self.scale_s)
            .field("num_reads", &self.num_reads)
            .field("anneal_time_us", &self.anneal_time_us)
            .finish()
    }
}

impl RemoteAnnealer {
    pub fn sample<R: Rng + ?Sized>(
        &self,
        params: &RbmParams,
        num_reads: usize,
        rng: &mut R,
    ) -> Result<Vec<(BinaryVector, BinaryVector)>> {
        if params.n_visible() != self.embedding.n_visible() || params.n_hidden() != self.embedding.n_hidden() {
            return Err(Error::Config(format!(
                "embedding is {}×{} but the model is {}×{}",
                self.embedding.n_visible(),
                self.embedding.n_hidden(),
                params.n_visible(),
                params.n_hidden()
            )));
        }
        let logical = rbm_to_ising(params, self.scale_s)?;
        let physical = self.embedding.embed_problem(&logical, &self.graph)?;
        let raw = self.client.submit(&physical, num_reads, self.anneal_time_us)?;
        if raw.len() != num_reads {
            return Err(Error::Remote(format!(
                "requested {num_reads} reads, received {}",
                raw.len()
            )));
        }
        raw.iter()
            .map(|sample| resolve_chains(sample, &self.embedding, rng))
            .collect()
    }
}

/// In-process stand-in for hardware: anneals the physical problem with the
/// classical emulator. Each submission draws from its own stream of `seed`.
#[derive(Debug)]
pub struct SimulatedAnnealerClient {
    seed: u64,
    sweeps: usize,
    calls: AtomicU64,
}

impl SimulatedAnnealerClient {
    pub fn new(seed: u64, sweeps: usize) -> Self {
        SimulatedAnnealerClient {
            seed,
            sweeps,
            calls: AtomicU64::new(0),
        }
    }
}

impl AnnealerClient for SimulatedAnnealerClient {
    fn submit(&self, problem: &IsingProblem, num_reads: usize, _anneal_time_us: f64) -> Result<Vec<Vec<i8>>> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        let schedule = AnnealSchedule::geometric(self.sweeps, super::DEFAULT_START_RATIO)?;
        let mut rng = crate::rng::derive(self.seed, call);
        Ok(anneal(problem, &schedule, num_reads, &mut rng))
    }
}
