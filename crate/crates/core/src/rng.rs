//! Seed handling.
//!
//! Every random decision in the crate flows from a single `u64` master seed.
//! Independent consumers (annealing reads, synthetic chains, ensemble parts)
//! get their own generator through [`derive`], which seeds ChaCha8 with the
//! master seed and selects a distinct stream. Results therefore do not depend
//! on how work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for stream `stream` of the master seed.
pub fn derive(master: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Draws a fresh master seed for a batch of independent sub-streams.
pub fn fork<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.random()
}
