//! Synthetic datasets bundled with the crate.
//!
//! [`bars_and_stripes`] is the classic generative-model benchmark.
//! [`imbalanced_fixture`] builds a labelled 64-bit dataset in the same spirit
//! for the balancing pipelines: benign records are noisy horizontal bars,
//! attack records noisy vertical stripes, and a share of both classes comes
//! from a common sparse background so the classes overlap.

use std::collections::HashSet;

use rand::Rng;

use crate::binary::BinaryVector;
use crate::data::{ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::rng;

/// All distinct `side × side` bar and stripe images, row-major. The blank
/// and full images appear once each.
pub fn bars_and_stripes(side: usize) -> Vec<BinaryVector> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0..1u64 << side {
        for horizontal in [true, false] {
            let bits: Vec<u8> = (0..side * side)
                .map(|cell| {
                    let line = if horizontal { cell / side } else { cell % side };
                    ((mask >> line) & 1) as u8
                })
                .collect();
            let v = BinaryVector::from_bits_unchecked(bits);
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    out
}

pub fn is_bars_and_stripes(v: &BinaryVector, side: usize) -> bool {
    if v.len() != side * side {
        return false;
    }
    let bit = |r: usize, c: usize| v[r * side + c];
    let rows_uniform = (0..side).all(|r| (0..side).all(|c| bit(r, c) == bit(r, 0)));
    let cols_uniform = (0..side).all(|c| (0..side).all(|r| bit(r, c) == bit(0, c)));
    rows_uniform || cols_uniform
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureConfig {
    /// Total unique records.
    pub records: usize,
    /// Share of attack records.
    pub minority_fraction: f64,
    /// Probability that a record is drawn from the shared background.
    pub overlap: f64,
    /// Per-bit flip probability applied to every pattern.
    pub noise: f64,
    pub seed: u64,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            records: 3000,
            minority_fraction: 0.141,
            overlap: 0.25,
            noise: 0.05,
            seed: 2012,
        }
    }
}

/// 8 × 8 grid with the last two cells replaced by the label code.
const SIDE: usize = 8;
pub const FIXTURE_FEATURES: usize = SIDE * SIDE - 2;

fn pattern<R: Rng>(label: ClassLabel, cfg: &FixtureConfig, rng: &mut R) -> Vec<u8> {
    let mut bits = vec![0u8; FIXTURE_FEATURES];
    if rng.random_bool(cfg.overlap) {
        for b in bits.iter_mut() {
            *b = rng.random_bool(0.3) as u8;
        }
    } else {
        let (p_on, horizontal) = match label {
            ClassLabel::Benign => (0.35, true),
            _ => (0.5, false),
        };
        let lines: Vec<bool> = (0..SIDE).map(|_| rng.random_bool(p_on)).collect();
        for (cell, b) in bits.iter_mut().enumerate() {
            let line = if horizontal { cell / SIDE } else { cell % SIDE };
            *b = lines[line] as u8;
        }
    }
    for b in bits.iter_mut() {
        if rng.random_bool(cfg.noise) {
            *b ^= 1;
        }
    }
    bits
}

/// Unique labelled records, classes interleaved in random order.
pub fn imbalanced_fixture(cfg: &FixtureConfig) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&cfg.minority_fraction)
        || !(0.0..=1.0).contains(&cfg.overlap)
        || !(0.0..=0.5).contains(&cfg.noise)
    {
        return Err(Error::Config("fixture probabilities out of range".into()));
    }
    let attack = (cfg.records as f64 * cfg.minority_fraction).round() as usize;
    let benign = cfg.records - attack;
    let mut rng = rng::seeded(cfg.seed);
    let mut seen = HashSet::new();
    let mut remaining = [benign, attack];
    let mut records = Vec::with_capacity(cfg.records);
    let mut attempts = 0usize;
    while remaining[0] + remaining[1] > 0 {
        attempts += 1;
        if attempts > 100 * cfg.records.max(1) {
            return Err(Error::Config(
                "fixture settings do not yield enough unique records".into(),
            ));
        }
        let pick = rng.random_range(0..remaining[0] + remaining[1]);
        let label = if pick < remaining[0] {
            ClassLabel::Benign
        } else {
            ClassLabel::Attack
        };
        let mut bits = pattern(label, cfg, &mut rng);
        bits.extend_from_slice(&label.code().expect("real class"));
        let v = BinaryVector::from_bits_unchecked(bits);
        if seen.insert(v.clone()) {
            remaining[(label == ClassLabel::Attack) as usize] -= 1;
            records.push(v);
        }
    }
    Dataset::new(SIDE * SIDE, records)
}
