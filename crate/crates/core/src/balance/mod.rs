//! Dataset balancing: ensembles over undersampled partitions combined by
//! majority vote, and oversampling with records generated by a trained RBM.

mod report;
mod scheme;

use rand::Rng;
use rayon::prelude::*;

use crate::binary::BinaryVector;
use crate::data::{ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::rbm::RbmParams;
use crate::rng;
use crate::sampler::{annealer_emulator_sample, gibbs_chain};

pub use report::{Scheme1Report, Scheme1Row, Scheme2Report, Scheme2Row};
pub use scheme::{run_scheme1, run_scheme2, GenerationSummary, GenerationVariant, Scheme1Settings, Scheme2Settings};

/// Per-record plurality over the models' predictions. Indeterminate votes
/// count like any other label; a tie for first place is indeterminate.
pub fn majority_vote(predictions: &[Vec<ClassLabel>]) -> Result<Vec<ClassLabel>> {
    let Some(first) = predictions.first() else {
        return Err(Error::Empty("prediction sets"));
    };
    let n = first.len();
    for p in predictions {
        if p.len() != n {
            return Err(Error::Dimension {
                what: "prediction list",
                expected: n,
                found: p.len(),
            });
        }
    }
    Ok((0..n)
        .map(|i| {
            let mut votes = [0usize; 3];
            for p in predictions {
                votes[p[i] as usize] += 1;
            }
            let top = *votes.iter().max().expect("three labels");
            let mut winners = (0..3).filter(|&c| votes[c] == top);
            match (winners.next(), winners.next()) {
                (Some(c), None) => [ClassLabel::Benign, ClassLabel::Attack, ClassLabel::Indeterminate][c],
                _ => ClassLabel::Indeterminate,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenerationMethod {
    /// Independent chains from uniform random bits, `cycles` Gibbs cycles each.
    Gibbs { cycles: usize },
    /// One emulated annealer read per record.
    Annealer { scale_s: f64, sweeps: usize },
}

pub const DEFAULT_GIBBS_CYCLES: usize = 50;

impl GenerationMethod {
    pub fn gibbs() -> Self {
        GenerationMethod::Gibbs {
            cycles: DEFAULT_GIBBS_CYCLES,
        }
    }
}

/// Samples `count` visible vectors from the model.
pub fn generate_synthetic<R: Rng + ?Sized>(
    params: &RbmParams,
    method: GenerationMethod,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BinaryVector>> {
    if count == 0 {
        return Err(Error::Config("synthetic record count must be at least 1".into()));
    }
    match method {
        GenerationMethod::Gibbs { cycles } => {
            let seed = rng::fork(rng);
            let n = params.n_visible();
            (0..count as u64)
                .into_par_iter()
                .map(|chain| {
                    let mut rng = rng::derive(seed, chain);
                    let start: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
                    let start = BinaryVector::from_bits_unchecked(start);
                    gibbs_chain(params, &start, cycles, &mut rng).map(|(v, _)| v)
                })
                .collect()
        }
        GenerationMethod::Annealer { scale_s, sweeps } => {
            Ok(annealer_emulator_sample(params, scale_s, count, sweeps, rng)?
                .into_iter()
                .map(|(v, _)| v)
                .collect())
        }
    }
}

#[derive(Debug, Clone)]
pub struct BalanceOutcome {
    pub dataset: Dataset,
    pub appended: usize,
    /// Synthetic records labelled as the majority class.
    pub discarded_majority: usize,
    pub discarded_indeterminate: usize,
    /// Records still missing when the filtered pool ran out.
    pub shortfall: usize,
}

/// Appends synthetic records whose own label bits decode to `minority`
/// until both classes have equal counts.
pub fn balance_with_synthetic(
    train: &Dataset,
    synthetic: &[BinaryVector],
    minority: ClassLabel,
) -> Result<BalanceOutcome> {
    if minority == ClassLabel::Indeterminate {
        return Err(Error::Config("the minority class must be benign or attack".into()));
    }
    let counts = train.counts();
    let needed = counts.get(minority.opposite()).saturating_sub(counts.get(minority));
    let mut dataset = train.clone();
    let (mut appended, mut discarded_majority, mut discarded_indeterminate) = (0, 0, 0);
    for record in synthetic {
        if record.len() != train.width() {
            return Err(Error::Dimension {
                what: "synthetic record width",
                expected: train.width(),
                found: record.len(),
            });
        }
        let label = crate::data::decode_label(record)?;
        if label == ClassLabel::Indeterminate {
            discarded_indeterminate += 1;
        } else if label != minority {
            discarded_majority += 1;
        } else if appended < needed {
            dataset.push(record.clone())?;
            appended += 1;
        }
    }
    Ok(BalanceOutcome {
        dataset,
        appended,
        discarded_majority,
        discarded_indeterminate,
        shortfall: needed - appended,
    })
}
