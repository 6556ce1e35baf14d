use std::fmt;
use std::ops::Index;

use ndarray::Array1;

use crate::error::{Error, Result};

/// Fixed-length vector over {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::Domain {
                domain: "binary",
                index,
                value: value as i64,
            });
        }
        Ok(BinaryVector(bits))
    }

    pub fn zeros(len: usize) -> Self {
        BinaryVector(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        BinaryVector(vec![1; len])
    }

    /// Bits of `index` in little-endian order, `len` of them.
    pub fn from_index(index: u64, len: usize) -> Self {
        BinaryVector((0..len).map(|i| ((index >> i) & 1) as u8).collect())
    }

    /// Inverse of [`BinaryVector::from_index`].
    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BinaryVector(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn to_f64(&self) -> Array1<f64> {
        self.0.iter().map(|&b| b as f64).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn hamming(&self, other: &BinaryVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Concatenation of `self` followed by `tail`.
    pub fn concat(&self, tail: &[u8]) -> Result<Self> {
        let mut bits = self.0.clone();
        bits.extend_from_slice(tail);
        BinaryVector::new(bits)
    }
}

impl Index<usize> for BinaryVector {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for BinaryVector {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        BinaryVector::new(bits)
    }
}
