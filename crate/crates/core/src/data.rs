//! Binarized datasets with a two-bit class code in the final two columns.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::binary::BinaryVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Benign,
    Attack,
    Indeterminate,
}

impl ClassLabel {
    /// Trailing bits for the two real classes: benign `01`, attack `10`.
    pub fn code(self) -> Option<[u8; 2]> {
        match self {
            ClassLabel::Benign => Some([0, 1]),
            ClassLabel::Attack => Some([1, 0]),
            ClassLabel::Indeterminate => None,
        }
    }

    pub fn from_code(first: u8, second: u8) -> ClassLabel {
        match (first, second) {
            (0, 1) => ClassLabel::Benign,
            (1, 0) => ClassLabel::Attack,
            _ => ClassLabel::Indeterminate,
        }
    }

    /// The other real class; indeterminate maps to itself.
    pub fn opposite(self) -> ClassLabel {
        match self {
            ClassLabel::Benign => ClassLabel::Attack,
            ClassLabel::Attack => ClassLabel::Benign,
            ClassLabel::Indeterminate => ClassLabel::Indeterminate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Benign => "benign",
            ClassLabel::Attack => "attack",
            ClassLabel::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "benign" => Ok(ClassLabel::Benign),
            "attack" => Ok(ClassLabel::Attack),
            "indeterminate" => Ok(ClassLabel::Indeterminate),
            other => Err(Error::Config(format!("unknown class `{other}`"))),
        }
    }
}

pub fn decode_label(record: &BinaryVector) -> Result<ClassLabel> {
    let n = record.len();
    if n < 2 {
        return Err(Error::Dimension {
            what: "labelled record",
            expected: 2,
            found: n,
        });
    }
    Ok(ClassLabel::from_code(record[n - 2], record[n - 1]))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub benign: usize,
    pub attack: usize,
    pub indeterminate: usize,
}

impl ClassCounts {
    pub fn get(&self, label: ClassLabel) -> usize {
        match label {
            ClassLabel::Benign => self.benign,
            ClassLabel::Attack => self.attack,
            ClassLabel::Indeterminate => self.indeterminate,
        }
    }

    /// The larger of the two real classes (benign on a tie).
    pub fn majority(&self) -> ClassLabel {
        if self.attack > self.benign {
            ClassLabel::Attack
        } else {
            ClassLabel::Benign
        }
    }
}

/// Records of uniform width; the last two bits of each are its class code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    width: usize,
    records: Vec<BinaryVector>,
}

pub const MIN_WIDTH: usize = 3;

impl Dataset {
    pub fn new(width: usize, records: Vec<BinaryVector>) -> Result<Self> {
        if width < MIN_WIDTH {
            return Err(Error::Config(format!(
                "records need at least {MIN_WIDTH} bits (features plus a two-bit label), got {width}"
            )));
        }
        for (i, r) in records.iter().enumerate() {
            if r.len() != width {
                return Err(Error::Ragged {
                    line: i + 1,
                    expected: width,
                    found: r.len(),
                });
            }
        }
        Ok(Dataset { width, records })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn feature_width(&self) -> usize {
        self.width - 2
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[BinaryVector] {
        &self.records
    }

    pub fn into_records(self) -> Vec<BinaryVector> {
        self.records
    }

    pub fn label(&self, i: usize) -> ClassLabel {
        let r = &self.records[i];
        ClassLabel::from_code(r[self.width - 2], r[self.width - 1])
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn features(&self, i: usize) -> &[u8] {
        &self.records[i].as_slice()[..self.width - 2]
    }

    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for i in 0..self.len() {
            match self.label(i) {
                ClassLabel::Benign => c.benign += 1,
                ClassLabel::Attack => c.attack += 1,
                ClassLabel::Indeterminate => c.indeterminate += 1,
            }
        }
        c
    }

    pub fn of_class(&self, label: ClassLabel) -> Vec<&BinaryVector> {
        (0..self.len())
            .filter(|&i| self.label(i) == label)
            .map(|i| &self.records[i])
            .collect()
    }

    pub fn push(&mut self, record: BinaryVector) -> Result<()> {
        if record.len() != self.width {
            return Err(Error::Dimension {
                what: "record width",
                expected: self.width,
                found: record.len(),
            });
        }
        self.records.push(record);
        Ok(())
    }

    /// One comma-separated line per record.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * self.width * 2);
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Parses comma-separated 0/1 text, one record per line. Blank lines are
/// ignored; with `skip_header` the first non-blank line is dropped.
pub fn parse_binary_table(text: &str, skip_header: bool) -> Result<Dataset> {
    let mut width = None;
    let mut records = Vec::new();
    let mut skipped = !skip_header;
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !skipped {
            skipped = true;
            continue;
        }
        let bits = line
            .split(',')
            .enumerate()
            .map(|(col, tok)| match tok.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(Error::Parse {
                    line: line_no,
                    column: col + 1,
                    message: format!("`{other}` is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        let expected = *width.get_or_insert(bits.len());
        if bits.len() != expected {
            return Err(Error::Ragged {
                line: line_no,
                expected,
                found: bits.len(),
            });
        }
        records.push(BinaryVector::from_bits_unchecked(bits));
    }
    let Some(width) = width else {
        return Err(Error::Empty("data file"));
    };
    Dataset::new(width, records)
}

pub fn load_binary_table(path: impl AsRef<Path>, skip_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_binary_table(&text, skip_header)
}

/// Keeps the first occurrence of every record; returns the number removed.
pub fn dedupe(ds: &Dataset) -> (Dataset, usize) {
    let mut seen = std::collections::HashSet::with_capacity(ds.len());
    let records: Vec<BinaryVector> = ds.records.iter().filter(|r| seen.insert(*r)).cloned().collect();
    let removed = ds.len() - records.len();
    (
        Dataset {
            width: ds.width,
            records,
        },
        removed,
    )
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Indeterminate-labelled input rows left out of both sides.
    pub excluded_indeterminate: usize,
}

/// Stratified draw of `test_benign` benign and `test_attack` attack records
/// into the test set; everything else with a real label is training data.
/// Both sides keep the input order.
pub fn split_train_test<R: Rng + ?Sized>(
    ds: &Dataset,
    test_benign: usize,
    test_attack: usize,
    rng: &mut R,
) -> Result<Split> {
    let mut in_test = vec![false; ds.len()];
    for (class, requested) in [(ClassLabel::Benign, test_benign), (ClassLabel::Attack, test_attack)] {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == class).collect();
        if idx.len() < requested {
            return Err(Error::Insufficient {
                class,
                requested,
                available: idx.len(),
            });
        }
        let (chosen, _) = idx.partial_shuffle(rng, requested);
        for &i in chosen.iter() {
            in_test[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut excluded = 0;
    for (i, r) in ds.records.iter().enumerate() {
        if ds.label(i) == ClassLabel::Indeterminate {
            excluded += 1;
        } else if in_test[i] {
            test.push(r.clone());
        } else {
            train.push(r.clone());
        }
    }
    Ok(Split {
        train: Dataset {
            width: ds.width,
            records: train,
        },
        test: Dataset {
            width: ds.width,
            records: test,
        },
        excluded_indeterminate: excluded,
    })
}

/// Name of the `i`-th sub-dataset: A, B, …, Z, then P27, P28, ….
pub fn part_name(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("P{}", i + 1)
    }
}

/// Undersamples the majority class into `n_parts` balanced sub-datasets.
///
/// The first `n_parts − 1` parts each take `min(minority, ⌊majority / n_parts⌋)`
/// consecutive majority records and the last part takes the rest, so every
/// majority record lands in exactly one part. Each part is completed with
/// as many minority records: the whole minority set, cycled from the start
/// when more are needed, or a rotating window of it when fewer are.
/// Indeterminate records are ignored.
pub fn partition_scheme1(train: &Dataset, n_parts: usize) -> Result<Vec<Dataset>> {
    if n_parts < 2 {
        return Err(Error::Config(format!("need at least 2 parts, got {n_parts}")));
    }
    partition_balanced(train, n_parts)
}

/// [`partition_scheme1`] without the two-part minimum; one part is the
/// whole training set with the minority class cycled up to parity.
pub(crate) fn partition_balanced(train: &Dataset, n_parts: usize) -> Result<Vec<Dataset>> {
    let majority_label = train.counts().majority();
    let majority = train.of_class(majority_label);
    let minority = train.of_class(majority_label.opposite());
    if majority.is_empty() {
        return Err(Error::EmptyClass(majority_label));
    }
    if minority.is_empty() {
        return Err(Error::EmptyClass(majority_label.opposite()));
    }
    let chunk = minority.len().min(majority.len() / n_parts);
    if chunk == 0 {
        return Err(Error::Config(format!(
            "{} majority records cannot fill {n_parts} parts",
            majority.len()
        )));
    }
    let mut parts = Vec::with_capacity(n_parts);
    for p in 0..n_parts {
        let start = p * chunk;
        let end = if p + 1 == n_parts {
            majority.len()
        } else {
            start + chunk
        };
        let share = &majority[start..end];
        let offset = if share.len() >= minority.len() {
            0
        } else {
            p * share.len()
        };
        let mut records: Vec<BinaryVector> = share.iter().map(|&r| r.clone()).collect();
        records.extend((0..share.len()).map(|i| minority[(offset + i) % minority.len()].clone()));
        parts.push(Dataset {
            width: train.width,
            records,
        });
    }
    Ok(parts)
}
