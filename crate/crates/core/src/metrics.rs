//! Confusion-matrix metrics for the two-class problem.
//!
//! Indeterminate predictions always count as wrong: against a positive
//! truth they are false negatives, against a negative truth false positives.

use std::fmt;

use crate::data::ClassLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub positive: ClassLabel,
}

/// A metric whose denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{metric} is undefined: {denominator} = 0")]
pub struct UndefinedMetric {
    pub metric: &'static str,
    pub denominator: &'static str,
}

pub type Metric = std::result::Result<f64, UndefinedMetric>;

pub fn confusion(preds: &[ClassLabel], truth: &[ClassLabel], positive: ClassLabel) -> Result<ConfusionMatrix> {
    if preds.len() != truth.len() {
        return Err(Error::Dimension {
            what: "prediction list",
            expected: truth.len(),
            found: preds.len(),
        });
    }
    if positive == ClassLabel::Indeterminate {
        return Err(Error::Config("the positive class must be benign or attack".into()));
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        tn: 0,
        fp: 0,
        fn_: 0,
        positive,
    };
    for (index, (&p, &t)) in preds.iter().zip(truth).enumerate() {
        if t == ClassLabel::Indeterminate {
            return Err(Error::Domain {
                domain: "ground-truth label",
                index,
                value: 0,
            });
        }
        match (t == positive, p == t) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.tn += 1,
            (false, false) => cm.fp += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize, metric: &'static str, denominator: &'static str) -> Metric {
    if den == 0 {
        Err(UndefinedMetric { metric, denominator })
    } else {
        Ok(num as f64 / den as f64)
    }
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// The same counts viewed with the other class as positive.
    pub fn swapped(&self) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
            positive: self.positive.opposite(),
        }
    }

    /// `(TP + TN) / total × 100`.
    pub fn accuracy(&self) -> Metric {
        ratio(self.tp + self.tn, self.total(), "accuracy", "TP+TN+FP+FN").map(|r| r * 100.0)
    }

    /// `TP / (TP + FP) × 100`, the percentage form of precision.
    pub fn class_accuracy(&self) -> Metric {
        ratio(self.tp, self.tp + self.fp, "class accuracy", "TP+FP").map(|r| r * 100.0)
    }

    pub fn precision(&self) -> Metric {
        ratio(self.tp, self.tp + self.fp, "precision", "TP+FP")
    }

    pub fn recall(&self) -> Metric {
        ratio(self.tp, self.tp + self.fn_, "recall", "TP+FN")
    }

    pub fn f1(&self) -> Metric {
        f1_score(self.precision()?, self.recall()?)
    }
}

/// Harmonic mean of precision and recall.
pub fn f1_score(precision: f64, recall: f64) -> Metric {
    if precision + recall == 0.0 {
        return Err(UndefinedMetric {
            metric: "F1",
            denominator: "precision+recall",
        });
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "positive={} TP={} TN={} FP={} FN={}",
            self.positive, self.tp, self.tn, self.fp, self.fn_
        )
    }
}

/// Formats a metric with `decimals` places, or `n/a` when undefined.
pub fn format_metric(m: &Metric, decimals: usize) -> String {
    match m {
        Ok(x) => format!("{x:.decimals$}"),
        Err(_) => "n/a".to_string(),
    }
}
