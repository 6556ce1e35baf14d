use std::fmt::Write as _;

use super::scheme::GenerationSummary;
use crate::classify::ClassifierKind;
use crate::metrics::{format_metric, Metric, UndefinedMetric};

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme1Row {
    pub name: String,
    /// Training records in the part; `None` for the vote row.
    pub records: Option<usize>,
    pub benign: Metric,
    pub attack: Metric,
    pub total: Metric,
}

/// Per-part and voted accuracies, plus the mean and sample standard
/// deviation of each column over the parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme1Report {
    pub classifier: ClassifierKind,
    pub sampler: &'static str,
    pub rows: Vec<Scheme1Row>,
    pub vote: Scheme1Row,
    pub average: [Metric; 3],
    pub stdev: [Metric; 3],
}

fn column(rows: &[Scheme1Row], pick: fn(&Scheme1Row) -> &Metric) -> Vec<f64> {
    rows.iter().filter_map(|r| pick(r).as_ref().ok().copied()).collect()
}

fn mean(xs: &[f64]) -> Metric {
    if xs.is_empty() {
        return Err(UndefinedMetric {
            metric: "average",
            denominator: "defined parts",
        });
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

fn sample_std(xs: &[f64]) -> Metric {
    if xs.len() < 2 {
        return Err(UndefinedMetric {
            metric: "standard deviation",
            denominator: "defined parts - 1",
        });
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (xs.len() - 1) as f64).sqrt())
}

impl Scheme1Report {
    pub fn new(classifier: ClassifierKind, sampler: &'static str, rows: Vec<Scheme1Row>, vote: Scheme1Row) -> Self {
        let picks: [fn(&Scheme1Row) -> &Metric; 3] = [|r| &r.benign, |r| &r.attack, |r| &r.total];
        let cols = picks.map(|p| column(&rows, p));
        Self {
            classifier,
            sampler,
            average: [mean(&cols[0]), mean(&cols[1]), mean(&cols[2])],
            stdev: [sample_std(&cols[0]), sample_std(&cols[1]), sample_std(&cols[2])],
            rows,
            vote,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# scheme 1, classifier {}, sampler {}",
            self.classifier.display_name(),
            self.sampler
        );
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>10} {:>10} {:>10}",
            "", "records", "benign%", "attack%", "total%"
        );
        let line = |out: &mut String, name: &str, records: String, m: [&Metric; 3]| {
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:>10} {:>10} {:>10}",
                name,
                records,
                format_metric(m[0], 2),
                format_metric(m[1], 2),
                format_metric(m[2], 2)
            );
        };
        for r in &self.rows {
            line(
                &mut out,
                &r.name,
                r.records.map_or(String::new(), |n| n.to_string()),
                [&r.benign, &r.attack, &r.total],
            );
        }
        line(
            &mut out,
            "Average",
            String::new(),
            [&self.average[0], &self.average[1], &self.average[2]],
        );
        line(
            &mut out,
            "Stdev",
            String::new(),
            [&self.stdev[0], &self.stdev[1], &self.stdev[2]],
        );
        let v = &self.vote;
        line(&mut out, &v.name, String::new(), [&v.benign, &v.attack, &v.total]);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,records,benign_accuracy,attack_accuracy,total_accuracy\n");
        let csv = |m: &Metric| m.as_ref().map_or(String::new(), |x| format!("{x:.6}"));
        let mut push = |name: &str, records: Option<usize>, m: [&Metric; 3]| {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                name,
                records.map_or(String::new(), |n| n.to_string()),
                csv(m[0]),
                csv(m[1]),
                csv(m[2])
            );
        };
        for r in &self.rows {
            push(&r.name, r.records, [&r.benign, &r.attack, &r.total]);
        }
        push("Average", None, [&self.average[0], &self.average[1], &self.average[2]]);
        push("Stdev", None, [&self.stdev[0], &self.stdev[1], &self.stdev[2]]);
        push(
            &self.vote.name,
            None,
            [&self.vote.benign, &self.vote.attack, &self.vote.total],
        );
        out
    }
}

/// Scores of one classifier trained on one version of the training set.
/// Paired arrays are `[attack, benign]`; precision, recall and F1 are
/// fractions, accuracy is a percentage.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme2Row {
    pub classifier: ClassifierKind,
    pub data: String,
    pub precision: [Metric; 2],
    pub recall: [Metric; 2],
    pub f1: [Metric; 2],
    pub accuracy: Metric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme2Report {
    pub generation: Vec<GenerationSummary>,
    pub rows: Vec<Scheme2Row>,
}

impl Scheme2Report {
    pub fn new(generation: Vec<GenerationSummary>, rows: Vec<Scheme2Row>) -> Self {
        Self { generation, rows }
    }

    pub fn row(&self, classifier: ClassifierKind, data: &str) -> Option<&Scheme2Row> {
        self.rows.iter().find(|r| r.classifier == classifier && r.data == data)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.generation.is_empty() {
            out.push_str("# synthetic records: only records labelled with the minority class are kept\n");
            let _ = writeln!(
                out,
                "{:<10} {:>9} {:>10} {:>9} {:>12} {:>14} {:>10}",
                "variant", "minority", "generated", "appended", "wrong-class", "indeterminate", "shortfall"
            );
            for g in &self.generation {
                let _ = writeln!(
                    out,
                    "{:<10} {:>9} {:>10} {:>9} {:>12} {:>14} {:>10}",
                    g.variant,
                    g.minority.as_str(),
                    g.generated,
                    g.appended,
                    g.discarded_majority,
                    g.discarded_indeterminate,
                    g.shortfall
                );
            }
        }
        if self.rows.is_empty() {
            return out;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let w = self
            .rows
            .iter()
            .map(|r| r.classifier.display_name().len())
            .max()
            .unwrap_or(0)
            .max("method".len());
        let _ = writeln!(
            out,
            "{:<w$} {:<8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "method", "data", "P(att)", "P(ben)", "R(att)", "R(ben)", "F1(att)", "F1(ben)", "acc%"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<w$} {:<8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
                r.classifier.display_name(),
                r.data,
                format_metric(&r.precision[0], 2),
                format_metric(&r.precision[1], 2),
                format_metric(&r.recall[0], 2),
                format_metric(&r.recall[1], 2),
                format_metric(&r.f1[0], 2),
                format_metric(&r.f1[1], 2),
                format_metric(&r.accuracy, 2)
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,data,precision_attack,precision_benign,recall_attack,recall_benign,f1_attack,f1_benign,accuracy\n",
        );
        let csv = |m: &Metric| m.as_ref().map_or(String::new(), |x| format!("{x:.6}"));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.classifier.as_str(),
                r.data,
                csv(&r.precision[0]),
                csv(&r.precision[1]),
                csv(&r.recall[0]),
                csv(&r.recall[1]),
                csv(&r.f1[0]),
                csv(&r.f1[1]),
                csv(&r.accuracy)
            );
        }
        out
    }

    pub fn generation_csv(&self) -> String {
        let mut out =
            String::from("variant,minority,generated,appended,discarded_majority,discarded_indeterminate,shortfall\n");
        for g in &self.generation {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                g.variant,
                g.minority.as_str(),
                g.generated,
                g.appended,
                g.discarded_majority,
                g.discarded_indeterminate,
                g.shortfall
            );
        }
        out
    }
}
