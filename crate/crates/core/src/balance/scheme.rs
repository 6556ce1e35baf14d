use rand::Rng;
use rayon::prelude::*;

use super::report::{Scheme1Report, Scheme1Row, Scheme2Report, Scheme2Row};
use super::{balance_with_synthetic, generate_synthetic, majority_vote, GenerationMethod};
use crate::binary::BinaryVector;
use crate::classify::{ClassifierKind, FittedClassifier, RbmTrainer};
use crate::data::{self, decode_label, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{confusion, Metric};
use crate::rng;

fn sub_seed(master: u64, stream: u64) -> u64 {
    rng::derive(master, stream).random()
}

/// Per-class accuracy (share of each class's records classified correctly)
/// and total accuracy, all in percent.
pub(crate) fn class_accuracies(preds: &[ClassLabel], truth: &[ClassLabel]) -> Result<(Metric, Metric, Metric)> {
    let attack = confusion(preds, truth, ClassLabel::Attack)?;
    let benign = attack.swapped();
    Ok((
        benign.recall().map(|r| r * 100.0),
        attack.recall().map(|r| r * 100.0),
        attack.accuracy(),
    ))
}

#[derive(Debug, Clone)]
pub struct Scheme1Settings {
    pub n_parts: usize,
    pub classifier: ClassifierKind,
    pub trainer: RbmTrainer,
    pub seed: u64,
}

/// Trains one classifier per balanced partition of `train`, scores each on
/// `test`, and scores their majority vote.
pub fn run_scheme1(train: &Dataset, test: &Dataset, settings: &Scheme1Settings) -> Result<Scheme1Report> {
    if settings.n_parts == 0 {
        return Err(Error::Config("need at least one part".into()));
    }
    if test.is_empty() {
        return Err(Error::Empty("test data"));
    }
    let parts = data::partition_balanced(train, settings.n_parts)?;
    let predictions = parts
        .par_iter()
        .enumerate()
        .map(|(p, part)| {
            let seed = sub_seed(settings.seed, p as u64);
            FittedClassifier::fit(settings.classifier, part, &settings.trainer, seed)?.predict_all(test)
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = test.labels();
    let mut rows = Vec::with_capacity(parts.len());
    for (p, (part, preds)) in parts.iter().zip(&predictions).enumerate() {
        let (benign, attack, total) = class_accuracies(preds, &truth)?;
        rows.push(Scheme1Row {
            name: data::part_name(p),
            records: Some(part.len()),
            benign,
            attack,
            total,
        });
    }
    let voted = majority_vote(&predictions)?;
    let (benign, attack, total) = class_accuracies(&voted, &truth)?;
    Ok(Scheme1Report::new(
        settings.classifier,
        settings.trainer.sampler.name(),
        rows,
        Scheme1Row {
            name: "Majority Vote".into(),
            records: None,
            benign,
            attack,
            total,
        },
    ))
}

/// A source of synthetic records: how the generator RBM is trained and how
/// records are drawn from it. `label` tags the report rows (e.g. `CD-bal`).
#[derive(Debug, Clone)]
pub struct GenerationVariant {
    pub label: String,
    pub trainer: RbmTrainer,
    pub method: GenerationMethod,
}

#[derive(Debug, Clone)]
pub struct Scheme2Settings {
    pub variants: Vec<GenerationVariant>,
    pub classifiers: Vec<ClassifierKind>,
    /// Used when the classifier is itself an RBM.
    pub classifier_trainer: RbmTrainer,
    /// Records generated per round while filling the minority pool.
    pub generation_batch: usize,
    pub max_generation_rounds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationSummary {
    pub variant: String,
    pub minority: ClassLabel,
    pub generated: usize,
    pub appended: usize,
    pub discarded_majority: usize,
    pub discarded_indeterminate: usize,
    pub shortfall: usize,
}

fn synthesize(
    train: &Dataset,
    variant: &GenerationVariant,
    settings: &Scheme2Settings,
    seed: u64,
) -> Result<(Dataset, GenerationSummary)> {
    let counts = train.counts();
    let minority = counts.majority().opposite();
    let needed = counts.get(minority.opposite()).saturating_sub(counts.get(minority));
    let model = variant.trainer.fit(train.records(), sub_seed(seed, 0))?.params;
    let mut rng = rng::derive(seed, 1);
    let mut generated: Vec<BinaryVector> = Vec::new();
    let mut pool = 0;
    let mut rounds = 0;
    while pool < needed && rounds < settings.max_generation_rounds {
        let batch = generate_synthetic(&model, variant.method, settings.generation_batch, &mut rng)?;
        for r in &batch {
            if decode_label(r)? == minority {
                pool += 1;
            }
        }
        generated.extend(batch);
        rounds += 1;
    }
    let outcome = balance_with_synthetic(train, &generated, minority)?;
    let summary = GenerationSummary {
        variant: variant.label.clone(),
        minority,
        generated: generated.len(),
        appended: outcome.appended,
        discarded_majority: outcome.discarded_majority,
        discarded_indeterminate: outcome.discarded_indeterminate,
        shortfall: outcome.shortfall,
    };
    Ok((outcome.dataset, summary))
}

fn score(kind: ClassifierKind, data: &str, preds: &[ClassLabel], truth: &[ClassLabel]) -> Result<Scheme2Row> {
    let attack = confusion(preds, truth, ClassLabel::Attack)?;
    let benign = attack.swapped();
    Ok(Scheme2Row {
        classifier: kind,
        data: data.to_string(),
        precision: [attack.precision(), benign.precision()],
        recall: [attack.recall(), benign.recall()],
        f1: [attack.f1(), benign.f1()],
        accuracy: attack.accuracy(),
    })
}

/// Balances `train` with each variant's synthetic minority records, then
/// trains every requested classifier on each balanced set and on the
/// original imbalanced set, scoring all of them on `test`.
pub fn run_scheme2(train: &Dataset, test: &Dataset, settings: &Scheme2Settings) -> Result<Scheme2Report> {
    if settings.generation_batch == 0 {
        return Err(Error::Config("generation batch must be at least 1".into()));
    }
    if !settings.classifiers.is_empty() && test.is_empty() {
        return Err(Error::Empty("test data"));
    }
    let mut balanced = Vec::with_capacity(settings.variants.len());
    let mut summaries = Vec::with_capacity(settings.variants.len());
    for (i, variant) in settings.variants.iter().enumerate() {
        let (ds, summary) = synthesize(train, variant, settings, sub_seed(settings.seed, 1 + i as u64))?;
        balanced.push((variant.label.clone(), ds));
        summaries.push(summary);
    }

    let mut jobs: Vec<(ClassifierKind, String, &Dataset)> = Vec::new();
    for &kind in &settings.classifiers {
        for (label, ds) in &balanced {
            jobs.push((kind, label.clone(), ds));
        }
        jobs.push((kind, "imbal".to_string(), train));
    }
    let truth = test.labels();
    let classifier_seed = sub_seed(settings.seed, 0);
    let rows = jobs
        .par_iter()
        .map(|(kind, label, ds)| {
            let fitted = FittedClassifier::fit(*kind, ds, &settings.classifier_trainer, classifier_seed)?;
            score(*kind, label, &fitted.predict_all(test)?, &truth)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scheme2Report::new(summaries, rows))
}
