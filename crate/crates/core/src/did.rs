//! Dialect identification.
//!
//! Multinomial naive Bayes over word unigrams and character 1-3 grams,
//! fused with per-dialect character 5-gram and word unigram language model
//! scores:
//!
//! ```text
//! score(d) = log P(d)
//!          + sum_f count(f) * log P(f | d)
//!          + lambda * (charLM_d(text) + wordLM_d(text))
//! ```
//!
//! Posteriors are the softmax of the per-label scores. Features are taken
//! from the raw text: no normalization, whitespace word split.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dialect::Dialect;
use crate::error::{Error, Result};
use crate::lm::{LmDocument, NgramLm, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DidConfig {
    /// Add-k constant for the naive Bayes feature tables.
    pub k: f64,
    /// Weight of the language-model scores.
    pub lambda: f64,
    /// Add-k constant for the language models.
    pub lm_k: f64,
    pub char_lm_order: usize,
}

impl Default for DidConfig {
    fn default() -> Self {
        DidConfig {
            k: 0.5,
            lambda: 1.0,
            lm_k: 0.5,
            char_lm_order: 5,
        }
    }
}

/// Naive Bayes feature families, each with its own vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureFamily {
    Word,
    Char1,
    Char2,
    Char3,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 4] = [
        FeatureFamily::Word,
        FeatureFamily::Char1,
        FeatureFamily::Char2,
        FeatureFamily::Char3,
    ];

    /// Feature counts of `text` in this family.
    pub fn extract(self, text: &str) -> BTreeMap<String, u64> {
        let mut counts = BTreeMap::new();
        let mut add = |f: String| *counts.entry(f).or_default() += 1;
        match self {
            FeatureFamily::Word => text.split_whitespace().map(String::from).for_each(&mut add),
            FeatureFamily::Char1 | FeatureFamily::Char2 | FeatureFamily::Char3 => {
                let n = match self {
                    FeatureFamily::Char1 => 1,
                    FeatureFamily::Char2 => 2,
                    _ => 3,
                };
                let chars: Vec<char> = text.chars().collect();
                chars.windows(n).map(|w| w.iter().collect()).for_each(&mut add);
            }
        }
        counts
    }
}

/// Per-label feature counts for one family.
#[derive(Debug, Clone, PartialEq)]
struct FeatureTable {
    counts: Vec<BTreeMap<String, u64>>,
    totals: Vec<u64>,
    vocab_size: usize,
}

impl FeatureTable {
    fn new(counts: Vec<BTreeMap<String, u64>>) -> Self {
        let totals = counts.iter().map(|c| c.values().sum()).collect();
        let mut vocab: Vec<&String> = counts.iter().flat_map(BTreeMap::keys).collect();
        vocab.sort();
        vocab.dedup();
        let vocab_size = vocab.len();
        FeatureTable {
            counts,
            totals,
            vocab_size,
        }
    }

    /// Smoothed `log P(feature | label)`; unseen features share one extra
    /// vocabulary bucket.
    fn loglik(&self, label: usize, feature: &str, k: f64) -> f64 {
        let count = self.counts[label].get(feature).copied().unwrap_or(0) as f64;
        let denom = self.totals[label] as f64 + k * (self.vocab_size as f64 + 1.0);
        ((count + k) / denom).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DidModel {
    config: DidConfig,
    labels: Vec<String>,
    label_counts: Vec<u64>,
    log_priors: Vec<f64>,
    features: BTreeMap<FeatureFamily, FeatureTable>,
    char_lms: Vec<NgramLm>,
    word_lms: Vec<NgramLm>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DidResult {
    pub label: String,
    /// Posterior per label.
    pub scores: BTreeMap<String, f64>,
}

impl DidResult {
    pub fn dialect(&self) -> Result<Dialect> {
        self.label.parse()
    }
}

/// Reads `label TAB sentence` lines. Blank lines are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (label, sentence) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: idx + 1,
            column: 1,
            msg: "expected label TAB sentence".into(),
        })?;
        out.push((label.trim().to_string(), sentence.to_string()));
    }
    Ok(out)
}

/// Canonical dialects first in their usual order, anything else after,
/// alphabetically.
fn label_order(label: &str) -> (usize, &str) {
    let rank = Dialect::ALL
        .iter()
        .position(|d| d.id() == label)
        .unwrap_or(Dialect::ALL.len());
    (rank, label)
}

pub fn train_did(corpus: &[(String, String)]) -> Result<DidModel> {
    train_did_with(corpus, DidConfig::default())
}

pub fn train_did_with(corpus: &[(String, String)], config: DidConfig) -> Result<DidModel> {
    if corpus.is_empty() {
        return Err(Error::invalid("empty training corpus"));
    }
    if let Some((label, _)) = corpus.iter().find(|(_, s)| s.trim().is_empty()) {
        return Err(Error::invalid(format!("empty sentence for label {label:?}")));
    }
    if corpus.iter().any(|(l, _)| l.is_empty()) {
        return Err(Error::invalid("empty label"));
    }
    let mut labels: Vec<String> = corpus.iter().map(|(l, _)| l.clone()).collect();
    labels.sort_by(|a, b| label_order(a).cmp(&label_order(b)));
    labels.dedup();
    if labels.len() < 2 {
        return Err(Error::invalid("dialect identification needs at least two labels"));
    }

    let mut label_counts = vec![0u64; labels.len()];
    let mut texts: Vec<Vec<&str>> = vec![Vec::new(); labels.len()];
    let mut counts: BTreeMap<FeatureFamily, Vec<BTreeMap<String, u64>>> = FeatureFamily::ALL
        .into_iter()
        .map(|f| (f, vec![BTreeMap::new(); labels.len()]))
        .collect();
    for (label, sentence) in corpus {
        let li = labels.iter().position(|l| l == label).expect("label collected above");
        label_counts[li] += 1;
        texts[li].push(sentence);
        for (family, table) in &mut counts {
            for (feature, c) in family.extract(sentence) {
                *table[li].entry(feature).or_default() += c;
            }
        }
    }

    let mut char_lms = Vec::new();
    let mut word_lms = Vec::new();
    for t in &texts {
        char_lms.push(NgramLm::train(Unit::Char, config.char_lm_order, config.lm_k, t)?);
        word_lms.push(NgramLm::train(Unit::Word, 1, config.lm_k, t)?);
    }
    DidModel::build(
        config,
        labels,
        label_counts,
        counts.into_iter().map(|(f, c)| (f, FeatureTable::new(c))).collect(),
        char_lms,
        word_lms,
    )
}

impl DidModel {
    fn build(
        config: DidConfig,
        labels: Vec<String>,
        label_counts: Vec<u64>,
        features: BTreeMap<FeatureFamily, FeatureTable>,
        char_lms: Vec<NgramLm>,
        word_lms: Vec<NgramLm>,
    ) -> Result<Self> {
        if !(config.k.is_finite() && config.k > 0.0) {
            return Err(Error::invalid(format!(
                "smoothing constant must be positive, got {}",
                config.k
            )));
        }
        if !(config.lambda.is_finite() && config.lambda >= 0.0) {
            return Err(Error::invalid(format!(
                "fusion weight must be nonnegative, got {}",
                config.lambda
            )));
        }
        let n = labels.len();
        let consistent = label_counts.len() == n
            && char_lms.len() == n
            && word_lms.len() == n
            && features.len() == FeatureFamily::ALL.len()
            && features.values().all(|t| t.counts.len() == n);
        if !consistent {
            return Err(Error::invalid("model tables disagree on the number of labels"));
        }
        let total: u64 = label_counts.iter().sum();
        if total == 0 {
            return Err(Error::UntrainedModel);
        }
        let log_priors = label_counts.iter().map(|&c| (c as f64 / total as f64).ln()).collect();
        Ok(DidModel {
            config,
            labels,
            label_counts,
            log_priors,
            features,
            char_lms,
            word_lms,
        })
    }

    pub fn config(&self) -> &DidConfig {
        &self.config
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    /// Same model with a different fusion weight.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!(
                "fusion weight must be nonnegative, got {lambda}"
            )));
        }
        self.config.lambda = lambda;
        Ok(self)
    }

    pub fn feature_loglik(&self, label: usize, family: FeatureFamily, feature: &str) -> f64 {
        self.features[&family].loglik(label, feature, self.config.k)
    }

    pub fn char_lm(&self, label: usize) -> &NgramLm {
        &self.char_lms[label]
    }

    pub fn word_lm(&self, label: usize) -> &NgramLm {
        &self.word_lms[label]
    }

    /// Unnormalized fused log score per label, in label order.
    pub fn log_scores(&self, text: &str) -> Vec<f64> {
        if text.trim().is_empty() {
            return self.log_priors.clone();
        }
        let extracted: Vec<(FeatureFamily, BTreeMap<String, u64>)> =
            FeatureFamily::ALL.into_iter().map(|f| (f, f.extract(text))).collect();
        (0..self.labels.len())
            .map(|li| {
                let mut score = self.log_priors[li];
                for (family, feats) in &extracted {
                    for (feature, count) in feats {
                        score += *count as f64 * self.feature_loglik(li, *family, feature);
                    }
                }
                if self.config.lambda > 0.0 {
                    score += self.config.lambda * (self.char_lms[li].logprob(text) + self.word_lms[li].logprob(text));
                }
                score
            })
            .collect()
    }

    pub fn identify(&self, text: &str) -> Result<DidResult> {
        identify(text, self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DidDocument::from(self)).expect("DID document serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: DidDocument = serde_json::from_str(source).map_err(Error::parse)?;
        doc.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Softmax of the fused scores. Empty (or whitespace-only) text yields the
/// class priors; the argmax tie-break follows label order.
pub fn identify(text: &str, model: &DidModel) -> Result<DidResult> {
    let scores = model.log_scores(text);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    let posteriors: Vec<f64> = exp.iter().map(|e| e / total).collect();
    let mut best = 0;
    for (i, p) in posteriors.iter().enumerate() {
        if *p > posteriors[best] {
            best = i;
        }
    }
    Ok(DidResult {
        label: model.labels[best].clone(),
        scores: model.labels.iter().cloned().zip(posteriors).collect(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DidDocument {
    config: DidConfig,
    labels: Vec<String>,
    label_counts: Vec<u64>,
    features: BTreeMap<FeatureFamily, Vec<BTreeMap<String, u64>>>,
    char_lms: Vec<LmDocument>,
    word_lms: Vec<LmDocument>,
}

impl From<&DidModel> for DidDocument {
    fn from(model: &DidModel) -> Self {
        DidDocument {
            config: model.config,
            labels: model.labels.clone(),
            label_counts: model.label_counts.clone(),
            features: model.features.iter().map(|(f, t)| (*f, t.counts.clone())).collect(),
            char_lms: model.char_lms.iter().map(NgramLm::to_document).collect(),
            word_lms: model.word_lms.iter().map(NgramLm::to_document).collect(),
        }
    }
}

impl TryFrom<DidDocument> for DidModel {
    type Error = Error;

    fn try_from(doc: DidDocument) -> Result<Self> {
        let char_lms = doc
            .char_lms
            .into_iter()
            .map(NgramLm::from_document)
            .collect::<Result<_>>()?;
        let word_lms = doc
            .word_lms
            .into_iter()
            .map(NgramLm::from_document)
            .collect::<Result<_>>()?;
        DidModel::build(
            doc.config,
            doc.labels,
            doc.label_counts,
            doc.features
                .into_iter()
                .map(|(f, c)| (f, FeatureTable::new(c)))
                .collect(),
            char_lms,
            word_lms,
        )
    }
}
