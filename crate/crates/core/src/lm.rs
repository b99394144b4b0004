//! Add-k smoothed n-gram language models over characters or words.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentence-start padding symbol.
pub const BOS: &str = "\u{2}";
/// Sentence-end symbol; predicted once after the last real symbol.
pub const EOS: &str = "\u{3}";
const HISTORY_SEP: char = '\u{1F}';

/// What an LM treats as one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Char,
    Word,
}

impl Unit {
    pub fn symbols(self, text: &str) -> Vec<String> {
        match self {
            Unit::Char => text.chars().map(String::from).collect(),
            Unit::Word => text.split_whitespace().map(String::from).collect(),
        }
    }
}

/// `P(s | h) = (c(h, s) + k) / (c(h) + k * (|V| + 1))`, where `V` holds every
/// symbol seen as a prediction in training (end symbol included) and the
/// extra bucket covers unseen symbols. No backoff: an unseen history is
/// uniform over `|V| + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm {
    unit: Unit,
    order: usize,
    k: f64,
    contexts: BTreeMap<String, BTreeMap<String, u64>>,
    context_totals: BTreeMap<String, u64>,
    vocab_size: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LmDocument {
    unit: Unit,
    order: usize,
    k: f64,
    contexts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl NgramLm {
    pub fn train<S: AsRef<str>>(unit: Unit, order: usize, k: f64, texts: &[S]) -> Result<Self> {
        check_params(order, k)?;
        let mut contexts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for text in texts {
            for (history, symbol) in Self::events(order, &unit.symbols(text.as_ref())) {
                *contexts.entry(history).or_default().entry(symbol).or_default() += 1;
            }
        }
        Self::from_document(LmDocument {
            unit,
            order,
            k,
            contexts,
        })
    }

    pub(crate) fn from_document(doc: LmDocument) -> Result<Self> {
        check_params(doc.order, doc.k)?;
        let context_totals = doc
            .contexts
            .iter()
            .map(|(h, row)| (h.clone(), row.values().sum()))
            .collect();
        let mut vocab: Vec<&String> = doc.contexts.values().flat_map(BTreeMap::keys).collect();
        vocab.sort();
        vocab.dedup();
        let vocab_size = vocab.len();
        Ok(NgramLm {
            unit: doc.unit,
            order: doc.order,
            k: doc.k,
            contexts: doc.contexts,
            context_totals,
            vocab_size,
        })
    }

    pub(crate) fn to_document(&self) -> LmDocument {
        LmDocument {
            unit: self.unit,
            order: self.order,
            k: self.k,
            contexts: self.contexts.clone(),
        }
    }

    /// (history, predicted symbol) pairs for one padded sequence.
    fn events(order: usize, symbols: &[String]) -> Vec<(String, String)> {
        let mut padded: Vec<&str> = vec![BOS; order - 1];
        padded.extend(symbols.iter().map(String::as_str));
        padded.push(EOS);
        (order - 1..padded.len())
            .map(|i| {
                let history = padded[i + 1 - order..i].join(&HISTORY_SEP.to_string());
                (history, padded[i].to_string())
            })
            .collect()
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Smoothed conditional probability of `symbol` after `history`
    /// (the last `order - 1` symbols, already padded).
    pub fn prob(&self, history: &[&str], symbol: &str) -> f64 {
        let history = history.join(&HISTORY_SEP.to_string());
        let count = self
            .contexts
            .get(&history)
            .and_then(|row| row.get(symbol))
            .copied()
            .unwrap_or(0);
        let total = self.context_totals.get(&history).copied().unwrap_or(0);
        (count as f64 + self.k) / (total as f64 + self.k * (self.vocab_size as f64 + 1.0))
    }

    /// Sum of log conditional probabilities over every position of the
    /// padded text, the end symbol included.
    pub fn logprob(&self, text: &str) -> f64 {
        let symbols = self.unit.symbols(text);
        let mut total = 0.0;
        for (history, symbol) in Self::events(self.order, &symbols) {
            let hist: Vec<&str> = if history.is_empty() {
                Vec::new()
            } else {
                history.split(HISTORY_SEP).collect()
            };
            total += self.prob(&hist, &symbol).ln();
        }
        total
    }
}

fn check_params(order: usize, k: f64) -> Result<()> {
    if order == 0 {
        return Err(Error::invalid("n-gram order must be at least 1"));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!("smoothing constant must be positive, got {k}")));
    }
    Ok(())
}

pub fn lm_logprob(text: &str, lm: &NgramLm) -> f64 {
    lm.logprob(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_char_lm() {
        // V = {a, EOS}; each of the three histories was seen once with a
        // single continuation: (1 + 0.5) / (1 + 0.5 * 3) = 0.6.
        let lm = NgramLm::train(Unit::Char, 5, 0.5, &["aa"]).unwrap();
        assert_eq!(lm.vocab_size(), 2);
        assert!((lm.logprob("aa") - 3.0 * 0.6f64.ln()).abs() < 1e-12);
        // Unseen history: uniform over V + 1.
        assert!((lm.prob(&["x", "x", "x", "x"], "a") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_text_scores_end_after_start() {
        let lm = NgramLm::train(Unit::Char, 5, 0.5, &["aa"]).unwrap();
        let expected = lm.prob(&[BOS, BOS, BOS, BOS], EOS).ln();
        assert_eq!(lm.logprob(""), expected);
        // Start history saw only 'a': (0 + 0.5) / (1 + 1.5).
        assert!((expected - 0.2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn word_unigram() {
        let lm = NgramLm::train(Unit::Word, 1, 0.5, &["x y", "x"]).unwrap();
        // Events: x y EOS x EOS -> V = {x, y, EOS}, N = 5.
        let denom = 5.0 + 0.5 * 4.0;
        let expected = (2.5f64 / denom).ln() + (1.5f64 / denom).ln() + (2.5f64 / denom).ln();
        assert!((lm.logprob("x  y") - expected).abs() < 1e-12);
        assert!((lm.logprob("zzz") - (0.5f64 / denom).ln() - (2.5f64 / denom).ln()).abs() < 1e-12);
    }

    #[test]
    fn logprob_is_nonpositive_and_monotone() {
        let lm = NgramLm::train(Unit::Char, 3, 0.5, &["abc", "abd", "b"]).unwrap();
        for text in ["", "a", "ab", "abc", "zzz"] {
            assert!(lm.logprob(text) <= 0.0);
        }
        // With a history-free model the end term is shared, so a longer text
        // only adds nonpositive terms.
        let unigram = NgramLm::train(Unit::Word, 1, 0.5, &["a b", "b c"]).unwrap();
        assert!(unigram.logprob("a b") <= unigram.logprob("a"));
        assert!(unigram.logprob("a b q") <= unigram.logprob("a b"));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(NgramLm::train(Unit::Char, 0, 0.5, &["a"]).is_err());
        assert!(NgramLm::train(Unit::Char, 2, -1.0, &["a"]).is_err());
    }
}
