//! Combined-tag sequence model.
//!
//! A first-order hidden Markov model over unfactored tags (all eleven
//! feature values joined into one label), with add-k smoothing on the
//! initial, transition and emission distributions. Prediction returns the
//! exact per-position posterior `P(tag_i | sentence)` via forward-backward.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::features::{check_value, Feature, Features};

pub const DEFAULT_K: f64 = 0.1;

/// All eleven feature values in canonical order, serialized as
/// `pos:asp:per:gen:num:vox:mod:cas:stt:prc:enc`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CombinedTag([String; Feature::COUNT]);

impl CombinedTag {
    pub fn values(&self) -> &[String; Feature::COUNT] {
        &self.0
    }

    pub fn get(&self, feature: Feature) -> &str {
        &self.0[feature.index()]
    }

    /// Number of features on which the two tags agree.
    pub fn agreement(&self, other: &CombinedTag) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a == b).count()
    }

    pub fn to_features(&self) -> Features {
        Features::from_values(self.0.clone())
    }
}

impl From<&Features> for CombinedTag {
    fn from(features: &Features) -> Self {
        CombinedTag(features.values().clone())
    }
}

impl fmt::Display for CombinedTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(":"))
    }
}

impl FromStr for CombinedTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != Feature::COUNT {
            return Err(Error::invalid(format!(
                "combined tag {s:?} has {} fields, expected {}",
                parts.len(),
                Feature::COUNT
            )));
        }
        for part in &parts {
            check_value(part)?;
        }
        Ok(CombinedTag(std::array::from_fn(|i| parts[i].to_string())))
    }
}

impl Serialize for CombinedTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CombinedTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub type TaggedSentence = Vec<(String, CombinedTag)>;

/// Reads `word TAB tag` lines; blank lines separate sentences.
pub fn parse_corpus(text: &str) -> Result<Vec<TaggedSentence>> {
    let mut corpus = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                corpus.push(std::mem::take(&mut current));
            }
            continue;
        }
        let line_err = |msg: String| Error::Parse {
            line: idx + 1,
            column: 1,
            msg,
        };
        let (word, tag) = line
            .split_once('\t')
            .ok_or_else(|| line_err("expected word TAB tag".into()))?;
        if word.is_empty() {
            return Err(line_err("empty word".into()));
        }
        let tag = tag.trim_end().parse().map_err(|e: Error| line_err(e.to_string()))?;
        current.push((word.to_string(), tag));
    }
    if !current.is_empty() {
        corpus.push(current);
    }
    Ok(corpus)
}

/// Trained tagger counts. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    k: f64,
    tags: Arc<[CombinedTag]>,
    sentences: u64,
    initial: Vec<u64>,
    /// Row-major `tags × tags`, from → to.
    transitions: Vec<u64>,
    emissions: BTreeMap<String, Vec<u64>>,
    tag_totals: Vec<u64>,
    transition_totals: Vec<u64>,
}

pub fn train_tagger(corpus: &[TaggedSentence]) -> Result<TaggerModel> {
    train_tagger_with_k(corpus, DEFAULT_K)
}

pub fn train_tagger_with_k(corpus: &[TaggedSentence], k: f64) -> Result<TaggerModel> {
    if corpus.is_empty() {
        return Err(Error::invalid("empty training corpus"));
    }
    if corpus.iter().any(Vec::is_empty) {
        return Err(Error::invalid("empty sentence in training corpus"));
    }
    let mut tags: Vec<CombinedTag> = corpus.iter().flatten().map(|(_, t)| t.clone()).collect();
    tags.sort();
    tags.dedup();
    let id = |tag: &CombinedTag| tags.binary_search(tag).expect("tag collected above");

    let n = tags.len();
    let mut initial = vec![0; n];
    let mut transitions = vec![0; n * n];
    let mut emissions: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for sentence in corpus {
        initial[id(&sentence[0].1)] += 1;
        for pair in sentence.windows(2) {
            transitions[id(&pair[0].1) * n + id(&pair[1].1)] += 1;
        }
        for (word, tag) in sentence {
            emissions.entry(word.clone()).or_insert_with(|| vec![0; n])[id(tag)] += 1;
        }
    }
    TaggerModel::from_counts(k, tags, corpus.len() as u64, initial, transitions, emissions)
}

/// Per-position tag posteriors for `sentence`.
pub fn predict_tags<S: AsRef<str>>(sentence: &[S], model: &TaggerModel) -> Result<Vec<TagDistribution>> {
    model.predict_tags(sentence)
}

/// A probability distribution over the model's tag vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TagDistribution {
    tags: Arc<[CombinedTag]>,
    probs: Vec<f64>,
}

impl TagDistribution {
    pub fn new(entries: Vec<(CombinedTag, f64)>) -> Result<Self> {
        if entries.iter().any(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and nonnegative"));
        }
        let (tags, probs): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Ok(TagDistribution {
            tags: tags.into(),
            probs,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CombinedTag, f64)> {
        self.tags.iter().zip(self.probs.iter().copied())
    }

    pub fn prob(&self, tag: &CombinedTag) -> f64 {
        self.iter().filter(|(t, _)| *t == tag).map(|(_, p)| p).sum()
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Most probable tag; the earliest in vocabulary order wins ties.
    pub fn argmax(&self) -> Option<&CombinedTag> {
        let mut best: Option<(&CombinedTag, f64)> = None;
        for (tag, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((tag, p));
            }
        }
        best.map(|(t, _)| t)
    }
}

impl TaggerModel {
    fn from_counts(
        k: f64,
        tags: Vec<CombinedTag>,
        sentences: u64,
        initial: Vec<u64>,
        transitions: Vec<u64>,
        emissions: BTreeMap<String, Vec<u64>>,
    ) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("smoothing constant must be positive, got {k}")));
        }
        let n = tags.len();
        let mut tag_totals = vec![0; n];
        for counts in emissions.values() {
            for (total, c) in tag_totals.iter_mut().zip(counts) {
                *total += c;
            }
        }
        let transition_totals = (0..n)
            .map(|from| transitions[from * n..(from + 1) * n].iter().sum())
            .collect();
        Ok(TaggerModel {
            k,
            tags: tags.into(),
            sentences,
            initial,
            transitions,
            emissions,
            tag_totals,
            transition_totals,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn tags(&self) -> &[CombinedTag] {
        &self.tags
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.emissions.keys().map(String::as_str)
    }

    pub fn is_trained(&self) -> bool {
        !self.tags.is_empty()
    }

    fn tag_id(&self, tag: &CombinedTag) -> Option<usize> {
        self.tags.binary_search(tag).ok()
    }

    pub fn initial_count(&self, tag: &CombinedTag) -> u64 {
        self.tag_id(tag).map_or(0, |i| self.initial[i])
    }

    pub fn transition_count(&self, from: &CombinedTag, to: &CombinedTag) -> u64 {
        match (self.tag_id(from), self.tag_id(to)) {
            (Some(a), Some(b)) => self.transitions[a * self.tags.len() + b],
            _ => 0,
        }
    }

    pub fn emission_count(&self, word: &str, tag: &CombinedTag) -> u64 {
        match (self.emissions.get(word), self.tag_id(tag)) {
            (Some(counts), Some(i)) => counts[i],
            _ => 0,
        }
    }

    /// Smoothed `P(tag_1 = to)`.
    pub fn initial_prob(&self, to: usize) -> f64 {
        let n = self.tags.len() as f64;
        (self.initial[to] as f64 + self.k) / (self.sentences as f64 + self.k * n)
    }

    /// Smoothed `P(to | from)`.
    pub fn transition_prob(&self, from: usize, to: usize) -> f64 {
        let n = self.tags.len();
        (self.transitions[from * n + to] as f64 + self.k) / (self.transition_totals[from] as f64 + self.k * n as f64)
    }

    /// Smoothed `P(word | tag)`. The emission vocabulary has one extra
    /// bucket for unseen words; an unseen word gets the same probability
    /// under every tag so only the transitions decide its posterior.
    pub fn emission_prob(&self, word: &str, tag: usize) -> f64 {
        let vocab = self.emissions.len() as f64 + 1.0;
        match self.emissions.get(word) {
            Some(counts) => (counts[tag] as f64 + self.k) / (self.tag_totals[tag] as f64 + self.k * vocab),
            None => 1.0 / vocab,
        }
    }

    /// Per-position tag posteriors by scaled forward-backward.
    pub fn predict_tags<S: AsRef<str>>(&self, sentence: &[S]) -> Result<Vec<TagDistribution>> {
        if !self.is_trained() {
            return Err(Error::UntrainedModel);
        }
        if sentence.is_empty() {
            return Err(Error::invalid("cannot tag an empty sentence"));
        }
        let n = self.tags.len();
        let len = sentence.len();
        let emit: Vec<Vec<f64>> = sentence
            .iter()
            .map(|w| (0..n).map(|t| self.emission_prob(w.as_ref(), t)).collect())
            .collect();
        let trans: Vec<f64> = (0..n * n).map(|i| self.transition_prob(i / n, i % n)).collect();

        let mut alpha = vec![vec![0.0; n]; len];
        let mut scale = vec![0.0; len];
        for t in 0..n {
            alpha[0][t] = self.initial_prob(t) * emit[0][t];
        }
        scale[0] = normalize(&mut alpha[0]);
        for i in 1..len {
            for t in 0..n {
                let incoming: f64 = (0..n).map(|s| alpha[i - 1][s] * trans[s * n + t]).sum();
                alpha[i][t] = incoming * emit[i][t];
            }
            scale[i] = normalize(&mut alpha[i]);
        }

        let mut beta = vec![vec![1.0; n]; len];
        for i in (0..len - 1).rev() {
            for s in 0..n {
                let outgoing: f64 = (0..n).map(|t| trans[s * n + t] * emit[i + 1][t] * beta[i + 1][t]).sum();
                beta[i][s] = outgoing / scale[i + 1];
            }
        }

        Ok(alpha
            .into_iter()
            .zip(beta)
            .map(|(a, b)| {
                let mut probs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
                normalize(&mut probs);
                TagDistribution {
                    tags: Arc::clone(&self.tags),
                    probs,
                }
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TaggerDocument::from(self)).expect("tagger document serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: TaggerDocument = serde_json::from_str(source).map_err(Error::parse)?;
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

fn normalize(values: &mut [f64]) -> f64 {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter_mut().for_each(|v| *v /= total);
    }
    total
}

/// Persisted form: all counts, nonzero entries only, keyed by tag string.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaggerDocument {
    k: f64,
    sentences: u64,
    tags: Vec<CombinedTag>,
    initial: BTreeMap<CombinedTag, u64>,
    transitions: BTreeMap<CombinedTag, BTreeMap<CombinedTag, u64>>,
    emissions: BTreeMap<String, BTreeMap<CombinedTag, u64>>,
}

impl From<&TaggerModel> for TaggerDocument {
    fn from(model: &TaggerModel) -> Self {
        let tags = &model.tags;
        let n = tags.len();
        let sparse = |counts: &[u64]| -> BTreeMap<CombinedTag, u64> {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (tags[i].clone(), c))
                .collect()
        };
        TaggerDocument {
            k: model.k,
            sentences: model.sentences,
            tags: tags.to_vec(),
            initial: sparse(&model.initial),
            transitions: (0..n)
                .map(|from| (tags[from].clone(), sparse(&model.transitions[from * n..(from + 1) * n])))
                .filter(|(_, row)| !row.is_empty())
                .collect(),
            emissions: model
                .emissions
                .iter()
                .map(|(w, counts)| (w.clone(), sparse(counts)))
                .collect(),
        }
    }
}

impl TryFrom<TaggerDocument> for TaggerModel {
    type Error = Error;

    fn try_from(doc: TaggerDocument) -> Result<Self> {
        let mut tags = doc.tags;
        tags.sort();
        tags.dedup();
        let n = tags.len();
        let id = |tag: &CombinedTag| {
            tags.binary_search(tag)
                .map_err(|_| Error::invalid(format!("tag {tag} is not in the tag vocabulary")))
        };
        let mut initial = vec![0; n];
        for (tag, c) in &doc.initial {
            initial[id(tag)?] = *c;
        }
        let mut transitions = vec![0; n * n];
        for (from, row) in &doc.transitions {
            let from = id(from)?;
            for (to, c) in row {
                transitions[from * n + id(to)?] = *c;
            }
        }
        let mut emissions = BTreeMap::new();
        for (word, row) in &doc.emissions {
            let mut counts = vec![0; n];
            for (tag, c) in row {
                counts[id(tag)?] = *c;
            }
            emissions.insert(word.clone(), counts);
        }
        TaggerModel::from_counts(doc.k, tags, doc.sentences, initial, transitions, emissions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(pos: &str) -> CombinedTag {
        format!("{pos}:na:na:na:na:na:na:na:na:na:na").parse().unwrap()
    }

    fn sent(items: &[(&str, &str)]) -> TaggedSentence {
        items.iter().map(|(w, p)| (w.to_string(), tag(p))).collect()
    }

    #[test]
    fn tag_parse_and_display() {
        let t: CombinedTag = "verb:p:3:m:s:a:i:na:na:na:na".parse().unwrap();
        assert_eq!(t.get(Feature::Gen), "m");
        assert_eq!(t.to_string(), "verb:p:3:m:s:a:i:na:na:na:na");
        assert!("verb:p".parse::<CombinedTag>().is_err());
        assert!("verb:p:3:m:s:a:i:na:na:na:".parse::<CombinedTag>().is_err());
        assert!("verb:p:3:m:s:a:i:na:na:na:a+b".parse::<CombinedTag>().is_err());
    }

    #[test]
    fn counts_match_hand_tally() {
        let model = train_tagger(&[sent(&[("ktb", "verb"), ("ktb", "noun")])]).unwrap();
        assert_eq!(model.transition_count(&tag("verb"), &tag("noun")), 1);
        assert_eq!(model.transition_count(&tag("noun"), &tag("verb")), 0);
        assert_eq!(model.emission_count("ktb", &tag("verb")), 1);
        assert_eq!(model.emission_count("ktb", &tag("noun")), 1);
        assert_eq!(model.initial_count(&tag("verb")), 1);
        assert_eq!(model.tags().len(), 2);
    }

    #[test]
    fn training_preconditions() {
        assert!(train_tagger(&[]).is_err());
        assert!(train_tagger(&[vec![]]).is_err());
        assert!(train_tagger_with_k(&[sent(&[("a", "x")])], 0.0).is_err());
    }

    #[test]
    fn serialization_is_deterministic_and_lossless() {
        let corpus = vec![
            sent(&[("hw", "pron"), ("ktb", "verb")]),
            sent(&[("fy", "prep"), ("ktb", "noun"), (".", "punc")]),
        ];
        let a = train_tagger(&corpus).unwrap();
        let b = train_tagger(&corpus).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = TaggerModel::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn prediction_preconditions() {
        let model = train_tagger(&[sent(&[("a", "x")])]).unwrap();
        assert!(model.predict_tags::<&str>(&[]).is_err());
        let untrained =
            TaggerModel::from_json(r#"{"k":0.1,"sentences":0,"tags":[],"initial":{},"transitions":{},"emissions":{}}"#)
                .unwrap();
        assert!(matches!(untrained.predict_tags(&["a"]), Err(Error::UntrainedModel)));
    }

    #[test]
    fn oov_word_is_decided_by_context() {
        let mut corpus = Vec::new();
        for _ in 0..5 {
            corpus.push(sent(&[("fy", "prep"), ("byt", "noun")]));
            corpus.push(sent(&[("hw", "pron"), ("ktb", "verb")]));
        }
        let model = train_tagger(&corpus).unwrap();
        let post = model.predict_tags(&["fy", "zzz"]).unwrap();
        assert_eq!(post[1].argmax(), Some(&tag("noun")));
        let post = model.predict_tags(&["hw", "zzz"]).unwrap();
        assert_eq!(post[1].argmax(), Some(&tag("verb")));
    }

    #[test]
    fn corpus_file_format() {
        let text = "hw\tpron:na:na:na:na:na:na:na:na:na:na\nktb\tverb:p:3:m:s:a:i:na:na:na:na\n\n\nfy\tprep:na:na:na:na:na:na:na:na:na:na\n";
        let corpus = parse_corpus(text).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[0][1].0, "ktb");
        match parse_corpus("hw pron\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_corpus("a\tb\n\nc\tnoun"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
