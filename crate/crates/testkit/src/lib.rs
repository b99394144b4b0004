//! Test-only oracles and synthetic data for morphdis.
//!
//! The oracles recompute results from raw inputs (lexicon entries, training
//! corpora) by exhaustive enumeration or direct counting. They share data
//! types with the library but none of its indexing, inference or scoring
//! code.

use std::collections::{BTreeMap, BTreeSet};

use morphdis_core::did::DidConfig;
use morphdis_core::morph_db::{MorphDatabase, MorphEntry};
use morphdis_core::tagger::{CombinedTag, TaggedSentence};
use morphdis_core::{Analysis, Feature};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every field of an analysis that identifies it, in comparable form.
pub type ReadingKey = (String, String, String, Vec<String>, Vec<String>);

pub fn reading_key(a: &Analysis) -> ReadingKey {
    (
        a.diac.clone(),
        a.lemma.clone(),
        a.gloss.clone(),
        a.features.values().to_vec(),
        a.tokens.clone(),
    )
}

fn merged_key(p: &MorphEntry, s: &MorphEntry, x: &MorphEntry) -> ReadingKey {
    let mut feats: BTreeMap<Feature, String> = BTreeMap::new();
    for entry in [s, p, x] {
        for (f, v) in &entry.features {
            feats.insert(*f, v.clone());
        }
    }
    let values = Feature::ALL
        .iter()
        .map(|f| feats.get(f).cloned().unwrap_or_else(|| "na".to_string()))
        .collect();
    let mut tokens = p.tokens.clone();
    tokens.extend(s.tokens.iter().cloned());
    tokens.extend(x.tokens.iter().cloned());
    (
        format!("{}{}{}", p.diac, s.diac, x.diac),
        s.lemma.clone().unwrap_or_default(),
        s.gloss.clone().unwrap_or_default(),
        values,
        tokens,
    )
}

fn licensed(db: &MorphDatabase, p: &MorphEntry, s: &MorphEntry, x: &MorphEntry) -> bool {
    db.compat_ab.contains(&(p.category.clone(), s.category.clone()))
        && db.compat_bc.contains(&(s.category.clone(), x.category.clone()))
        && db.compat_ac.contains(&(p.category.clone(), x.category.clone()))
}

/// Exhaustive analysis: every split of the match key against every
/// (prefix, stem, suffix) entry triple.
pub fn brute_force_analyses(word: &str, db: &MorphDatabase) -> BTreeSet<ReadingKey> {
    let key: Vec<char> = db.script.match_key(word.trim()).chars().collect();
    let n = key.len();
    let mut out = BTreeSet::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let pf: String = key[..i].iter().collect();
            let sf: String = key[i..j].iter().collect();
            let xf: String = key[j..].iter().collect();
            for p in db.prefixes.entries() {
                for s in db.stems.entries() {
                    for x in db.suffixes.entries() {
                        if p.match_form == pf && s.match_form == sf && x.match_form == xf && licensed(db, p, s, x) {
                            out.insert(merged_key(p, s, x));
                        }
                    }
                }
            }
        }
    }
    out
}

/// One licensed reading of the lexicon with its undiacritized surface.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Reading {
    pub surface: String,
    pub tag: CombinedTag,
}

/// All licensed (prefix, stem, suffix) readings in the database.
pub fn all_readings(db: &MorphDatabase) -> Vec<Reading> {
    let mut out = BTreeSet::new();
    for p in db.prefixes.entries() {
        for s in db.stems.entries() {
            for x in db.suffixes.entries() {
                if licensed(db, p, s, x) {
                    let (_, _, _, values, _) = merged_key(p, s, x);
                    out.insert(Reading {
                        surface: format!("{}{}{}", p.match_form, s.match_form, x.match_form),
                        tag: values.join(":").parse().expect("lexicon values form a valid tag"),
                    });
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Enumerates every tag sequence of an add-k bigram HMM rebuilt from raw
/// corpus counts.
pub struct HmmOracle {
    k: f64,
    tags: Vec<CombinedTag>,
    sentences: f64,
    initial: BTreeMap<CombinedTag, f64>,
    transitions: BTreeMap<(CombinedTag, CombinedTag), f64>,
    from_totals: BTreeMap<CombinedTag, f64>,
    emissions: BTreeMap<(String, CombinedTag), f64>,
    tag_totals: BTreeMap<CombinedTag, f64>,
    vocab: BTreeSet<String>,
}

impl HmmOracle {
    pub fn from_corpus(corpus: &[TaggedSentence], k: f64) -> Self {
        let mut o = HmmOracle {
            k,
            tags: Vec::new(),
            sentences: corpus.len() as f64,
            initial: BTreeMap::new(),
            transitions: BTreeMap::new(),
            from_totals: BTreeMap::new(),
            emissions: BTreeMap::new(),
            tag_totals: BTreeMap::new(),
            vocab: BTreeSet::new(),
        };
        let mut tags = BTreeSet::new();
        for sentence in corpus {
            *o.initial.entry(sentence[0].1.clone()).or_default() += 1.0;
            for (i, (word, tag)) in sentence.iter().enumerate() {
                tags.insert(tag.clone());
                o.vocab.insert(word.clone());
                *o.emissions.entry((word.clone(), tag.clone())).or_default() += 1.0;
                *o.tag_totals.entry(tag.clone()).or_default() += 1.0;
                if let Some((_, next)) = sentence.get(i + 1) {
                    *o.transitions.entry((tag.clone(), next.clone())).or_default() += 1.0;
                    *o.from_totals.entry(tag.clone()).or_default() += 1.0;
                }
            }
        }
        o.tags = tags.into_iter().collect();
        o
    }

    pub fn tags(&self) -> &[CombinedTag] {
        &self.tags
    }

    fn p_init(&self, t: &CombinedTag) -> f64 {
        let n = self.tags.len() as f64;
        (self.initial.get(t).copied().unwrap_or(0.0) + self.k) / (self.sentences + self.k * n)
    }

    fn p_trans(&self, a: &CombinedTag, b: &CombinedTag) -> f64 {
        let n = self.tags.len() as f64;
        let c = self.transitions.get(&(a.clone(), b.clone())).copied().unwrap_or(0.0);
        (c + self.k) / (self.from_totals.get(a).copied().unwrap_or(0.0) + self.k * n)
    }

    fn p_emit(&self, w: &str, t: &CombinedTag) -> f64 {
        let v = self.vocab.len() as f64 + 1.0;
        if !self.vocab.contains(w) {
            return 1.0 / v;
        }
        let c = self.emissions.get(&(w.to_string(), t.clone())).copied().unwrap_or(0.0);
        (c + self.k) / (self.tag_totals.get(t).copied().unwrap_or(0.0) + self.k * v)
    }

    /// Posterior marginals per position by summing over all `T^len` paths.
    pub fn posteriors(&self, sentence: &[&str]) -> Vec<BTreeMap<CombinedTag, f64>> {
        let n = self.tags.len();
        let len = sentence.len();
        let mut marginals = vec![vec![0.0; n]; len];
        let mut total = 0.0;
        let mut path = vec![0usize; len];
        loop {
            let mut p = self.p_init(&self.tags[path[0]]) * self.p_emit(sentence[0], &self.tags[path[0]]);
            for i in 1..len {
                p *= self.p_trans(&self.tags[path[i - 1]], &self.tags[path[i]])
                    * self.p_emit(sentence[i], &self.tags[path[i]]);
            }
            total += p;
            for (i, &t) in path.iter().enumerate() {
                marginals[i][t] += p;
            }
            // Odometer increment.
            let mut pos = len;
            loop {
                if pos == 0 {
                    return marginals
                        .into_iter()
                        .map(|row| {
                            self.tags
                                .iter()
                                .cloned()
                                .zip(row.into_iter().map(|m| m / total))
                                .collect()
                        })
                        .collect();
                }
                pos -= 1;
                path[pos] += 1;
                if path[pos] < n {
                    break;
                }
                path[pos] = 0;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Sym {
    Start,
    End,
    Item(String),
}

/// Naive Bayes + LM fusion scores recomputed from the raw training corpus.
pub fn did_log_scores(corpus: &[(String, String)], config: &DidConfig, text: &str) -> BTreeMap<String, f64> {
    let labels: BTreeSet<&str> = corpus.iter().map(|(l, _)| l.as_str()).collect();
    let total = corpus.len() as f64;
    let mut out = BTreeMap::new();

    let extractors: [fn(&str) -> Vec<String>; 4] = [
        |t| t.split_whitespace().map(String::from).collect(),
        |t| char_ngrams(t, 1),
        |t| char_ngrams(t, 2),
        |t| char_ngrams(t, 3),
    ];
    let vocabs: Vec<BTreeSet<String>> = extractors
        .iter()
        .map(|ex| corpus.iter().flat_map(|(_, s)| ex(s)).collect())
        .collect();

    for label in labels {
        let texts: Vec<&str> = corpus
            .iter()
            .filter(|(l, _)| l == label)
            .map(|(_, s)| s.as_str())
            .collect();
        let mut score = (texts.len() as f64 / total).ln();
        if !text.trim().is_empty() {
            for (ex, vocab) in extractors.iter().zip(&vocabs) {
                let mut counts: BTreeMap<String, f64> = BTreeMap::new();
                for s in &texts {
                    for f in ex(s) {
                        *counts.entry(f).or_default() += 1.0;
                    }
                }
                let n: f64 = counts.values().sum();
                for f in ex(text) {
                    let c = counts.get(&f).copied().unwrap_or(0.0);
                    score += ((c + config.k) / (n + config.k * (vocab.len() as f64 + 1.0))).ln();
                }
            }
            if config.lambda > 0.0 {
                let chars = |t: &str| t.chars().map(String::from).collect::<Vec<_>>();
                let words = |t: &str| t.split_whitespace().map(String::from).collect::<Vec<_>>();
                let char_lm = lm_logprob(&texts, chars, config.char_lm_order, config.lm_k, text);
                let word_lm = lm_logprob(&texts, words, 1, config.lm_k, text);
                score += config.lambda * (char_lm + word_lm);
            }
        }
        out.insert(label.to_string(), score);
    }
    out
}

fn char_ngrams(text: &str, n: usize) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < n {
        return Vec::new();
    }
    (0..=chars.len() - n)
        .map(|i| chars[i..i + n].iter().collect())
        .collect()
}

fn lm_events(symbols: Vec<String>, order: usize) -> Vec<(Vec<Sym>, Sym)> {
    let mut seq = vec![Sym::Start; order - 1];
    seq.extend(symbols.into_iter().map(Sym::Item));
    seq.push(Sym::End);
    (order - 1..seq.len())
        .map(|i| (seq[i + 1 - order..i].to_vec(), seq[i].clone()))
        .collect()
}

fn lm_logprob(train: &[&str], split: impl Fn(&str) -> Vec<String>, order: usize, k: f64, text: &str) -> f64 {
    let mut counts: BTreeMap<(Vec<Sym>, Sym), f64> = BTreeMap::new();
    let mut history_totals: BTreeMap<Vec<Sym>, f64> = BTreeMap::new();
    let mut vocab = BTreeSet::new();
    for t in train {
        for (h, s) in lm_events(split(t), order) {
            vocab.insert(s.clone());
            *history_totals.entry(h.clone()).or_default() += 1.0;
            *counts.entry((h, s)).or_default() += 1.0;
        }
    }
    let v = vocab.len() as f64 + 1.0;
    lm_events(split(text), order)
        .into_iter()
        .map(|(h, s)| {
            let c = counts.get(&(h.clone(), s)).copied().unwrap_or(0.0);
            let n = history_totals.get(&h).copied().unwrap_or(0.0);
            ((c + k) / (n + k * v)).ln()
        })
        .sum()
}

const LETTERS: &[char] = &[
    'A', 'b', 't', 'v', 'j', 'H', 'x', 'd', 'r', 'z', 's', '$', 'S', 'D', 'T', 'Z', 'E', 'g', 'f', 'q', 'k', 'l', 'm',
    'n', 'h', 'w', 'y',
];

fn random_word(rng: &mut impl Rng) -> String {
    let len = rng.random_range(3..=7);
    (0..len).map(|_| *LETTERS.choose(rng).unwrap()).collect()
}

/// Synthetic labelled sentences for dialect identification.
pub struct DidCorpora {
    pub train: Vec<(String, String)>,
    pub test: Vec<(String, String)>,
}

/// Each label gets a vocabulary of `vocab_size` words of which
/// `shared_fraction` come from a pool common to all labels; sentences draw
/// words from a label-specific Zipfian distribution over that vocabulary.
pub fn synthetic_did_corpora(
    seed: u64,
    labels: &[&str],
    vocab_size: usize,
    shared_fraction: f64,
    train_per_label: usize,
    test_per_label: usize,
) -> DidCorpora {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared_n = (vocab_size as f64 * shared_fraction).round() as usize;
    let mut used = BTreeSet::new();
    let mut fresh = |rng: &mut ChaCha8Rng| loop {
        let w = random_word(rng);
        if used.insert(w.clone()) {
            return w;
        }
    };
    let shared: Vec<String> = (0..shared_n).map(|_| fresh(&mut rng)).collect();
    let mut corpora = DidCorpora {
        train: Vec::new(),
        test: Vec::new(),
    };
    for label in labels {
        let mut vocab = shared.clone();
        vocab.extend((shared_n..vocab_size).map(|_| fresh(&mut rng)));
        // Label-specific rank order, so the shared words have different
        // frequencies per label.
        for i in (1..vocab.len()).rev() {
            let j = rng.random_range(0..=i);
            vocab.swap(i, j);
        }
        let weights: Vec<f64> = (1..=vocab.len()).map(|r| 1.0 / r as f64).collect();
        let dist = rand::distr::weighted::WeightedIndex::new(&weights).unwrap();
        let sentence = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(4..=10);
            (0..len)
                .map(|_| vocab[rng.sample(&dist)].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        for _ in 0..train_per_label {
            corpora.train.push((label.to_string(), sentence(&mut rng)));
        }
        for _ in 0..test_per_label {
            corpora.test.push((label.to_string(), sentence(&mut rng)));
        }
    }
    corpora
}

/// A Markov chain over combined tags used to generate gold sequences.
pub struct TagChain {
    pub tags: Vec<CombinedTag>,
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
}

impl TagChain {
    /// Uniform start; from every tag, `peak` of the mass goes to one
    /// randomly chosen successor and the rest is spread uniformly.
    pub fn peaked(tags: Vec<CombinedTag>, peak: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = tags.len();
        let transitions = (0..n)
            .map(|_| {
                let favourite = rng.random_range(0..n);
                (0..n)
                    .map(|j| (1.0 - peak) / n as f64 + if j == favourite { peak } else { 0.0 })
                    .collect()
            })
            .collect();
        TagChain {
            tags,
            initial: vec![1.0 / n as f64; n],
            transitions,
        }
    }

    /// Gold sentences: tags from the chain, each surface drawn uniformly
    /// from the lexicon readings carrying that tag.
    pub fn sample(&self, readings: &[Reading], sentences: usize, seed: u64) -> Vec<TaggedSentence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let by_tag: Vec<Vec<&Reading>> = self
            .tags
            .iter()
            .map(|t| readings.iter().filter(|r| &r.tag == t).collect())
            .collect();
        let pick = |rng: &mut ChaCha8Rng, probs: &[f64]| {
            rand::distr::weighted::WeightedIndex::new(probs)
                .map(|d| rng.sample(d))
                .unwrap()
        };
        (0..sentences)
            .map(|_| {
                let len = rng.random_range(3..=8);
                let mut out = Vec::with_capacity(len);
                let mut tag = pick(&mut rng, &self.initial);
                for i in 0..len {
                    if i > 0 {
                        tag = pick(&mut rng, &self.transitions[tag]);
                    }
                    let reading = by_tag[tag].choose(&mut rng).expect("every chain tag has a reading");
                    out.push((reading.surface.clone(), reading.tag.clone()));
                }
                out
            })
            .collect()
    }
}
