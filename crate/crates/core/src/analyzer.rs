//! Out-of-context analysis: every prefix + stem + suffix segmentation of a
//! word that the database licenses.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Feature, Features};
use crate::morph_db::{MorphDatabase, MorphEntry};
use crate::tagger::CombinedTag;

/// Gloss carried by the backoff reading.
pub const NO_ANALYSIS: &str = "NO_ANALYSIS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Lexicon,
    Backoff,
}

/// One morphological reading of a word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub diac: String,
    pub lemma: String,
    pub gloss: String,
    pub features: Features,
    pub tokens: Vec<String>,
    pub source: Source,
    /// Disambiguation score in [0, 1]; zero until a disambiguator sets it.
    pub score: f64,
}

impl Analysis {
    pub fn pos(&self) -> &str {
        self.features.get(Feature::Pos)
    }

    pub fn tag(&self) -> CombinedTag {
        CombinedTag::from(&self.features)
    }

    /// Orders by diac, then lemma; remaining fields only break exact ties.
    pub fn cmp_lexical(&self, other: &Self) -> Ordering {
        self.diac
            .cmp(&other.diac)
            .then_with(|| self.lemma.cmp(&other.lemma))
            .then_with(|| self.gloss.cmp(&other.gloss))
            .then_with(|| self.features.cmp(&other.features))
            .then_with(|| self.tokens.cmp(&other.tokens))
            .then_with(|| self.source.cmp(&other.source))
    }

    fn merge(prefix: &MorphEntry, stem: &MorphEntry, suffix: &MorphEntry) -> Self {
        let mut features = Features::from_partial(&stem.features);
        features.overlay(&prefix.features);
        features.overlay(&suffix.features);
        Analysis {
            diac: [&prefix.diac, &stem.diac, &suffix.diac]
                .into_iter()
                .map(String::as_str)
                .collect(),
            lemma: stem.lemma.clone().unwrap_or_default(),
            gloss: stem.gloss.clone().unwrap_or_default(),
            features,
            tokens: [&prefix.tokens, &stem.tokens, &suffix.tokens]
                .into_iter()
                .flatten()
                .cloned()
                .collect(),
            source: Source::Lexicon,
            score: 0.0,
        }
    }
}

/// Enumerates every licensed reading of `word`, deduplicated and sorted by
/// (diac, lemma).
pub fn analyze(word: &str, db: &MorphDatabase) -> Result<Vec<Analysis>> {
    let word = word.trim();
    if word.is_empty() {
        return Err(Error::invalid("cannot analyze an empty word"));
    }
    let key = db.script.match_key(word);
    // Byte offsets of every char boundary, including the end.
    let bounds: Vec<usize> = key
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(key.len()))
        .collect();
    let n = bounds.len() - 1;

    let mut out = Vec::new();
    for p_len in 0..=db.max_prefix_len.min(n) {
        for x_len in 0..=db.max_suffix_len.min(n - p_len) {
            if p_len + x_len == n {
                continue;
            }
            let (stem_start, stem_end) = (bounds[p_len], bounds[n - x_len]);
            let prefix_form = &key[..stem_start];
            let stem_form = &key[stem_start..stem_end];
            let suffix_form = &key[stem_end..];
            for stem in db.stems.lookup(stem_form) {
                for prefix in db.prefixes.lookup(prefix_form) {
                    if !db.compat_ab.contains(&(prefix.category.clone(), stem.category.clone())) {
                        continue;
                    }
                    for suffix in db.suffixes.lookup(suffix_form) {
                        if db.compatible(&prefix.category, &stem.category, &suffix.category) {
                            out.push(Analysis::merge(prefix, stem, suffix));
                        }
                    }
                }
            }
        }
    }
    out.sort_by(Analysis::cmp_lexical);
    out.dedup_by(|a, b| a.cmp_lexical(b) == Ordering::Equal);
    Ok(out)
}

/// Like [`analyze`], but a word with no lexicon reading gets a single
/// proper-noun reading (or a punctuation reading for all-punctuation tokens).
pub fn analyze_with_backoff(word: &str, db: &MorphDatabase) -> Result<Vec<Analysis>> {
    let analyses = analyze(word, db)?;
    if !analyses.is_empty() {
        return Ok(analyses);
    }
    Ok(vec![backoff(word.trim(), db)])
}

fn backoff(word: &str, db: &MorphDatabase) -> Analysis {
    let normalized = db.script.normalize(word);
    let diac = if db.supports_diacritization {
        normalized.clone()
    } else {
        word.to_string()
    };
    let pos = if word.chars().all(|c| db.script.is_punctuation(c)) {
        "punc"
    } else {
        "noun_prop"
    };
    let mut features = Features::default();
    features.set(Feature::Pos, pos);
    Analysis {
        tokens: vec![diac.clone()],
        diac,
        lemma: normalized,
        gloss: NO_ANALYSIS.to_string(),
        features,
        source: Source::Backoff,
        score: 0.0,
    }
}

/// Mean number of readings per word, backoff included.
pub fn avg_ambiguity<S: AsRef<str>>(words: &[S], db: &MorphDatabase) -> Result<f64> {
    if words.is_empty() {
        return Err(Error::invalid("average ambiguity of an empty word list"));
    }
    let mut total = 0usize;
    for word in words {
        total += analyze_with_backoff(word.as_ref(), db)?.len();
    }
    Ok(total as f64 / words.len() as f64)
}
