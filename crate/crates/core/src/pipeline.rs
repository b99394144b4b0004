//! End-to-end processing of one request: pick a dialect, analyze and rank
//! every word, and render the text views.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dialect::Dialect;
use crate::did::{DidModel, DidResult};
use crate::disambiguator::{disambiguate, DisambiguatedWord};
use crate::error::{Error, Result};
use crate::morph_db::MorphDatabase;
use crate::script::Script;
use crate::tagger::TaggerModel;

/// A user-selected dialect, or automatic detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DialectChoice {
    Auto,
    Fixed(Dialect),
}

impl FromStr for DialectChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(DialectChoice::Auto),
            other => other.parse().map(DialectChoice::Fixed),
        }
    }
}

impl fmt::Display for DialectChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DialectChoice::Auto => f.write_str("auto"),
            DialectChoice::Fixed(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    DiacPos,
    Tokenized,
    Lemmatized,
}

impl View {
    pub const ALL: [View; 3] = [View::DiacPos, View::Tokenized, View::Lemmatized];

    pub fn id(self) -> &'static str {
        match self {
            View::DiacPos => "diac_pos",
            View::Tokenized => "tokenized",
            View::Lemmatized => "lemmatized",
        }
    }

    /// Renders the top analysis of every word, space-joined.
    ///
    /// * `diac_pos`: `diac/POS`, or `raw/POS` when the dialect's resources
    ///   carry no diacritics.
    /// * `tokenized`: the tokens with their `+` markers, concatenated.
    /// * `lemmatized`: the lemma.
    pub fn render(self, words: &[DisambiguatedWord], supports_diacritization: bool) -> String {
        let render_word = |w: &DisambiguatedWord| {
            let top = w.top();
            match self {
                View::DiacPos if supports_diacritization => format!("{}/{}", top.diac, top.pos()),
                View::DiacPos => format!("{}/{}", w.raw, top.pos()),
                View::Tokenized => top.tokens.concat(),
                View::Lemmatized => top.lemma.clone(),
            }
        };
        words.iter().map(render_word).collect::<Vec<_>>().join(" ")
    }
}

impl FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        View::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::UnknownView(s.to_string()))
    }
}

pub fn render_view(words: &[DisambiguatedWord], view_id: &str, supports_diacritization: bool) -> Result<String> {
    Ok(view_id.parse::<View>()?.render(words, supports_diacritization))
}

/// Splits on whitespace, then peels leading and trailing punctuation runs
/// off each chunk as separate tokens. Punctuation is judged in Arabic script.
pub fn word_tokenize(text: &str) -> Vec<String> {
    word_tokenize_in(text, Script::Arabic)
}

/// [`word_tokenize`] for text written in `script`.
pub fn word_tokenize_in(text: &str, script: Script) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let is_punct = |c: char| script.is_punctuation(c);
        let body = chunk.trim_matches(is_punct);
        if body.is_empty() {
            out.push(chunk.to_string());
            continue;
        }
        let start = chunk.len() - chunk.trim_start_matches(is_punct).len();
        let end = chunk.trim_end_matches(is_punct).len();
        if start > 0 {
            out.push(chunk[..start].to_string());
        }
        out.push(body.to_string());
        if end < chunk.len() {
            out.push(chunk[end..].to_string());
        }
    }
    out
}

/// Anything that can pick a dialect for a text.
pub trait DialectIdentifier: Send + Sync {
    fn identify(&self, text: &str) -> Result<DidResult>;
}

impl DialectIdentifier for DidModel {
    fn identify(&self, text: &str) -> Result<DidResult> {
        crate::did::identify(text, self)
    }
}

#[derive(Debug, Clone)]
pub struct DialectResources {
    pub db: MorphDatabase,
    pub tagger: TaggerModel,
}

/// Loaded per-dialect analyzers and taggers.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: BTreeMap<Dialect, DialectResources>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a database and tagger under the database's own dialect.
    pub fn insert(&mut self, db: MorphDatabase, tagger: TaggerModel) -> Option<DialectResources> {
        self.entries.insert(db.dialect, DialectResources { db, tagger })
    }

    pub fn get(&self, dialect: Dialect) -> Option<&DialectResources> {
        self.entries.get(&dialect)
    }

    pub fn dialects(&self) -> impl Iterator<Item = Dialect> + '_ {
        self.entries.keys().copied()
    }

    pub fn is_complete(&self) -> bool {
        Dialect::ALL.iter().all(|d| self.entries.contains_key(d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentResult {
    pub dialect_used: Dialect,
    /// Present only when the dialect was detected automatically.
    pub dialect_scores: Option<BTreeMap<String, f64>>,
    pub words: Vec<DisambiguatedWord>,
    pub views: BTreeMap<View, String>,
}

pub struct Pipeline {
    registry: Registry,
    identifier: Option<Box<dyn DialectIdentifier>>,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline")
            .field("registry", &self.registry)
            .field("identifier", &self.identifier.is_some())
            .finish()
    }
}

impl Pipeline {
    pub fn new(registry: Registry, identifier: Option<Box<dyn DialectIdentifier>>) -> Self {
        Pipeline { registry, identifier }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn has_identifier(&self) -> bool {
        self.identifier.is_some()
    }

    pub fn process(&self, text: &str, choice: DialectChoice) -> Result<DocumentResult> {
        if text.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let (dialect, scores) = match choice {
            DialectChoice::Fixed(d) => (d, None),
            DialectChoice::Auto => {
                let identifier = self.identifier.as_ref().ok_or(Error::UntrainedModel)?;
                let result = identifier.identify(text)?;
                (result.dialect()?, Some(result.scores))
            }
        };
        let resources = self
            .registry
            .get(dialect)
            .ok_or_else(|| Error::DialectNotLoaded(dialect.to_string()))?;
        let tokens = word_tokenize_in(text, resources.db.script);
        let words = disambiguate(&tokens, &resources.db, &resources.tagger)?;
        let views = View::ALL
            .into_iter()
            .map(|v| (v, v.render(&words, resources.db.supports_diacritization)))
            .collect();
        Ok(DocumentResult {
            dialect_used: dialect,
            dialect_scores: scores,
            words,
            views,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morph_db::load_db;
    use crate::tagger::{train_tagger, CombinedTag};

    #[test]
    fn tokenizer_examples() {
        assert!(word_tokenize("").is_empty());
        assert_eq!(word_tokenize("ktb wktbt"), ["ktb", "wktbt"]);
        assert_eq!(word_tokenize("ktb ."), ["ktb", "."]);
        assert_eq!(word_tokenize("(ktb), x"), ["(", "ktb", "),", "x"]);
        assert_eq!(word_tokenize("a.b ..."), ["a.b", "..."]);
        assert_eq!(word_tokenize(" \t\n"), Vec::<String>::new());
    }

    #[test]
    fn buckwalter_letters_are_not_split() {
        assert_eq!(word_tokenize_in(">kl.", Script::Buckwalter), [">kl", "."]);
        assert_eq!(word_tokenize_in(">kl.", Script::Arabic), [">", "kl", "."]);
        assert_eq!(
            word_tokenize_in("\u{0643}\u{061F}", Script::Arabic),
            ["\u{0643}", "\u{061F}"]
        );
    }

    #[test]
    fn choice_parsing() {
        assert_eq!("auto".parse::<DialectChoice>().unwrap(), DialectChoice::Auto);
        assert_eq!(
            "glf".parse::<DialectChoice>().unwrap(),
            DialectChoice::Fixed(Dialect::Glf)
        );
        assert!("xx".parse::<DialectChoice>().is_err());
        assert!("MSA".parse::<DialectChoice>().is_err());
    }

    fn toy_words(text: &str) -> Vec<DisambiguatedWord> {
        let db = load_db(include_str!("../fixtures/toy-msa.json")).unwrap();
        let tag: CombinedTag = "verb:p:3:f:s:a:i:na:na:conj_wa:na".parse().unwrap();
        let model = train_tagger(&[vec![("wktbt".into(), tag)]]).unwrap();
        disambiguate(&word_tokenize_in(text, Script::Buckwalter), &db, &model).unwrap()
    }

    #[test]
    fn views_of_toy_word() {
        let words = toy_words("wktbt");
        assert_eq!(render_view(&words, "tokenized", true).unwrap(), "wa+katab+at");
        assert_eq!(render_view(&words, "lemmatized", true).unwrap(), "katab");
        assert_eq!(render_view(&words, "diac_pos", true).unwrap(), "wakatabat/verb");
        assert_eq!(render_view(&words, "diac_pos", false).unwrap(), "wktbt/verb");
        assert!(matches!(render_view(&words, "gloss", true), Err(Error::UnknownView(_))));
    }

    #[test]
    fn undiacritized_backoff_view() {
        let words = toy_words("xyz .");
        assert_eq!(render_view(&words, "diac_pos", false).unwrap(), "xyz/noun_prop ./punc");
    }
}
