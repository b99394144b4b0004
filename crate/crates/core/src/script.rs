//! Arabic-script utilities: orthographic normalization, diacritic stripping
//! and Buckwalter transliteration.
//!
//! Lexicon lookup always happens on a *match key*: the normalized,
//! undiacritized form of a word. [`Script`] lets a database or corpus be
//! written either in Arabic script or in Buckwalter; the key is computed in
//! Arabic script and mapped back, so both encodings behave identically.

use std::collections::HashMap;
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ALEF: char = '\u{0627}';
const YA: char = '\u{064A}';

/// Fathatan through sukun: tanween, short vowels, shadda and sukun.
const DIACRITICS: std::ops::RangeInclusive<char> = '\u{064B}'..='\u{0652}';

const BUCKWALTER_TABLE: &str = include_str!("../data/buckwalter.tsv");

static DEFAULT_POLICY: LazyLock<NormalizationPolicy> = LazyLock::new(NormalizationPolicy::default);

static BUCKWALTER: LazyLock<Transliterator> =
    LazyLock::new(|| Transliterator::parse(BUCKWALTER_TABLE).expect("bundled Buckwalter table is valid"));

pub fn is_diacritic(c: char) -> bool {
    DIACRITICS.contains(&c)
}

/// Arabic comma, semicolon, question mark and the guillemets common in
/// Arabic typesetting.
fn is_arabic_punctuation(c: char) -> bool {
    matches!(
        c,
        '\u{060C}' | '\u{061B}' | '\u{061F}' | '\u{066A}' | '\u{066B}' | '\u{066C}' | '\u{06D4}' | '«' | '»'
    )
}

/// One rewrite: every character in `from` becomes `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub from: Vec<char>,
    pub to: char,
}

/// Ordered character-class rewrites applied in a single left-to-right pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationPolicy {
    rules: Vec<Rewrite>,
}

impl Default for NormalizationPolicy {
    /// Hamzated and wasla Alef forms to bare Alef, Alef Maqsura to Ya.
    /// Ta Marbuta is left alone.
    fn default() -> Self {
        NormalizationPolicy {
            rules: vec![
                Rewrite {
                    from: vec!['\u{0622}', '\u{0623}', '\u{0625}', '\u{0671}'],
                    to: ALEF,
                },
                Rewrite {
                    from: vec!['\u{0649}'],
                    to: YA,
                },
            ],
        }
    }
}

impl NormalizationPolicy {
    /// Builds a policy, rejecting rule sets that would not be idempotent or
    /// that touch diacritics.
    pub fn new(rules: Vec<Rewrite>) -> Result<Self> {
        for rule in &rules {
            if is_diacritic(rule.to) || rule.from.iter().copied().any(is_diacritic) {
                return Err(Error::invalid("normalization rules may not rewrite diacritics"));
            }
            if rules.iter().any(|r| r.from.contains(&rule.to)) {
                return Err(Error::invalid(format!(
                    "replacement {:?} is itself a rewrite target",
                    rule.to
                )));
            }
        }
        Ok(NormalizationPolicy { rules })
    }

    pub fn rules(&self) -> &[Rewrite] {
        &self.rules
    }

    pub fn apply(&self, text: &str) -> String {
        text.chars()
            .map(|c| self.rules.iter().find(|r| r.from.contains(&c)).map_or(c, |r| r.to))
            .collect()
    }
}

/// Normalizes Arabic-script text with the default policy.
pub fn normalize(text: &str) -> String {
    DEFAULT_POLICY.apply(text)
}

pub fn strip_diacritics(text: &str) -> String {
    text.chars().filter(|&c| !is_diacritic(c)).collect()
}

/// A one-to-one mapping between an ASCII romanization and Arabic code points.
#[derive(Debug, Clone)]
pub struct Transliterator {
    to_arabic: HashMap<char, char>,
    to_roman: HashMap<char, char>,
}

impl Transliterator {
    /// Parses a table of `<char> TAB <hex codepoint>` lines; `#` starts a comment.
    pub fn parse(table: &str) -> Result<Self> {
        let mut to_arabic = HashMap::new();
        let mut to_roman = HashMap::new();
        for (idx, line) in table.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let table_err = |msg: String| Error::Table { line: lineno, msg };
            let (key, hex) = line
                .split_once('\t')
                .ok_or_else(|| table_err("expected <char> TAB <hex>".into()))?;
            let mut key_chars = key.chars();
            let roman = match (key_chars.next(), key_chars.next()) {
                (Some(c), None) => c,
                _ => return Err(table_err(format!("key {key:?} is not a single character"))),
            };
            let code = u32::from_str_radix(hex.trim().trim_start_matches("U+"), 16)
                .map_err(|e| table_err(format!("bad codepoint {hex:?}: {e}")))?;
            let arabic = char::from_u32(code).ok_or_else(|| table_err(format!("{code:#x} is not a scalar value")))?;
            if to_arabic.insert(roman, arabic).is_some() {
                return Err(table_err(format!("duplicate key {roman:?}")));
            }
            if to_roman.insert(arabic, roman).is_some() {
                return Err(table_err(format!("duplicate codepoint {code:04X}")));
            }
        }
        Ok(Transliterator { to_arabic, to_roman })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The bundled Buckwalter table.
    pub fn buckwalter() -> &'static Transliterator {
        &BUCKWALTER
    }

    pub fn is_roman(&self, c: char) -> bool {
        self.to_arabic.contains_key(&c)
    }

    pub fn len(&self) -> usize {
        self.to_arabic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_arabic.is_empty()
    }

    pub fn roman_chars(&self) -> impl Iterator<Item = char> + '_ {
        self.to_arabic.keys().copied()
    }

    pub fn to_arabic(&self, text: &str) -> Result<String> {
        map_strict(text, &self.to_arabic)
    }

    pub fn to_roman(&self, text: &str) -> Result<String> {
        map_strict(text, &self.to_roman)
    }

    /// Like [`to_arabic`](Self::to_arabic) but passes unmapped characters
    /// (digits, punctuation, spaces) through unchanged.
    pub fn to_arabic_lossy(&self, text: &str) -> String {
        map_lossy(text, &self.to_arabic)
    }

    pub fn to_roman_lossy(&self, text: &str) -> String {
        map_lossy(text, &self.to_roman)
    }
}

fn map_strict(text: &str, table: &HashMap<char, char>) -> Result<String> {
    text.chars()
        .enumerate()
        .map(|(offset, ch)| table.get(&ch).copied().ok_or(Error::Unmapped { ch, offset }))
        .collect()
}

fn map_lossy(text: &str, table: &HashMap<char, char>) -> String {
    text.chars().map(|c| table.get(&c).copied().unwrap_or(c)).collect()
}

/// Buckwalter to Arabic script with the bundled table.
pub fn bw_to_ar(text: &str) -> Result<String> {
    BUCKWALTER.to_arabic(text)
}

/// Arabic script to Buckwalter with the bundled table.
pub fn ar_to_bw(text: &str) -> Result<String> {
    BUCKWALTER.to_roman(text)
}

/// The encoding a database, corpus or request is written in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    #[default]
    Arabic,
    Buckwalter,
}

impl Script {
    fn through_arabic(self, text: &str, f: impl FnOnce(&str) -> String) -> String {
        match self {
            Script::Arabic => f(text),
            Script::Buckwalter => {
                let bw = Transliterator::buckwalter();
                bw.to_roman_lossy(&f(&bw.to_arabic_lossy(text)))
            }
        }
    }

    pub fn normalize(self, text: &str) -> String {
        self.through_arabic(text, normalize)
    }

    pub fn strip_diacritics(self, text: &str) -> String {
        self.through_arabic(text, strip_diacritics)
    }

    /// Normalized, undiacritized lookup form.
    pub fn match_key(self, text: &str) -> String {
        self.through_arabic(text, |ar| strip_diacritics(&normalize(ar)))
    }

    /// Whether `c` is punctuation in this encoding. ASCII symbols that
    /// Buckwalter uses as letters (`'`, `>`, `$`, `*`, ...) are not.
    pub fn is_punctuation(self, c: char) -> bool {
        let ascii =
            c.is_ascii_punctuation() && !(self == Script::Buckwalter && Transliterator::buckwalter().is_roman(c));
        ascii || is_arabic_punctuation(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar(bw: &str) -> String {
        bw_to_ar(bw).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize(&ar(">krm")), ar("Akrm"));
        assert_eq!(normalize(&ar("<slAm")), ar("AslAm"));
        assert_eq!(normalize(&ar("|mn")), ar("Amn"));
        assert_eq!(normalize(&ar("{bn")), ar("Abn"));
        assert_eq!(normalize(&ar("ElY")), ar("Ely"));
        assert_eq!(normalize(&ar("ktb")), ar("ktb"));
        assert_eq!(normalize("ktb"), "ktb");
    }

    #[test]
    fn ta_marbuta_is_kept() {
        assert_eq!(normalize(&ar("mdrsp")), ar("mdrsp"));
    }

    #[test]
    fn strip_examples() {
        assert_eq!(strip_diacritics(&ar("kataba")), ar("ktb"));
        assert_eq!(strip_diacritics(&ar("kut~ibN")), ar("ktb"));
        assert_eq!(strip_diacritics(""), "");
        assert_eq!(strip_diacritics(&ar("ktb")), ar("ktb"));
    }

    #[test]
    fn bw_ktb_is_kaf_ta_ba() {
        assert_eq!(bw_to_ar("").unwrap(), "");
        assert_eq!(bw_to_ar("ktb").unwrap(), "\u{0643}\u{062A}\u{0628}");
        assert_eq!(ar_to_bw("\u{0643}\u{062A}\u{0628}").unwrap(), "ktb");
    }

    #[test]
    fn unmapped_character_reports_offset() {
        match bw_to_ar("kt9b") {
            Err(Error::Unmapped { ch, offset }) => {
                assert_eq!(ch, '9');
                assert_eq!(offset, 2);
            }
            other => panic!("expected unmapped error, got {other:?}"),
        }
        assert!(matches!(ar_to_bw("k"), Err(Error::Unmapped { ch: 'k', offset: 0 })));
    }

    #[test]
    fn table_rejects_duplicates() {
        assert!(matches!(
            Transliterator::parse("a\t064E\nb\t064E\n"),
            Err(Error::Table { line: 2, .. })
        ));
        assert!(matches!(
            Transliterator::parse("# c\na\t064E\na\t0628\n"),
            Err(Error::Table { line: 3, .. })
        ));
        assert!(Transliterator::parse("ab\t064E\n").is_err());
        assert!(Transliterator::parse("a 064E\n").is_err());
    }

    #[test]
    fn bundled_table_size() {
        assert_eq!(Transliterator::buckwalter().len(), 51);
    }

    #[test]
    fn policy_rejects_non_idempotent_rules() {
        let chain = vec![
            Rewrite {
                from: vec!['a'],
                to: 'b',
            },
            Rewrite {
                from: vec!['b'],
                to: 'c',
            },
        ];
        assert!(NormalizationPolicy::new(chain).is_err());
        let diac = vec![Rewrite {
            from: vec!['\u{064E}'],
            to: 'x',
        }];
        assert!(NormalizationPolicy::new(diac).is_err());
        let default = NormalizationPolicy::default();
        assert_eq!(NormalizationPolicy::new(default.rules().to_vec()).unwrap(), default);
    }

    #[test]
    fn buckwalter_script_keys() {
        assert_eq!(Script::Buckwalter.match_key("wakatabat"), "wktbt");
        assert_eq!(Script::Buckwalter.match_key(">akaluwA"), "AklwA");
        assert_eq!(Script::Buckwalter.match_key("EalaY"), "Ely");
        assert_eq!(Script::Buckwalter.match_key("..."), "...");
        assert_eq!(Script::Arabic.match_key(&ar(">akala")), ar("Akl"));
    }

    #[test]
    fn punctuation_depends_on_script() {
        assert!(Script::Arabic.is_punctuation('>'));
        assert!(!Script::Buckwalter.is_punctuation('>'));
        assert!(Script::Buckwalter.is_punctuation('.'));
        assert!(Script::Buckwalter.is_punctuation('\u{061F}'));
        assert!(!Script::Arabic.is_punctuation('\u{0643}'));
    }
}
