//! Dialect morphological databases: prefix, stem and suffix tables plus the
//! three pairwise category compatibility tables.
//!
//! A database is read from a JSON document:
//!
//! ```json
//! {
//!   "meta": {"dialect": "msa", "supports_diacritization": true, "script": "buckwalter"},
//!   "prefixes": [{"id": "P-WA", "match_form": "w", "diac": "wa", "category": "P1",
//!                 "features": {"prc": "conj_wa"}, "tokens": ["wa+"]}],
//!   "stems": [...],
//!   "suffixes": [...],
//!   "compat_ab": [["P1", "S-PV"]],
//!   "compat_bc": [...],
//!   "compat_ac": [...]
//! }
//! ```
//!
//! Null affixes are ordinary entries with an empty `match_form`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dialect::Dialect;
use crate::error::{Error, Result, Violation};
use crate::features::{check_value, PartialFeatures};
use crate::script::Script;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub dialect: Dialect,
    pub supports_diacritization: bool,
    #[serde(default)]
    pub script: Script,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub match_form: String,
    pub diac: String,
    pub category: String,
    #[serde(default)]
    pub features: PartialFeatures,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss: Option<String>,
    #[serde(default)]
    pub tokens: Vec<String>,
}

impl MorphEntry {
    /// Everything except the optional id, which is not part of entry identity.
    fn content(&self) -> impl PartialEq + '_ {
        (
            &self.match_form,
            &self.diac,
            &self.category,
            &self.features,
            &self.lemma,
            &self.gloss,
            &self.tokens,
        )
    }
}

/// The on-disk form of a database, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatabaseDocument {
    pub meta: Meta,
    #[serde(default)]
    pub prefixes: Vec<MorphEntry>,
    #[serde(default)]
    pub stems: Vec<MorphEntry>,
    #[serde(default)]
    pub suffixes: Vec<MorphEntry>,
    #[serde(default)]
    pub compat_ab: Vec<(String, String)>,
    #[serde(default)]
    pub compat_bc: Vec<(String, String)>,
    #[serde(default)]
    pub compat_ac: Vec<(String, String)>,
}

impl DatabaseDocument {
    pub fn from_json(source: &str) -> Result<Self> {
        serde_json::from_str(source).map_err(Error::parse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Prefix,
    Stem,
    Suffix,
}

impl EntryKind {
    fn table_name(self) -> &'static str {
        match self {
            EntryKind::Prefix => "prefixes",
            EntryKind::Stem => "stems",
            EntryKind::Suffix => "suffixes",
        }
    }
}

/// Entries of one kind, indexed by match form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryTable {
    entries: Vec<MorphEntry>,
    index: HashMap<String, Vec<usize>>,
}

impl EntryTable {
    fn new(entries: Vec<MorphEntry>) -> Self {
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, entry) in entries.iter().enumerate() {
            index.entry(entry.match_form.clone()).or_default().push(i);
        }
        EntryTable { entries, index }
    }

    pub fn entries(&self) -> &[MorphEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup<'a>(&'a self, match_form: &str) -> impl Iterator<Item = &'a MorphEntry> + 'a {
        self.index
            .get(match_form)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
    }

    fn max_form_len(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.match_form.chars().count())
            .max()
            .unwrap_or(0)
    }
}

pub type CompatTable = BTreeSet<(String, String)>;

/// A validated, immutable dialect database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphDatabase {
    pub dialect: Dialect,
    pub supports_diacritization: bool,
    pub script: Script,
    pub prefixes: EntryTable,
    pub stems: EntryTable,
    pub suffixes: EntryTable,
    pub compat_ab: CompatTable,
    pub compat_bc: CompatTable,
    pub compat_ac: CompatTable,
    pub max_prefix_len: usize,
    pub max_suffix_len: usize,
}

/// Parses and validates a database document.
pub fn load_db(source: &str) -> Result<MorphDatabase> {
    MorphDatabase::from_document(DatabaseDocument::from_json(source)?)
}

impl MorphDatabase {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_db(&std::fs::read_to_string(path)?)
    }

    pub fn from_document(doc: DatabaseDocument) -> Result<Self> {
        let violations = validate(&doc);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let prefixes = EntryTable::new(doc.prefixes);
        let stems = EntryTable::new(doc.stems);
        let suffixes = EntryTable::new(doc.suffixes);
        Ok(MorphDatabase {
            dialect: doc.meta.dialect,
            supports_diacritization: doc.meta.supports_diacritization,
            script: doc.meta.script,
            max_prefix_len: prefixes.max_form_len(),
            max_suffix_len: suffixes.max_form_len(),
            prefixes,
            stems,
            suffixes,
            compat_ab: doc.compat_ab.into_iter().collect(),
            compat_bc: doc.compat_bc.into_iter().collect(),
            compat_ac: doc.compat_ac.into_iter().collect(),
        })
    }

    pub fn capabilities(&self) -> (Dialect, bool) {
        db_capabilities(self)
    }

    /// Whether a prefix, stem and suffix category triple is licensed by all
    /// three compatibility tables.
    pub fn compatible(&self, prefix: &str, stem: &str, suffix: &str) -> bool {
        let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
        self.compat_ab.contains(&pair(prefix, stem))
            && self.compat_bc.contains(&pair(stem, suffix))
            && self.compat_ac.contains(&pair(prefix, suffix))
    }
}

pub fn db_capabilities(db: &MorphDatabase) -> (Dialect, bool) {
    (db.dialect, db.supports_diacritization)
}

/// Checks every database rule and returns all violations found.
pub fn validate(doc: &DatabaseDocument) -> Vec<Violation> {
    let mut out = Vec::new();
    let script = doc.meta.script;

    if doc.stems.is_empty() {
        out.push(Violation {
            location: "stems".into(),
            rule: "no stems".into(),
        });
    }

    let tables = [
        (EntryKind::Prefix, &doc.prefixes),
        (EntryKind::Stem, &doc.stems),
        (EntryKind::Suffix, &doc.suffixes),
    ];
    let mut ids: HashMap<&str, String> = HashMap::new();
    for (kind, entries) in tables {
        for (i, entry) in entries.iter().enumerate() {
            let location = entry_location(kind, i, entry);
            let mut fail = |rule: String| {
                out.push(Violation {
                    location: location.clone(),
                    rule,
                })
            };
            check_entry(kind, entry, script, &mut fail);
            if let Some(dup) = entries[..i].iter().position(|e| e.content() == entry.content()) {
                fail(format!(
                    "duplicate entry (same as {})",
                    entry_location(kind, dup, &entries[dup])
                ));
            }
            if let Some(id) = entry.id.as_deref() {
                if let Some(first) = ids.get(id) {
                    fail(format!("duplicate id {id:?} (first used at {first})"));
                } else {
                    ids.insert(id, location.clone());
                }
            }
        }
    }

    let categories =
        |entries: &[MorphEntry]| -> BTreeSet<String> { entries.iter().map(|e| e.category.clone()).collect() };
    let prefix_cats = categories(&doc.prefixes);
    let stem_cats = categories(&doc.stems);
    let suffix_cats = categories(&doc.suffixes);
    let compat = [
        (
            "compat_ab",
            &doc.compat_ab,
            (&prefix_cats, "prefix"),
            (&stem_cats, "stem"),
        ),
        (
            "compat_bc",
            &doc.compat_bc,
            (&stem_cats, "stem"),
            (&suffix_cats, "suffix"),
        ),
        (
            "compat_ac",
            &doc.compat_ac,
            (&prefix_cats, "prefix"),
            (&suffix_cats, "suffix"),
        ),
    ];
    for (name, pairs, (left, left_kind), (right, right_kind)) in compat {
        let mut seen = BTreeSet::new();
        for (i, (a, b)) in pairs.iter().enumerate() {
            let location = format!("{name}[{i}]");
            if !left.contains(a) {
                out.push(Violation {
                    location: location.clone(),
                    rule: format!("category {a:?} appears on no {left_kind}"),
                });
            }
            if !right.contains(b) {
                out.push(Violation {
                    location: location.clone(),
                    rule: format!("category {b:?} appears on no {right_kind}"),
                });
            }
            if !seen.insert((a, b)) {
                out.push(Violation {
                    location,
                    rule: format!("duplicate pair ({a}, {b})"),
                });
            }
        }
    }
    out
}

fn entry_location(kind: EntryKind, index: usize, entry: &MorphEntry) -> String {
    match &entry.id {
        Some(id) => format!("{}[{index}] {id}", kind.table_name()),
        None => format!("{}[{index}]", kind.table_name()),
    }
}

fn check_entry(kind: EntryKind, entry: &MorphEntry, script: Script, fail: &mut impl FnMut(String)) {
    if entry.category.is_empty() {
        fail("empty category".into());
    }
    for (feature, value) in &entry.features {
        if let Err(e) = check_value(value) {
            fail(format!("feature {feature}: {e}"));
        }
    }

    let mut surface = String::new();
    for token in &entry.tokens {
        let (body, ok) = match kind {
            EntryKind::Prefix => (
                token.strip_suffix('+').unwrap_or(token),
                token.ends_with('+') && !token.starts_with('+'),
            ),
            EntryKind::Suffix => (
                token.strip_prefix('+').unwrap_or(token),
                token.starts_with('+') && !token.ends_with('+'),
            ),
            EntryKind::Stem => (token.as_str(), true),
        };
        if !ok || body.is_empty() || body.contains('+') {
            fail(format!("malformed {} token {token:?}", kind_noun(kind)));
        }
        surface.push_str(body);
    }
    if surface != entry.diac {
        fail(format!(
            "tokens {:?} do not concatenate to diac {:?}",
            entry.tokens, entry.diac
        ));
    }

    let key = script.match_key(&entry.diac);
    if key != entry.match_form {
        fail(format!(
            "match_form {:?} differs from normalized undiacritized diac {key:?}",
            entry.match_form
        ));
    }

    match kind {
        EntryKind::Stem => {
            if entry.match_form.is_empty() {
                fail("stem with empty match_form".into());
            }
            if entry.lemma.as_deref().is_none_or(str::is_empty) {
                fail("stem without lemma".into());
            }
            if entry.gloss.as_deref().is_none_or(str::is_empty) {
                fail("stem without gloss".into());
            }
        }
        EntryKind::Prefix | EntryKind::Suffix => {
            if entry.lemma.is_some() || entry.gloss.is_some() {
                fail(format!("{} carries lemma or gloss", kind_noun(kind)));
            }
        }
    }
}

fn kind_noun(kind: EntryKind) -> &'static str {
    match kind {
        EntryKind::Prefix => "prefix",
        EntryKind::Stem => "stem",
        EntryKind::Suffix => "suffix",
    }
}
