//! Multi-dialect Arabic morphological analysis and disambiguation.
//!
//! The pieces, bottom up:
//!
//! * [`script`]: normalization, diacritic stripping, Buckwalter transliteration.
//! * [`morph_db`]: per-dialect prefix/stem/suffix lexicons with compatibility tables.
//! * [`analyzer`]: all out-of-context readings of a word.
//! * [`tagger`]: a combined-tag HMM giving per-word tag posteriors.
//! * [`disambiguator`]: ranks each word's readings against those posteriors.
//! * [`did`]: dialect identification (naive Bayes + n-gram LM fusion).
//! * [`pipeline`]: dialect routing, tokenization and the rendered text views.

pub mod analyzer;
pub mod dialect;
pub mod did;
pub mod disambiguator;
pub mod error;
pub mod features;
pub mod lm;
pub mod morph_db;
pub mod pipeline;
pub mod script;
pub mod tagger;

pub use analyzer::{analyze, analyze_with_backoff, avg_ambiguity, Analysis, Source};
pub use dialect::Dialect;
pub use did::{identify, train_did, train_did_with, DidConfig, DidModel, DidResult};
pub use disambiguator::{disambiguate, score_analysis, DisambiguatedWord};
pub use error::{Error, Result, Violation};
pub use features::{Feature, Features};
pub use morph_db::{db_capabilities, load_db, MorphDatabase};
pub use pipeline::{
    render_view, word_tokenize, DialectChoice, DialectIdentifier, DocumentResult, Pipeline, Registry, View,
};
pub use script::{ar_to_bw, bw_to_ar, normalize, strip_diacritics, Script};
pub use tagger::{predict_tags, train_tagger, CombinedTag, TagDistribution, TaggerModel};
