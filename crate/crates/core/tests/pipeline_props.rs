use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use morphdis_core::did::parse_corpus as parse_did_corpus;
use morphdis_core::tagger::parse_corpus;
use morphdis_core::{
    train_did, train_tagger, Dialect, DialectChoice, DialectIdentifier, DidModel, DidResult, Error, MorphDatabase,
    Pipeline, Registry, Result, View,
};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn registry() -> Registry {
    let mut registry = Registry::new();
    for d in Dialect::ALL {
        let db = MorphDatabase::load(fixture(&format!("toy-{}.json", d.id()))).unwrap();
        let corpus =
            parse_corpus(&std::fs::read_to_string(fixture(&format!("tagger-{}.tsv", d.id()))).unwrap()).unwrap();
        registry.insert(db, train_tagger(&corpus).unwrap());
    }
    registry
}

fn did_model() -> DidModel {
    train_did(&parse_did_corpus(&std::fs::read_to_string(fixture("did-train.tsv")).unwrap()).unwrap()).unwrap()
}

struct Counting {
    inner: DidModel,
    calls: Arc<AtomicUsize>,
}

impl DialectIdentifier for Counting {
    fn identify(&self, text: &str) -> Result<DidResult> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.identify(text)
    }
}

fn counting_pipeline() -> (Pipeline, Arc<AtomicUsize>) {
    let calls = Arc::new(AtomicUsize::new(0));
    let identifier = Counting {
        inner: did_model(),
        calls: calls.clone(),
    };
    (Pipeline::new(registry(), Some(Box::new(identifier))), calls)
}

fn text() -> impl Strategy<Value = String> {
    let vocab = vec![
        "ktb", "wktbt", "ktbt", "hw", "fy", "$lwnk", "Azyk", "kyfk", "byktb", "xyz", ".", "?", "(ktb)",
    ];
    prop::collection::vec(prop::sample::select(vocab), 1..6).prop_map(|v| v.join(" "))
}

fn choice() -> impl Strategy<Value = DialectChoice> {
    prop_oneof![
        Just(DialectChoice::Auto),
        prop::sample::select(Dialect::ALL.to_vec()).prop_map(DialectChoice::Fixed)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_choice_never_consults_the_identifier(text in text(), choice in choice()) {
        let (pipeline, calls) = counting_pipeline();
        let result = pipeline.process(&text, choice).unwrap();
        match choice {
            DialectChoice::Fixed(d) => {
                prop_assert_eq!(calls.load(Ordering::SeqCst), 0);
                prop_assert_eq!(result.dialect_used, d);
                prop_assert!(result.dialect_scores.is_none());
            }
            DialectChoice::Auto => {
                prop_assert_eq!(calls.load(Ordering::SeqCst), 1);
                prop_assert!(result.dialect_scores.is_some());
            }
        }
    }

    #[test]
    fn views_agree_with_top_analyses(text in text(), choice in choice()) {
        let (pipeline, _) = counting_pipeline();
        let result = pipeline.process(&text, choice).unwrap();
        let supports = pipeline.registry().get(result.dialect_used).unwrap().db.supports_diacritization;
        let tokenized: Vec<&str> = result.views[&View::Tokenized].split(' ').collect();
        let lemmatized: Vec<&str> = result.views[&View::Lemmatized].split(' ').collect();
        let diac_pos: Vec<&str> = result.views[&View::DiacPos].split(' ').collect();
        prop_assert_eq!(tokenized.len(), result.words.len());
        for (i, w) in result.words.iter().enumerate() {
            let top = w.top();
            prop_assert_eq!(tokenized[i].replace('+', ""), top.diac.clone());
            prop_assert_eq!(lemmatized[i], top.lemma.as_str());
            let (form, pos) = diac_pos[i].rsplit_once('/').unwrap();
            prop_assert_eq!(pos, top.pos());
            prop_assert_eq!(form, if supports { top.diac.as_str() } else { w.raw.as_str() });
        }
    }

    #[test]
    fn processing_is_deterministic(text in text(), choice in choice()) {
        let (pipeline, _) = counting_pipeline();
        prop_assert_eq!(pipeline.process(&text, choice).unwrap(), pipeline.process(&text, choice).unwrap());
    }
}

#[test]
fn error_paths() {
    let (pipeline, _) = counting_pipeline();
    assert!(matches!(
        pipeline.process("  ", DialectChoice::Auto),
        Err(Error::EmptyInput)
    ));
    let no_did = Pipeline::new(registry(), None);
    assert!(matches!(
        no_did.process("ktb", DialectChoice::Auto),
        Err(Error::UntrainedModel)
    ));
    let empty = Pipeline::new(Registry::new(), None);
    assert!(matches!(
        empty.process("ktb", DialectChoice::Fixed(Dialect::Lev)),
        Err(Error::DialectNotLoaded(_))
    ));
}

#[test]
fn gulf_keeps_raw_forms_and_plus_markers() {
    let (pipeline, _) = counting_pipeline();
    let result = pipeline.process("wktbt", DialectChoice::Fixed(Dialect::Glf)).unwrap();
    assert_eq!(result.views[&View::Tokenized], "w+ktb+t");
    assert_eq!(result.views[&View::DiacPos], "wktbt/verb");
    let msa = pipeline.process("wktbt", DialectChoice::Fixed(Dialect::Msa)).unwrap();
    assert_eq!(msa.views[&View::DiacPos], "wakatabat/verb");
}
