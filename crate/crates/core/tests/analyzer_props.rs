use std::collections::BTreeSet;
use std::path::PathBuf;

use morphdis_core::script::Script;
use morphdis_core::{analyze, analyze_with_backoff, MorphDatabase, Source};
use morphdis_testkit::{brute_force_analyses, reading_key, ReadingKey};
use proptest::prelude::*;

fn load(name: &str) -> MorphDatabase {
    MorphDatabase::load(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

/// Every character used in a match form, plus one that never is.
fn alphabet(db: &MorphDatabase) -> Vec<char> {
    let mut chars: BTreeSet<char> = [&db.prefixes, &db.stems, &db.suffixes]
        .into_iter()
        .flat_map(|t| t.entries())
        .flat_map(|e| e.match_form.chars())
        .collect();
    chars.insert('x');
    chars.into_iter().collect()
}

fn words(db: &MorphDatabase) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(alphabet(db)), 1..=8).prop_map(|v| v.into_iter().collect())
}

fn keys(word: &str, db: &MorphDatabase) -> BTreeSet<ReadingKey> {
    analyze(word, db).unwrap().iter().map(reading_key).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_brute_force_on_toy(word in words(&load("toy-msa.json"))) {
        let db = load("toy-msa.json");
        let got = analyze(&word, &db).unwrap();
        let set: BTreeSet<ReadingKey> = got.iter().map(reading_key).collect();
        prop_assert_eq!(set.len(), got.len(), "duplicates in output");
        prop_assert_eq!(set, brute_force_analyses(&word, &db));
    }

    #[test]
    fn matches_brute_force_on_ambiguous(word in words(&load("ambiguous-msa.json"))) {
        let db = load("ambiguous-msa.json");
        prop_assert_eq!(keys(&word, &db), brute_force_analyses(&word, &db));
    }

    #[test]
    fn surfaces_are_sound(word in words(&load("ambiguous-msa.json"))) {
        let db = load("ambiguous-msa.json");
        for a in analyze(&word, &db).unwrap() {
            prop_assert_eq!(Script::Buckwalter.match_key(&a.diac), Script::Buckwalter.match_key(&word));
        }
    }

    #[test]
    fn repeated_calls_agree(word in words(&load("toy-msa.json"))) {
        let db = load("toy-msa.json");
        prop_assert_eq!(analyze_with_backoff(&word, &db).unwrap(), analyze_with_backoff(&word, &db).unwrap());
    }

    #[test]
    fn backoff_is_total(word in words(&load("toy-msa.json"))) {
        let db = load("toy-msa.json");
        let all = analyze_with_backoff(&word, &db).unwrap();
        prop_assert!(!all.is_empty());
        let lexical = analyze(&word, &db).unwrap();
        if lexical.is_empty() {
            prop_assert!(all.len() == 1 && all[0].source == Source::Backoff);
        } else {
            prop_assert_eq!(all, lexical);
        }
    }

    #[test]
    fn adding_a_compat_pair_never_removes_analyses(
        word in words(&load("ambiguous-msa.json")),
        table in 0usize..3,
        a in 0usize..16,
        b in 0usize..16,
    ) {
        let db = load("ambiguous-msa.json");
        let cats = |t: &morphdis_core::morph_db::EntryTable| -> Vec<String> {
            t.entries().iter().map(|e| e.category.clone()).collect::<BTreeSet<_>>().into_iter().collect()
        };
        let (p, s, x) = (cats(&db.prefixes), cats(&db.stems), cats(&db.suffixes));
        let mut extended = db.clone();
        match table {
            0 => { extended.compat_ab.insert((p[a % p.len()].clone(), s[b % s.len()].clone())); }
            1 => { extended.compat_bc.insert((s[a % s.len()].clone(), x[b % x.len()].clone())); }
            _ => { extended.compat_ac.insert((p[a % p.len()].clone(), x[b % x.len()].clone())); }
        }
        let before = keys(&word, &db);
        let after = keys(&word, &extended);
        prop_assert!(before.is_subset(&after));
    }
}

#[test]
fn every_fixture_reading_is_found() {
    for name in ["toy-msa.json", "ambiguous-msa.json"] {
        let db = load(name);
        for reading in morphdis_testkit::all_readings(&db) {
            let tags: Vec<_> = analyze(&reading.surface, &db)
                .unwrap()
                .iter()
                .map(|a| a.tag())
                .collect();
            assert!(tags.contains(&reading.tag), "{name}: {}", reading.surface);
        }
    }
}
