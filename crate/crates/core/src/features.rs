//! The eleven morphosyntactic features every reading is described by.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placeholder for a feature that does not apply to a reading.
pub const NA: &str = "na";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Pos,
    Asp,
    Per,
    Gen,
    Num,
    Vox,
    Mod,
    Cas,
    Stt,
    Prc,
    Enc,
}

impl Feature {
    /// Canonical order, also the order of a combined tag.
    pub const ALL: [Feature; 11] = [
        Feature::Pos,
        Feature::Asp,
        Feature::Per,
        Feature::Gen,
        Feature::Num,
        Feature::Vox,
        Feature::Mod,
        Feature::Cas,
        Feature::Stt,
        Feature::Prc,
        Feature::Enc,
    ];

    pub const COUNT: usize = 11;

    pub fn name(self) -> &'static str {
        match self {
            Feature::Pos => "pos",
            Feature::Asp => "asp",
            Feature::Per => "per",
            Feature::Gen => "gen",
            Feature::Num => "num",
            Feature::Vox => "vox",
            Feature::Mod => "mod",
            Feature::Cas => "cas",
            Feature::Stt => "stt",
            Feature::Prc => "prc",
            Feature::Enc => "enc",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown feature {s:?}")))
    }
}

/// Feature values end up inside colon-joined combined tags and
/// '+'-delimited token strings, so neither separator may appear.
pub fn check_value(value: &str) -> Result<()> {
    if value.is_empty() || value.chars().any(|c| c == ':' || c == '+' || c.is_whitespace()) {
        return Err(Error::invalid(format!("invalid feature value {value:?}")));
    }
    Ok(())
}

/// A partial feature assignment, as carried by lexicon entries.
pub type PartialFeatures = BTreeMap<Feature, String>;

/// A total feature assignment: every feature has a value, `"na"` when unset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Features([String; Feature::COUNT]);

impl Default for Features {
    fn default() -> Self {
        Features(std::array::from_fn(|_| NA.to_string()))
    }
}

impl Features {
    pub fn from_values(values: [String; Feature::COUNT]) -> Self {
        Features(values)
    }

    pub fn from_partial(partial: &PartialFeatures) -> Self {
        let mut features = Features::default();
        features.overlay(partial);
        features
    }

    pub fn get(&self, feature: Feature) -> &str {
        &self.0[feature.index()]
    }

    pub fn set(&mut self, feature: Feature, value: impl Into<String>) {
        self.0[feature.index()] = value.into();
    }

    /// Overwrites every feature present in `partial`.
    pub fn overlay(&mut self, partial: &PartialFeatures) {
        for (feature, value) in partial {
            self.set(*feature, value.clone());
        }
    }

    pub fn values(&self) -> &[String; Feature::COUNT] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, &str)> {
        Feature::ALL.into_iter().zip(self.0.iter().map(String::as_str))
    }
}

impl Serialize for Features {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(Feature::COUNT))?;
        for (feature, value) in self.iter() {
            map.serialize_entry(feature.name(), value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Features {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let partial = PartialFeatures::deserialize(deserializer)?;
        for value in partial.values() {
            check_value(value).map_err(de::Error::custom)?;
        }
        Ok(Features::from_partial(&partial))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_in_canonical_order() {
        let mut f = Features::default();
        f.set(Feature::Enc, "3ms_dobj");
        f.set(Feature::Pos, "verb");
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.starts_with(r#"{"pos":"verb","asp":"na""#));
        assert!(json.ends_with(r#""prc":"na","enc":"3ms_dobj"}"#));
        let back: Features = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_separator_characters() {
        assert!(check_value("a:b").is_err());
        assert!(check_value("a+b").is_err());
        assert!(check_value("").is_err());
        assert!(check_value("conj_wa").is_ok());
        assert!(serde_json::from_str::<Features>(r#"{"pos":"a b"}"#).is_err());
        assert!(serde_json::from_str::<Features>(r#"{"bogus":"x"}"#).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in Feature::ALL {
            assert_eq!(f.name().parse::<Feature>().unwrap(), f);
        }
        assert_eq!(Feature::Enc.index(), 10);
    }
}
