//! Wire types of the JSON API.

use std::collections::BTreeMap;

use morphdis_core::{Analysis, Dialect, DialectChoice, DisambiguatedWord, DocumentResult, Features, View};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiRequest {
    pub text: String,
    /// `auto` or a dialect id.
    pub dialect: String,
}

impl ApiRequest {
    /// Checks the dialect and that the text is not blank.
    pub fn validate(&self) -> Result<DialectChoice, String> {
        let choice = self.dialect.parse().map_err(|_| {
            format!(
                "unknown dialect {:?}; expected auto, msa, egy, glf or lev",
                self.dialect
            )
        })?;
        if self.text.trim().is_empty() {
            return Err("text is empty".into());
        }
        Ok(choice)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiAnalysis {
    pub diac: String,
    pub pos: String,
    pub lemma: String,
    pub tokens: Vec<String>,
    pub gloss: String,
    pub features: Features,
    pub score: f64,
}

impl From<&Analysis> for ApiAnalysis {
    fn from(a: &Analysis) -> Self {
        ApiAnalysis {
            diac: a.diac.clone(),
            pos: a.pos().to_string(),
            lemma: a.lemma.clone(),
            tokens: a.tokens.clone(),
            gloss: a.gloss.clone(),
            features: a.features.clone(),
            score: a.score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiWord {
    pub raw: String,
    pub top: ApiAnalysis,
    /// Best first.
    pub analyses: Vec<ApiAnalysis>,
}

impl From<&DisambiguatedWord> for ApiWord {
    fn from(w: &DisambiguatedWord) -> Self {
        ApiWord {
            raw: w.raw.clone(),
            top: w.top().into(),
            analyses: w.analyses.iter().map(ApiAnalysis::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiResponse {
    pub dialect_used: Dialect,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dialect_scores: Option<BTreeMap<String, f64>>,
    pub words: Vec<ApiWord>,
    pub views: BTreeMap<View, String>,
}

impl From<&DocumentResult> for ApiResponse {
    fn from(r: &DocumentResult) -> Self {
        ApiResponse {
            dialect_used: r.dialect_used,
            dialect_scores: r.dialect_scores.clone(),
            words: r.words.iter().map(ApiWord::from).collect(),
            views: r.views.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialectInfo {
    pub id: Dialect,
    pub display_name: &'static str,
    pub supports_diacritization: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Health {
    /// `ok` once every dialect and the identifier are loaded, else `degraded`.
    pub status: &'static str,
    pub models_loaded: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub error: String,
}
