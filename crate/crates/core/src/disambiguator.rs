//! In-context ranking of a word's analyses against the tagger posterior.
//!
//! An analysis scores the expected fraction of features its combined tag
//! shares with a tag drawn from the posterior at that position.

use std::cmp::Ordering;

use crate::analyzer::{analyze_with_backoff, Analysis};
use crate::error::{Error, Result};
use crate::features::Feature;
use crate::morph_db::MorphDatabase;
use crate::tagger::{CombinedTag, TagDistribution, TaggerModel};

/// Scores are rounded to this many decimal places so that rankings and
/// serialized output do not depend on the last bits of float summation order.
const SCORE_DECIMALS: i32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct DisambiguatedWord {
    pub raw: String,
    /// Best first; never empty.
    pub analyses: Vec<Analysis>,
}

impl DisambiguatedWord {
    pub fn top(&self) -> &Analysis {
        &self.analyses[0]
    }
}

/// Relative weight of each feature in the agreement score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureWeights([f64; Feature::COUNT]);

impl Default for FeatureWeights {
    fn default() -> Self {
        FeatureWeights([1.0; Feature::COUNT])
    }
}

impl FeatureWeights {
    pub fn new(weights: [f64; Feature::COUNT]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid(
                "feature weights must be nonnegative with a positive sum",
            ));
        }
        Ok(FeatureWeights(weights))
    }

    fn agreement(&self, a: &CombinedTag, b: &CombinedTag) -> f64 {
        let total: f64 = self.0.iter().sum();
        let shared: f64 = Feature::ALL
            .into_iter()
            .filter(|f| a.get(*f) == b.get(*f))
            .map(|f| self.0[f.index()])
            .sum();
        shared / total
    }
}

/// Expected per-feature agreement with uniform weights.
pub fn score_analysis(analysis: &Analysis, posterior: &TagDistribution) -> f64 {
    score_with_weights(analysis, posterior, &FeatureWeights::default())
}

pub fn score_with_weights(analysis: &Analysis, posterior: &TagDistribution, weights: &FeatureWeights) -> f64 {
    let tag = analysis.tag();
    let score: f64 = posterior.iter().map(|(t, p)| p * weights.agreement(&tag, t)).sum();
    let scale = 10f64.powi(SCORE_DECIMALS);
    ((score * scale).round() / scale).clamp(0.0, 1.0)
}

/// Score descending, then diac and lemma ascending.
pub fn rank_order(a: &Analysis, b: &Analysis) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.cmp_lexical(b))
}

pub fn disambiguate<S: AsRef<str>>(
    sentence: &[S],
    db: &MorphDatabase,
    model: &TaggerModel,
) -> Result<Vec<DisambiguatedWord>> {
    disambiguate_with_weights(sentence, db, model, &FeatureWeights::default())
}

pub fn disambiguate_with_weights<S: AsRef<str>>(
    sentence: &[S],
    db: &MorphDatabase,
    model: &TaggerModel,
    weights: &FeatureWeights,
) -> Result<Vec<DisambiguatedWord>> {
    if sentence.is_empty() {
        return Ok(Vec::new());
    }
    let posteriors = model.predict_tags(sentence)?;
    sentence
        .iter()
        .zip(&posteriors)
        .map(|(word, posterior)| {
            let mut analyses = analyze_with_backoff(word.as_ref(), db)?;
            for analysis in &mut analyses {
                analysis.score = score_with_weights(analysis, posterior, weights);
            }
            analyses.sort_by(rank_order);
            Ok(DisambiguatedWord {
                raw: word.as_ref().to_string(),
                analyses,
            })
        })
        .collect()
}
