use serde::{Deserialize, Serialize};

use super::TaskError;
use crate::elm::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    Accuracy,
    SymbolErrorRate,
}

impl ScoreKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScoreKind::Accuracy => "accuracy",
            ScoreKind::SymbolErrorRate => "ser",
        }
    }

    /// Whether score `a` beats score `b`.
    pub fn better(&self, a: f64, b: f64) -> bool {
        match self {
            ScoreKind::Accuracy => a > b,
            ScoreKind::SymbolErrorRate => a < b,
        }
    }
}

/// Fraction correct (accuracy) or fraction wrong (symbol error rate).
pub fn evaluate(predictions: &[Prediction], truths: &[Prediction], kind: ScoreKind) -> Result<f64, TaskError> {
    if predictions.len() != truths.len() {
        return Err(TaskError::LengthMismatch {
            predictions: predictions.len(),
            targets: truths.len(),
        });
    }
    if truths.is_empty() {
        return Err(TaskError::Empty);
    }
    let correct = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    let n = truths.len() as f64;
    Ok(match kind {
        ScoreKind::Accuracy => correct as f64 / n,
        ScoreKind::SymbolErrorRate => (truths.len() - correct) as f64 / n,
    })
}

/// Five-number summary, quartiles by linear interpolation between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Distribution {
    pub fn from_values(values: &[f64]) -> Result<Self, TaskError> {
        if values.is_empty() {
            return Err(TaskError::Empty);
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Ok(Self {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Scores of every repeat and their summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub kind: ScoreKind,
    pub scores: Vec<f64>,
    pub summary: Distribution,
}

impl Metrics {
    pub fn from_scores(kind: ScoreKind, scores: Vec<f64>) -> Result<Self, TaskError> {
        let summary = Distribution::from_values(&scores)?;
        Ok(Self { kind, scores, summary })
    }

    pub fn median(&self) -> f64 {
        self.summary.median
    }

    pub fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }
}
