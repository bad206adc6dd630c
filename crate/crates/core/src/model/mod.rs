//! Domain types shared by the combination engine, the evidence estimator,
//! the trainer and the baseline combiners.

mod dataset;
mod mass;
mod params;

pub use dataset::{FusionDataset, Pattern};
pub use mass::{make_mass, MassFunction, PowersetMass, Rule, MASS_TOLERANCE, MAX_POWERSET_FRAME};
pub use params::{EvidenceParams, Mode, IGNORANCE_FLOOR};

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};

/// The frame of discernment: `K >= 2` mutually exclusive class hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(FusionError::InvalidFrame(format!(
                "need at least 2 hypotheses, got {}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(FusionError::InvalidFrame(format!(
                    "label {} is empty",
                    i + 1
                )));
            }
            if labels[..i].contains(label) {
                return Err(FusionError::InvalidFrame(format!(
                    "duplicate label {label:?}"
                )));
            }
        }
        Ok(Self { labels })
    }

    /// Frame with labels `c1..cK`.
    pub fn numbered(k: usize) -> Result<Self> {
        Self::new((1..=k).map(|i| format!("c{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Zero-based index of a label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl TryFrom<Vec<String>> for Frame {
    type Error = FusionError;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Frame::new(labels)
    }
}

impl From<Frame> for Vec<String> {
    fn from(frame: Frame) -> Self {
        frame.labels
    }
}

/// One classifier's measurement-level output for one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
    classifier: usize,
}

impl ScoreVector {
    pub fn new(scores: Vec<f64>, classifier: usize) -> Result<Self> {
        if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(FusionError::NonFinite {
                context: format!("scores of classifier {classifier}"),
                value: bad,
            });
        }
        Ok(Self { scores, classifier })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn classifier(&self) -> usize {
        self.classifier
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl std::ops::Index<usize> for ScoreVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.scores[k]
    }
}

/// One-hot target vector with a 1 at the one-based position `k`.
pub fn one_hot(k: usize, size: usize) -> Result<Vec<f64>> {
    if k == 0 || k > size {
        return Err(FusionError::IndexOutOfRange { index: k, size });
    }
    let mut t = vec![0.0; size];
    t[k - 1] = 1.0;
    Ok(t)
}

/// Hyper-parameters of the gradient-descent trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Initial learning rate for the reference weights.
    pub alpha_init: f64,
    /// Learning rate for the ignorance terms.
    pub beta: f64,
    pub max_epochs: usize,
    /// Number of leading epochs during which the ignorance terms are updated.
    pub g_update_epochs: usize,
    /// Factor applied to alpha after a non-improving epoch.
    pub lr_decay: f64,
    /// Consecutive non-improving epochs tolerated before stopping.
    pub patience: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Visit patterns in a seeded random order each epoch instead of dataset order.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha_init: 5e-4,
            beta: 1e-6,
            max_epochs: 50,
            g_update_epochs: 5,
            lr_decay: 0.5,
            patience: 5,
            seed: 0,
            mode: Mode::Ds1,
            shuffle: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FusionError::InvalidConfig(msg));
        if !(self.alpha_init > 0.0 && self.alpha_init.is_finite()) {
            return bad(format!("alpha_init must be > 0, got {}", self.alpha_init));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay < 1.0) {
            return bad(format!(
                "lr_decay must lie in (0, 1), got {}",
                self.lr_decay
            ));
        }
        if self.max_epochs < 1 {
            return bad("max_epochs must be >= 1".into());
        }
        Ok(())
    }
}
