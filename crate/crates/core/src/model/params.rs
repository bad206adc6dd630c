use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};

/// Smallest admissible ignorance term `g_n`.
pub const IGNORANCE_FLOOR: f64 = 1e-12;

/// How a classifier output is compared with its per-class references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One reference vector of length K per (classifier, class).
    #[default]
    Ds1,
    /// One reference scalar per (classifier, class), compared with the k-th score.
    Ds2,
}

impl Mode {
    /// Length of one reference for a frame of `classes` hypotheses.
    pub fn reference_len(self, classes: usize) -> usize {
        match self {
            Mode::Ds1 => classes,
            Mode::Ds2 => 1,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ds1 => "ds1",
            Mode::Ds2 => "ds2",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ds1" => Ok(Mode::Ds1),
            "ds2" => Ok(Mode::Ds2),
            other => Err(FusionError::InvalidConfig(format!(
                "unknown mode {other:?}"
            ))),
        }
    }
}

/// Trainable evidence parameters: per-classifier, per-class references and
/// per-classifier ignorance.
///
/// References are stored flat in `(classifier, class, component)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceParams {
    mode: Mode,
    classifiers: usize,
    classes: usize,
    weights: Vec<f64>,
    ignorance: Vec<f64>,
}

impl EvidenceParams {
    pub fn new(
        mode: Mode,
        classifiers: usize,
        classes: usize,
        weights: Vec<f64>,
        ignorance: Vec<f64>,
    ) -> Result<Self> {
        if classifiers == 0 || classes < 2 {
            return Err(FusionError::ShapeMismatch(format!(
                "need N >= 1 and K >= 2, got N={classifiers}, K={classes}"
            )));
        }
        let expected = classifiers * classes * mode.reference_len(classes);
        if weights.len() != expected {
            return Err(FusionError::ShapeMismatch(format!(
                "{mode} weights need {expected} entries, got {}",
                weights.len()
            )));
        }
        if ignorance.len() != classifiers {
            return Err(FusionError::ShapeMismatch(format!(
                "need {classifiers} ignorance terms, got {}",
                ignorance.len()
            )));
        }
        if let Some(&w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(FusionError::NonFinite {
                context: "reference weights".into(),
                value: w,
            });
        }
        if let Some(&g) = ignorance
            .iter()
            .find(|g| !(g.is_finite() && **g >= IGNORANCE_FLOOR))
        {
            return Err(FusionError::InvalidConfig(format!(
                "ignorance terms must be finite and >= {IGNORANCE_FLOOR:e}, got {g}"
            )));
        }
        Ok(Self {
            mode,
            classifiers,
            classes,
            weights,
            ignorance,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn classifiers(&self) -> usize {
        self.classifiers
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn reference_len(&self) -> usize {
        self.mode.reference_len(self.classes)
    }

    fn offset(&self, n: usize, k: usize) -> usize {
        (n * self.classes + k) * self.reference_len()
    }

    /// Reference for classifier `n` and class `k` (zero-based).
    pub fn reference(&self, n: usize, k: usize) -> &[f64] {
        let at = self.offset(n, k);
        &self.weights[at..at + self.reference_len()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn ignorance(&self) -> &[f64] {
        &self.ignorance
    }

    pub(crate) fn ignorance_mut(&mut self) -> &mut [f64] {
        &mut self.ignorance
    }

    /// Parameters for a subset of classifiers (zero-based, in the given order).
    pub fn select_classifiers(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(FusionError::EmptySubset);
        }
        let block = self.classes * self.reference_len();
        let mut weights = Vec::with_capacity(subset.len() * block);
        let mut ignorance = Vec::with_capacity(subset.len());
        for &n in subset {
            if n >= self.classifiers {
                return Err(FusionError::IndexOutOfRange {
                    index: n + 1,
                    size: self.classifiers,
                });
            }
            weights.extend_from_slice(&self.weights[n * block..(n + 1) * block]);
            ignorance.push(self.ignorance[n]);
        }
        Self::new(self.mode, subset.len(), self.classes, weights, ignorance)
    }
}
