use crate::error::{FusionError, Result};

use super::{Frame, ScoreVector};

/// One pattern: the aligned outputs of every classifier plus a one-hot target.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub id: u64,
    pub scores: Vec<ScoreVector>,
    pub target: Vec<f64>,
}

impl Pattern {
    /// Zero-based true class.
    pub fn label(&self) -> usize {
        self.target
            .iter()
            .position(|&t| t == 1.0)
            .expect("validated one-hot target")
    }
}

/// Aligned classifier outputs with one-hot targets.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionDataset {
    frame: Frame,
    classifier_count: usize,
    patterns: Vec<Pattern>,
}

impl FusionDataset {
    pub fn new(frame: Frame, classifier_count: usize, patterns: Vec<Pattern>) -> Result<Self> {
        if classifier_count == 0 {
            return Err(FusionError::InvalidDataset(
                "need at least one classifier".into(),
            ));
        }
        let k = frame.len();
        for p in &patterns {
            if p.scores.len() != classifier_count {
                return Err(FusionError::InvalidDataset(format!(
                    "pattern {} has {} score vectors, expected {classifier_count}",
                    p.id,
                    p.scores.len()
                )));
            }
            for (n, y) in p.scores.iter().enumerate() {
                if y.len() != k {
                    return Err(FusionError::InvalidDataset(format!(
                        "pattern {} classifier {} has {} scores, expected {k}",
                        p.id,
                        n + 1,
                        y.len()
                    )));
                }
            }
            let ones = p.target.iter().filter(|&&t| t == 1.0).count();
            let zeros = p.target.iter().filter(|&&t| t == 0.0).count();
            if p.target.len() != k || ones != 1 || ones + zeros != k {
                return Err(FusionError::InvalidDataset(format!(
                    "pattern {} target {:?} is not one-hot of length {k}",
                    p.id, p.target
                )));
            }
        }
        Ok(Self {
            frame,
            classifier_count,
            patterns,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn classes(&self) -> usize {
        self.frame.len()
    }

    pub fn classifier_count(&self) -> usize {
        self.classifier_count
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Restrict to a subset of classifiers (zero-based, in the given order).
    pub fn select_classifiers(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(FusionError::EmptySubset);
        }
        if let Some(&bad) = subset.iter().find(|&&n| n >= self.classifier_count) {
            return Err(FusionError::IndexOutOfRange {
                index: bad + 1,
                size: self.classifier_count,
            });
        }
        let patterns = self
            .patterns
            .iter()
            .map(|p| Pattern {
                id: p.id,
                scores: subset.iter().map(|&n| p.scores[n].clone()).collect(),
                target: p.target.clone(),
            })
            .collect();
        Ok(Self {
            frame: self.frame.clone(),
            classifier_count: subset.len(),
            patterns,
        })
    }

    /// Rescale every classifier's scores to [0, 1] using that classifier's
    /// global minimum and maximum. Constant classifiers map to 0.5.
    pub fn minmax_rescaled(&self) -> Self {
        let mut out = self.clone();
        for n in 0..self.classifier_count {
            let (lo, hi) = self
                .patterns
                .iter()
                .flat_map(|p| p.scores[n].scores().iter().copied())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s), hi.max(s))
                });
            let span = hi - lo;
            for p in &mut out.patterns {
                let y = &p.scores[n];
                let scaled = y
                    .scores()
                    .iter()
                    .map(|&s| if span > 0.0 { (s - lo) / span } else { 0.5 })
                    .collect();
                p.scores[n] = ScoreVector::new(scaled, y.classifier()).expect("finite rescale");
            }
        }
        out
    }
}
