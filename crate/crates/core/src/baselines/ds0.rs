//! Class-mean reference evidence combination.
//!
//! For each classifier and class, the proximity between the classifier output
//! and that class's mean training output supports θ_k, while the proximities
//! to the other classes' means jointly support the complement θ̄_k. Both
//! simple supports are combined, then fused across classifiers, and the
//! confidence for class k is the resulting mass on θ_k.

use serde::{Deserialize, Serialize};

use crate::dempster::combine_powerset;
use crate::error::{FusionError, Result};
use crate::model::{FusionDataset, PowersetMass, Rule, ScoreVector};

/// Bit for θ_k in the two-element frame {θ_k, θ̄_k}.
pub const CLASS_BIT: u32 = 0b01;
/// Bit for the complement θ̄_k.
pub const COMPLEMENT_BIT: u32 = 0b10;
/// The whole frame Θ.
pub const FRAME_MASK: u32 = 0b11;

/// Mean output vector per classifier per true class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ds0Reference {
    /// `mu[n][k]` is classifier n's mean output over class-k patterns.
    mu: Vec<Vec<Vec<f64>>>,
}

impl Ds0Reference {
    pub fn new(mu: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(FusionError::EmptyInput("reference has no classifiers"));
        }
        let k = mu[0].len();
        for row in &mu {
            if row.len() != k || row.iter().any(|v| v.len() != k) {
                return Err(FusionError::ShapeMismatch(format!(
                    "reference must be {n}x{k}x{k}"
                )));
            }
            if let Some(&bad) = row.iter().flatten().find(|v| !v.is_finite()) {
                return Err(FusionError::NonFinite {
                    context: "reference mean".into(),
                    value: bad,
                });
            }
        }
        Ok(Self { mu })
    }

    pub fn classifiers(&self) -> usize {
        self.mu.len()
    }

    pub fn classes(&self) -> usize {
        self.mu[0].len()
    }

    pub fn mean(&self, n: usize, k: usize) -> &[f64] {
        &self.mu[n][k]
    }

    pub fn means(&self) -> &[Vec<Vec<f64>>] {
        &self.mu
    }

    pub fn select_classifiers(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(FusionError::EmptySubset);
        }
        let mu = subset
            .iter()
            .map(|&n| {
                self.mu.get(n).cloned().ok_or(FusionError::IndexOutOfRange {
                    index: n + 1,
                    size: self.mu.len(),
                })
            })
            .collect::<Result<_>>()?;
        Self::new(mu)
    }
}

/// Class-conditional mean outputs of every classifier.
pub fn ds0_fit(train: &FusionDataset) -> Result<Ds0Reference> {
    let (n_cls, k_cls) = (train.classifier_count(), train.classes());
    let mut sums = vec![vec![vec![0.0; k_cls]; k_cls]; n_cls];
    let mut counts = vec![0usize; k_cls];
    for p in train.patterns() {
        let label = p.label();
        counts[label] += 1;
        for (n, y) in p.scores.iter().enumerate() {
            for (acc, v) in sums[n][label].iter_mut().zip(y.scores()) {
                *acc += v;
            }
        }
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(FusionError::EmptyClass { class });
    }
    for row in &mut sums {
        for (k, mean) in row.iter_mut().enumerate() {
            for v in mean.iter_mut() {
                *v /= counts[k] as f64;
            }
        }
    }
    Ds0Reference::new(sums)
}

/// Proximity `exp(−‖μ − y‖²)`.
pub fn proximity(mean: &[f64], y: &[f64]) -> f64 {
    let sq: f64 = mean.iter().zip(y).map(|(m, s)| (m - s) * (m - s)).sum();
    (-sq).exp()
}

/// Simple support for θ_k: `m(θ_k) = d_k`, `m(Θ) = 1 − d_k`.
pub fn class_support(d_k: f64) -> Result<PowersetMass> {
    PowersetMass::new(
        2,
        [(CLASS_BIT, d_k), (FRAME_MASK, 1.0 - d_k)],
        Rule::Normalized,
    )
}

/// Support for θ̄_k from the other classes' proximities:
/// `m(θ̄_k) = 1 − Π_{l≠k}(1 − d_l)`, `m(Θ) = Π_{l≠k}(1 − d_l)`.
pub fn complement_support(d: &[f64], k: usize) -> Result<PowersetMass> {
    let keep: f64 = d
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != k)
        .map(|(_, v)| 1.0 - v)
        .product();
    PowersetMass::new(
        2,
        [(COMPLEMENT_BIT, 1.0 - keep), (FRAME_MASK, keep)],
        Rule::Normalized,
    )
}

/// Evidence of one classifier about class k: class support ⊕ complement support.
pub fn class_evidence(d: &[f64], k: usize) -> Result<PowersetMass> {
    combine_powerset(
        &class_support(d[k])?,
        &complement_support(d, k)?,
        Rule::Normalized,
    )
}

/// Per-class confidences for one pattern.
pub fn ds0_combine(ys: &[ScoreVector], reference: &Ds0Reference) -> Result<Vec<f64>> {
    if ys.is_empty() {
        return Err(FusionError::EmptyInput("no score vectors"));
    }
    let k_cls = reference.classes();
    if ys.len() != reference.classifiers() || ys.iter().any(|y| y.len() != k_cls) {
        return Err(FusionError::ShapeMismatch(format!(
            "reference is {}x{k_cls}, got {} score vectors",
            reference.classifiers(),
            ys.len()
        )));
    }
    let proximities: Vec<Vec<f64>> = ys
        .iter()
        .enumerate()
        .map(|(n, y)| {
            (0..k_cls)
                .map(|k| proximity(reference.mean(n, k), y.scores()))
                .collect()
        })
        .collect();

    let mut confidence = Vec::with_capacity(k_cls);
    for k in 0..k_cls {
        let mut acc = class_evidence(&proximities[0], k)?;
        for (n, d) in proximities.iter().enumerate().skip(1) {
            let evidence = class_evidence(d, k)?;
            acc = combine_powerset(&acc, &evidence, Rule::Normalized).map_err(|e| match e {
                FusionError::TotalConflict { conflict, .. } => {
                    log::warn!("class {k}: total conflict fusing classifier {}", n + 1);
                    FusionError::TotalConflict { conflict, step: n }
                }
                other => other,
            })?;
        }
        confidence.push(acc.mass(CLASS_BIT));
    }
    Ok(confidence)
}
