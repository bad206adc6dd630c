//! Evidence estimation from classifier scores and fusion of the resulting
//! mass functions.
//!
//! Classifier `n` produces, for each class `k`, a proximity
//! `d = exp(-‖w_k^n - y^n‖²)` between its output and a trained reference
//! (a full vector in [`Mode::Ds1`], the k-th score against a scalar in
//! [`Mode::Ds2`]). Proximities and the ignorance term `g_n` are normalized
//! into a singleton+Θ mass function, and the classifiers' masses are fused
//! with Dempster's rule.

use crate::dempster::combine_many;
use crate::error::{FusionError, Result};
use crate::model::{EvidenceParams, MassFunction, Mode, Rule, ScoreVector};

/// Combined confidences `z(k) = m(θ_k)` plus the residual mass on Θ.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedOutput {
    pub z: Vec<f64>,
    pub residual_theta: f64,
    /// Zero-based class with the largest `z`, smallest index on ties.
    pub argmax: usize,
}

impl FusedOutput {
    pub fn from_mass(m: &MassFunction) -> Self {
        let z = m.singletons().to_vec();
        Self {
            argmax: argmax(&z),
            z,
            residual_theta: m.theta(),
        }
    }
}

/// Smallest index attaining the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_scores(params: &EvidenceParams, n: usize, y: &ScoreVector) -> Result<()> {
    if n >= params.classifiers() {
        return Err(FusionError::IndexOutOfRange {
            index: n + 1,
            size: params.classifiers(),
        });
    }
    if y.len() != params.classes() {
        return Err(FusionError::ShapeMismatch(format!(
            "score vector has {} entries, frame has {}",
            y.len(),
            params.classes()
        )));
    }
    Ok(())
}

/// Squared distance between a reference and the matching part of `y`.
pub(crate) fn squared_gap(mode: Mode, reference: &[f64], y: &[f64], k: usize) -> f64 {
    match mode {
        Mode::Ds1 => reference
            .iter()
            .zip(y)
            .map(|(w, s)| (w - s) * (w - s))
            .sum(),
        Mode::Ds2 => {
            let gap = reference[0] - y[k];
            gap * gap
        }
    }
}

/// Proximity `d_n(θ_k)` in (0, 1].
pub fn distance(params: &EvidenceParams, n: usize, k: usize, y: &ScoreVector) -> Result<f64> {
    check_scores(params, n, y)?;
    if k >= params.classes() {
        return Err(FusionError::IndexOutOfRange {
            index: k + 1,
            size: params.classes(),
        });
    }
    Ok((-squared_gap(params.mode(), params.reference(n, k), y.scores(), k)).exp())
}

/// All K proximities of classifier `n` (unchecked).
pub(crate) fn proximities(params: &EvidenceParams, n: usize, y: &[f64]) -> Vec<f64> {
    (0..params.classes())
        .map(|k| (-squared_gap(params.mode(), params.reference(n, k), y, k)).exp())
        .collect()
}

/// Mass function from proximities and ignorance:
/// `m(θ_k) = d_k / (Σ d + g)`, `m(Θ) = g / (Σ d + g)`.
pub(crate) fn mass_from_proximities(d: &[f64], g: f64) -> MassFunction {
    let denom = d.iter().sum::<f64>() + g;
    MassFunction::from_parts(d.iter().map(|v| v / denom).collect(), g / denom, 0.0)
}

/// Basic belief assignment of classifier `n` for its output `y`.
pub fn bba_from_scores(params: &EvidenceParams, n: usize, y: &ScoreVector) -> Result<MassFunction> {
    check_scores(params, n, y)?;
    let d = proximities(params, n, y.scores());
    Ok(mass_from_proximities(&d, params.ignorance()[n]))
}

fn check_pattern(params: &EvidenceParams, ys: &[ScoreVector]) -> Result<()> {
    if ys.len() != params.classifiers() {
        return Err(FusionError::ShapeMismatch(format!(
            "{} score vectors for {} classifiers",
            ys.len(),
            params.classifiers()
        )));
    }
    Ok(())
}

/// Per-classifier mass functions for one pattern.
pub fn bbas(params: &EvidenceParams, ys: &[ScoreVector]) -> Result<Vec<MassFunction>> {
    check_pattern(params, ys)?;
    ys.iter()
        .enumerate()
        .map(|(n, y)| bba_from_scores(params, n, y))
        .collect()
}

/// Fuse every classifier's evidence with the normalized rule.
pub fn fuse(params: &EvidenceParams, ys: &[ScoreVector]) -> Result<FusedOutput> {
    let masses = bbas(params, ys)?;
    Ok(FusedOutput::from_mass(&combine_many(
        &masses,
        Rule::Normalized,
    )?))
}

/// Predicted zero-based class.
pub fn predict(params: &EvidenceParams, ys: &[ScoreVector]) -> Result<usize> {
    fuse(params, ys).map(|out| out.argmax)
}
