//! Accuracy, mean squared error, error-reduction rate and overall performance.
//!
//! Accuracies are percentages in [0, 100].

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::evidence::FusedOutput;
use crate::trainer::squared_error;

/// Accuracy of one combiner on one classifier subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    /// Zero-based classifier indices.
    pub subset: Vec<usize>,
    pub combiner: String,
    pub accuracy: f64,
    /// Error reduction versus the best single classifier, in percent.
    pub err_value: f64,
}

/// `100 · correct / total`.
pub fn accuracy(predictions: &[usize], targets: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(FusionError::EmptyInput("no predictions"));
    }
    if predictions.len() != targets.len() {
        return Err(FusionError::ShapeMismatch(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let correct = predictions
        .iter()
        .zip(targets)
        .filter(|(p, t)| p == t)
        .count();
    Ok(100.0 * correct as f64 / predictions.len() as f64)
}

/// Error-reduction rate `(ER_best − ER_combined) / ER_best · 100` with
/// `ER = 100 − accuracy`. Negative when the combination is worse.
pub fn err(best_single_acc: f64, combined_acc: f64) -> Result<f64> {
    let best_error = 100.0 - best_single_acc;
    if best_error <= 0.0 {
        return Err(FusionError::PerfectBaseline);
    }
    let combined_error = 100.0 - combined_acc;
    Ok((best_error - combined_error) / best_error * 100.0)
}

/// Mean accuracy across the considered subsets.
pub fn overall_performance(results: &[SubsetResult]) -> Result<f64> {
    mean_accuracy(results.iter().map(|r| r.accuracy))
}

/// Mean of a list of accuracies.
pub fn mean_accuracy(accuracies: impl IntoIterator<Item = f64>) -> Result<f64> {
    let (sum, count) = accuracies
        .into_iter()
        .fold((0.0, 0usize), |(s, c), a| (s + a, c + 1));
    if count == 0 {
        return Err(FusionError::EmptyInput("no subset results"));
    }
    Ok(sum / count as f64)
}

/// Mean of `‖z − t‖²` over patterns.
pub fn mse(outputs: &[FusedOutput], targets: &[Vec<f64>]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(FusionError::EmptyInput("no outputs"));
    }
    if outputs.len() != targets.len() {
        return Err(FusionError::ShapeMismatch(format!(
            "{} outputs for {} targets",
            outputs.len(),
            targets.len()
        )));
    }
    let mut total = 0.0;
    for (z, t) in outputs.iter().zip(targets) {
        total += squared_error(&z.z, t)?;
    }
    Ok(total / outputs.len() as f64)
}
