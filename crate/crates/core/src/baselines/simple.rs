use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::evidence::argmax;
use crate::model::{FusionDataset, ScoreVector};

fn check_aligned(ys: &[ScoreVector]) -> Result<usize> {
    let first = ys
        .first()
        .ok_or(FusionError::EmptyInput("no score vectors"))?;
    let k = first.len();
    if let Some(bad) = ys.iter().find(|y| y.len() != k) {
        return Err(FusionError::ShapeMismatch(format!(
            "score vectors of length {k} and {}",
            bad.len()
        )));
    }
    Ok(k)
}

fn per_class(ys: &[ScoreVector], reduce: impl Fn(&mut Vec<f64>) -> f64) -> Result<Vec<f64>> {
    let k = check_aligned(ys)?;
    let mut column = Vec::with_capacity(ys.len());
    Ok((0..k)
        .map(|c| {
            column.clear();
            column.extend(ys.iter().map(|y| y[c]));
            reduce(&mut column)
        })
        .collect())
}

/// Per-class mean of the classifier scores.
pub fn average(ys: &[ScoreVector]) -> Result<Vec<f64>> {
    per_class(ys, |col| col.iter().sum::<f64>() / col.len() as f64)
}

/// Per-class median; with an even count, the mean of the two middle values.
pub fn median(ys: &[ScoreVector]) -> Result<Vec<f64>> {
    per_class(ys, |col| {
        col.sort_by(f64::total_cmp);
        let mid = col.len() / 2;
        if col.len() % 2 == 1 {
            col[mid]
        } else {
            (col[mid - 1] + col[mid]) / 2.0
        }
    })
}

/// Per-class maximum.
pub fn maximum(ys: &[ScoreVector]) -> Result<Vec<f64>> {
    per_class(ys, |col| {
        col.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    })
}

/// Plurality vote over per-classifier argmaxes.
///
/// Vote ties go to the tied class with the largest summed score, then to the
/// smallest index.
pub fn majority_vote(ys: &[ScoreVector]) -> Result<usize> {
    let k = check_aligned(ys)?;
    let mut votes = vec![0usize; k];
    let mut sums = vec![0.0; k];
    for y in ys {
        votes[argmax(y.scores())] += 1;
        for (s, v) in sums.iter_mut().zip(y.scores()) {
            *s += v;
        }
    }
    let top = *votes.iter().max().expect("k >= 1");
    let mut winner: Option<usize> = None;
    for c in (0..k).filter(|&c| votes[c] == top) {
        match winner {
            Some(w) if sums[c] <= sums[w] => {}
            _ => winner = Some(c),
        }
    }
    Ok(winner.expect("at least one class has the top vote count"))
}

/// Per-classifier, per-class accuracy on a training set: the fraction of
/// class-k patterns that classifier n assigns to class k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracyTable {
    classifiers: usize,
    classes: usize,
    /// N rows of K accuracies.
    acc: Vec<Vec<f64>>,
}

impl ClassAccuracyTable {
    pub fn new(acc: Vec<Vec<f64>>) -> Result<Self> {
        let classifiers = acc.len();
        if classifiers == 0 {
            return Err(FusionError::EmptyInput("accuracy table has no rows"));
        }
        let classes = acc[0].len();
        for row in &acc {
            if row.len() != classes {
                return Err(FusionError::ShapeMismatch("ragged accuracy table".into()));
            }
            if let Some(&bad) = row.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(FusionError::InvalidConfig(format!(
                    "accuracy {bad} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            classifiers,
            classes,
            acc,
        })
    }

    /// Measure per-class accuracies on a dataset; every class must occur.
    pub fn fit(dataset: &FusionDataset) -> Result<Self> {
        let (n_cls, k_cls) = (dataset.classifier_count(), dataset.classes());
        let mut counts = vec![0usize; k_cls];
        let mut hits = vec![vec![0usize; k_cls]; n_cls];
        for p in dataset.patterns() {
            let label = p.label();
            counts[label] += 1;
            for (n, y) in p.scores.iter().enumerate() {
                if argmax(y.scores()) == label {
                    hits[n][label] += 1;
                }
            }
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(FusionError::EmptyClass { class });
        }
        let acc = hits
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&counts)
                    .map(|(&h, &c)| h as f64 / c as f64)
                    .collect()
            })
            .collect();
        Self::new(acc)
    }

    pub fn classifiers(&self) -> usize {
        self.classifiers
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.acc[n][k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.acc
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.acc.iter().map(|row| row[k]).collect()
    }

    pub fn select_classifiers(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(FusionError::EmptySubset);
        }
        let rows = subset
            .iter()
            .map(|&n| {
                self.acc
                    .get(n)
                    .cloned()
                    .ok_or(FusionError::IndexOutOfRange {
                        index: n + 1,
                        size: self.classifiers,
                    })
            })
            .collect::<Result<_>>()?;
        Self::new(rows)
    }

    /// Weights `acc[n][k] / Σ_m acc[m][k]`; uniform for an all-zero column.
    pub fn normalized_weights(&self, k: usize) -> Vec<f64> {
        let col = self.column(k);
        let total: f64 = col.iter().sum();
        if total > 0.0 {
            col.iter().map(|a| a / total).collect()
        } else {
            vec![1.0 / self.classifiers as f64; self.classifiers]
        }
    }
}

/// Scores weighted per class by normalized training accuracy.
pub fn weighted_sum(ys: &[ScoreVector], table: &ClassAccuracyTable) -> Result<Vec<f64>> {
    let k = check_aligned(ys)?;
    if table.classifiers() != ys.len() || table.classes() != k {
        return Err(FusionError::ShapeMismatch(format!(
            "accuracy table is {}x{}, scores are {}x{k}",
            table.classifiers(),
            table.classes(),
            ys.len()
        )));
    }
    Ok((0..k)
        .map(|c| {
            let col = table.column(c);
            if col.windows(2).all(|w| w[0] == w[1]) {
                // equal weights: the plain average, bit for bit
                return ys.iter().map(|y| y[c]).sum::<f64>() / ys.len() as f64;
            }
            table
                .normalized_weights(c)
                .iter()
                .zip(ys)
                .map(|(w, y)| w * y[c])
                .sum()
        })
        .collect())
}
