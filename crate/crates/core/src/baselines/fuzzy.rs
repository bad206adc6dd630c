//! Sugeno fuzzy integral over a λ-fuzzy measure.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::model::ScoreVector;

use super::ClassAccuracyTable;

/// Default target for the sum of a class's fuzzy densities.
pub const DEFAULT_DENSITY_SUM: f64 = 1.2;
/// Upper clamp for a single density.
pub const DENSITY_MAX: f64 = 0.9999;
/// Lower clamp for a single density.
pub const DENSITY_MIN: f64 = 1e-6;
/// Allowed `|(λ+1) − Π(1+λg)|` after solving.
pub const LAMBDA_RESIDUAL: f64 = 1e-10;
/// Allowed deviation of the full-set measure from 1.
pub const CHAIN_TOLERANCE: f64 = 1e-6;

/// Densities of one class plus the solved λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyDensities {
    pub g: Vec<f64>,
    pub lambda: f64,
    pub density_sum_target: f64,
}

impl FuzzyDensities {
    /// Densities given directly; λ is solved here.
    pub fn from_densities(g: Vec<f64>) -> Result<Self> {
        let lambda = solve_lambda(&g)?;
        let density_sum_target = g.iter().sum();
        Ok(Self {
            g,
            lambda,
            density_sum_target,
        })
    }
}

fn lambda_gap(g: &[f64], lambda: f64) -> f64 {
    g.iter().map(|gi| 1.0 + lambda * gi).product::<f64>() - (1.0 + lambda)
}

/// The root λ > −1, λ ≠ 0 of `λ + 1 = Π(1 + λ g^i)`.
///
/// Returns 0 when the densities already sum to one (additive measure) and for
/// a single density, where no nonzero root exists.
pub fn solve_lambda(g: &[f64]) -> Result<f64> {
    if g.is_empty() {
        return Err(FusionError::EmptyInput("no fuzzy densities"));
    }
    if let Some(&bad) = g.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(FusionError::InvalidConfig(format!(
            "fuzzy density {bad} outside (0, 1)"
        )));
    }
    let total: f64 = g.iter().sum();
    if g.len() == 1 || (total - 1.0).abs() <= 1e-9 {
        return Ok(0.0);
    }

    // Keep lo on the side where the gap has the sign it has next to zero.
    let (mut lo, mut hi, lo_negative) = if total < 1.0 {
        let mut hi = 1.0;
        while lambda_gap(g, hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                return Err(FusionError::NoRoot {
                    densities: g.to_vec(),
                    residual: f64::NAN,
                });
            }
        }
        (0.0, hi, true)
    } else {
        (-1.0 + 1e-12, 0.0, false)
    };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gap = lambda_gap(g, mid);
        let on_lo_side = if lo_negative { gap <= 0.0 } else { gap > 0.0 };
        if on_lo_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = [lo, hi]
        .into_iter()
        .filter(|&l| l != 0.0)
        .min_by(|a, b| lambda_gap(g, *a).abs().total_cmp(&lambda_gap(g, *b).abs()))
        .expect("bracket has a nonzero end");
    let residual = lambda_gap(g, lambda).abs();
    if residual > LAMBDA_RESIDUAL || lambda <= -1.0 {
        return Err(FusionError::NoRoot {
            densities: g.to_vec(),
            residual,
        });
    }
    Ok(lambda)
}

/// Densities for class `k`: accuracies scaled to sum to `target_sum`, each
/// clamped to `[DENSITY_MIN, DENSITY_MAX]`.
pub fn fi_densities(
    table: &ClassAccuracyTable,
    k: usize,
    target_sum: f64,
) -> Result<FuzzyDensities> {
    if !(target_sum > 0.0 && target_sum.is_finite()) {
        return Err(FusionError::InvalidConfig(format!(
            "density sum target must be > 0, got {target_sum}"
        )));
    }
    if k >= table.classes() {
        return Err(FusionError::IndexOutOfRange {
            index: k + 1,
            size: table.classes(),
        });
    }
    let column = table.column(k);
    let total: f64 = column.iter().sum();
    if total <= 0.0 {
        return Err(FusionError::DegenerateColumn { class: k });
    }
    let g = column
        .iter()
        .map(|a| (target_sum * a / total).clamp(DENSITY_MIN, DENSITY_MAX))
        .collect::<Vec<_>>();
    let lambda = solve_lambda(&g)?;
    Ok(FuzzyDensities {
        g,
        lambda,
        density_sum_target: target_sum,
    })
}

/// Measures `g(A_1) ≤ … ≤ g(A_N)` of the nested sets built by visiting
/// elements in `order`.
pub fn measure_chain(dens: &FuzzyDensities, order: &[usize]) -> Vec<f64> {
    let mut chain = Vec::with_capacity(order.len());
    let mut prev = 0.0;
    for (i, &e) in order.iter().enumerate() {
        let gi = dens.g[e];
        prev = if i == 0 {
            gi
        } else {
            gi + prev + dens.lambda * gi * prev
        };
        chain.push(prev);
    }
    chain
}

/// Indices sorted by `h` descending, ties kept in input order.
pub fn descending_order(h: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| h[b].total_cmp(&h[a]));
    order
}

/// Sugeno integral `max_i min(h(z_i), g(A_i))` with `h` sorted descending.
pub fn fuzzy_integral(h: &[f64], dens: &FuzzyDensities) -> Result<f64> {
    if h.is_empty() {
        return Err(FusionError::EmptyInput("no partial evaluations"));
    }
    if h.len() != dens.g.len() {
        return Err(FusionError::ShapeMismatch(format!(
            "{} evaluations for {} densities",
            h.len(),
            dens.g.len()
        )));
    }
    if let Some(&bad) = h.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(FusionError::InvalidConfig(format!(
            "partial evaluation {bad} outside [0, 1]"
        )));
    }
    let order = descending_order(h);
    let chain = measure_chain(dens, &order);
    let last = *chain.last().expect("nonempty");
    if h.len() > 1 && (last - 1.0).abs() > CHAIN_TOLERANCE {
        return Err(FusionError::ChainNotNormalized { value: last });
    }
    Ok(order
        .iter()
        .zip(&chain)
        .map(|(&e, &g)| h[e].min(g))
        .fold(0.0, f64::max))
}

/// Fuzzy-integral combiner with per-class densities fixed from a training
/// accuracy table.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyCombiner {
    densities: Vec<FuzzyDensities>,
}

impl FuzzyCombiner {
    pub fn new(table: &ClassAccuracyTable, target_sum: f64) -> Result<Self> {
        let densities = (0..table.classes())
            .map(|k| fi_densities(table, k, target_sum))
            .collect::<Result<_>>()?;
        Ok(Self { densities })
    }

    pub fn densities(&self) -> &[FuzzyDensities] {
        &self.densities
    }

    /// Per-class integrals. Score vectors with entries outside [0, 1] are
    /// min-max rescaled first.
    pub fn combine(&self, ys: &[ScoreVector]) -> Result<Vec<f64>> {
        let classifiers = self.densities[0].g.len();
        if ys.len() != classifiers || ys.iter().any(|y| y.len() != self.densities.len()) {
            return Err(FusionError::ShapeMismatch(format!(
                "combiner expects {classifiers} score vectors of length {}",
                self.densities.len()
            )));
        }
        let scores: Vec<Vec<f64>> = ys.iter().map(|y| unit_range(y.scores())).collect();
        self.densities
            .iter()
            .enumerate()
            .map(|(k, dens)| {
                let h: Vec<f64> = scores.iter().map(|s| s[k]).collect();
                fuzzy_integral(&h, dens)
            })
            .collect()
    }
}

fn unit_range(y: &[f64]) -> Vec<f64> {
    if y.iter().all(|v| (0.0..=1.0).contains(v)) {
        return y.to_vec();
    }
    warn!("scores {y:?} outside [0, 1]; min-max rescaling for the fuzzy integral");
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    y.iter()
        .map(|v| if span > 0.0 { (v - lo) / span } else { 0.5 })
        .collect()
}

/// Per-class fuzzy-integral confidences for one pattern.
pub fn fi_combine(
    ys: &[ScoreVector],
    table: &ClassAccuracyTable,
    target_sum: f64,
) -> Result<Vec<f64>> {
    if ys.is_empty() {
        return Err(FusionError::EmptyInput("no score vectors"));
    }
    FuzzyCombiner::new(table, target_sum)?.combine(ys)
}
