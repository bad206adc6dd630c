//! Online gradient-descent estimation of [`EvidenceParams`].
//!
//! The error of one pattern is `Err = ‖z − t‖²`. Gradients follow the chain
//! `∂Err/∂z(k) · ∂z(k)/∂m_n(θ_k) · ∂m_n(θ_k)/∂w_k^n` through the k-th
//! combined confidence only; the cross terms through the other `z(j)` and
//! through `m_n(Θ)` are not part of the update. For `g_n`, which feeds every
//! class, the per-class chains are summed.
//!
//! `∂z(k)/∂m_n(θ_k)` differentiates the two-source combination
//! `z = m_I ⊕ m_n` (where `m_I` fuses every classifier except `n`) with
//! respect to `m_n(θ_k)` while `m_I`, `m_n(Θ)` and the other `m_n(θ_p)` are
//! held fixed.

use log::{debug, warn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dempster::combine_many;
use crate::error::{FusionError, Result};
use crate::evidence::{bbas, fuse, proximities, FusedOutput};
use crate::model::{
    EvidenceParams, FusionDataset, MassFunction, Mode, Rule, ScoreVector, TrainConfig,
    IGNORANCE_FLOOR,
};

/// Below this, the combination denominator is treated as degenerate and the
/// classifier's contribution for the pattern is dropped.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Lower bound for randomly initialized ignorance terms.
pub const INITIAL_IGNORANCE_FLOOR: f64 = 0.01;

/// Gradients of one pattern plus the factors they are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    /// `∂Err/∂w`, laid out like [`EvidenceParams::weights`].
    pub d_weights: Vec<f64>,
    /// `∂Err/∂g_n`.
    pub d_ignorance: Vec<f64>,
    /// `∂Err/∂z(k)`, length K.
    pub d_err_dz: Vec<f64>,
    /// `∂z(k)/∂m_n(θ_k)`, N×K row-major.
    pub dz_dm: Vec<f64>,
    /// `∂m_n(θ_k)/∂w_k^n`, laid out like the weights.
    pub dm_dw: Vec<f64>,
    /// `∂m_n(θ_k)/∂g_n`, N×K row-major.
    pub dm_dg: Vec<f64>,
    /// Classifiers whose contribution was zeroed for a degenerate denominator.
    pub degenerate: usize,
}

/// Squared error of one fused output against a target.
pub fn pattern_error(z: &FusedOutput, t: &[f64]) -> Result<f64> {
    squared_error(&z.z, t)
}

pub(crate) fn squared_error(z: &[f64], t: &[f64]) -> Result<f64> {
    if z.len() != t.len() {
        return Err(FusionError::ShapeMismatch(format!(
            "output has {} entries, target has {}",
            z.len(),
            t.len()
        )));
    }
    Ok(z.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `∂z(k)/∂m_n(θ_k)` for the combination of `m_n` with the rest `m_i`.
///
/// Returns `None` when `1 − conflict` falls below [`DEGENERATE_DENOMINATOR`].
pub fn combination_sensitivity(m_n: &MassFunction, m_i: &MassFunction, k: usize) -> Option<f64> {
    let a = m_n.singletons();
    let b = m_i.singletons();
    let a_sum: f64 = a.iter().sum();
    let b_sum: f64 = b.iter().sum();
    let agree: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let denom = 1.0 - (a_sum * b_sum - agree);
    if denom < DEGENERATE_DENOMINATOR {
        return None;
    }
    let joint = a[k] * b[k] + a[k] * m_i.theta() + m_n.theta() * b[k];
    let rest: f64 = b_sum - b[k];
    Some((denom * (b[k] + m_i.theta()) + joint * rest) / (denom * denom))
}

/// Gradients of the pattern error with respect to weights and ignorance.
pub fn compute_gradients(
    params: &EvidenceParams,
    ys: &[ScoreVector],
    t: &[f64],
) -> Result<GradientSet> {
    let (n_cls, k_cls) = (params.classifiers(), params.classes());
    if t.len() != k_cls {
        return Err(FusionError::ShapeMismatch(format!(
            "target has {} entries, frame has {k_cls}",
            t.len()
        )));
    }
    let masses = bbas(params, ys)?;
    let fused = combine_many(&masses, Rule::Normalized)?;
    let d_err_dz: Vec<f64> = fused
        .singletons()
        .iter()
        .zip(t)
        .map(|(z, t)| 2.0 * (z - t))
        .collect();

    let dim = params.reference_len();
    let mut grads = GradientSet {
        d_weights: vec![0.0; params.weights().len()],
        d_ignorance: vec![0.0; n_cls],
        d_err_dz,
        dz_dm: vec![0.0; n_cls * k_cls],
        dm_dw: vec![0.0; params.weights().len()],
        dm_dg: vec![0.0; n_cls * k_cls],
        degenerate: 0,
    };

    for (n, y) in ys.iter().enumerate() {
        let others: Vec<MassFunction> = masses
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != n)
            .map(|(_, m)| m.clone())
            .collect();
        let m_i = if others.is_empty() {
            MassFunction::vacuous(k_cls)
        } else {
            combine_many(&others, Rule::Normalized)?
        };

        let d = proximities(params, n, y.scores());
        let g = params.ignorance()[n];
        let total = d.iter().sum::<f64>() + g;
        let total_sq = total * total;

        let mut zeroed = false;
        for k in 0..k_cls {
            let row = n * k_cls + k;
            let Some(sens) = combination_sensitivity(&masses[n], &m_i, k) else {
                zeroed = true;
                continue;
            };
            grads.dz_dm[row] = sens;

            // Σ_{p≠k} d_p + g
            let rest = d
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != k)
                .map(|(_, v)| v)
                .sum::<f64>()
                + g;
            let reference = params.reference(n, k);
            let at = row * dim;
            for (j, w) in reference.iter().enumerate() {
                let score = match params.mode() {
                    Mode::Ds1 => y[j],
                    Mode::Ds2 => y[k],
                };
                grads.dm_dw[at + j] = -2.0 * d[k] * (w - score) * rest / total_sq;
            }
            grads.dm_dg[row] = -d[k] / total_sq;

            let upstream = grads.d_err_dz[k] * sens;
            for j in 0..dim {
                grads.d_weights[at + j] = upstream * grads.dm_dw[at + j];
            }
            grads.d_ignorance[n] += upstream * grads.dm_dg[row];
        }
        if zeroed {
            grads.degenerate += 1;
            for k in 0..k_cls {
                let row = n * k_cls + k;
                grads.dz_dm[row] = 0.0;
                grads.d_weights[row * dim..(row + 1) * dim].fill(0.0);
            }
            grads.d_ignorance[n] = 0.0;
        }
    }
    Ok(grads)
}

/// One gradient step: `w ← w − α ∂Err/∂w`, and when `update_g` is set,
/// `g ← max(g − β ∂Err/∂g, floor)`.
pub fn apply_update(
    params: &EvidenceParams,
    grads: &GradientSet,
    alpha: f64,
    beta: f64,
    update_g: bool,
) -> Result<EvidenceParams> {
    if grads.d_weights.len() != params.weights().len()
        || grads.d_ignorance.len() != params.classifiers()
    {
        return Err(FusionError::ShapeMismatch(
            "gradient shape does not match parameters".into(),
        ));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(FusionError::InvalidConfig(format!(
            "learning rates must be positive (alpha {alpha}, beta {beta})"
        )));
    }
    let mut next = params.clone();
    for (i, (w, dw)) in next
        .weights_mut()
        .iter_mut()
        .zip(&grads.d_weights)
        .enumerate()
    {
        *w -= alpha * dw;
        if !w.is_finite() {
            return Err(FusionError::NonFinite {
                context: format!("weight {i} after update (gradient {dw})"),
                value: *w,
            });
        }
    }
    if update_g {
        for (n, (g, dg)) in next
            .ignorance_mut()
            .iter_mut()
            .zip(&grads.d_ignorance)
            .enumerate()
        {
            *g -= beta * dg;
            if !g.is_finite() {
                return Err(FusionError::NonFinite {
                    context: format!("ignorance {n} after update (gradient {dg})"),
                    value: *g,
                });
            }
            *g = g.max(IGNORANCE_FLOOR);
        }
    }
    Ok(next)
}

/// Why training ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    EpochCap,
    Patience,
    Converged,
}

/// Per-epoch history of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    /// Mean pattern error over the dataset after each epoch.
    pub epoch_mse: Vec<f64>,
    /// Learning rate used during each epoch.
    pub epoch_alpha: Vec<f64>,
    pub epochs_run: usize,
    pub stop_reason: StopReason,
    /// Mean pattern error of the initial parameters.
    pub initial_mse: f64,
    /// Mean pattern error of the returned parameters.
    pub best_mse: f64,
    /// Total zeroed classifier contributions from degenerate denominators.
    pub degenerate_steps: usize,
}

impl TrainTrace {
    /// `epoch,mse,alpha` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mse,alpha\n");
        for (i, (mse, alpha)) in self.epoch_mse.iter().zip(&self.epoch_alpha).enumerate() {
            out.push_str(&format!("{},{mse},{alpha}\n", i + 1));
        }
        out
    }
}

/// Mean pattern error of `params` over a dataset.
pub fn dataset_mse(params: &EvidenceParams, dataset: &FusionDataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(FusionError::EmptyDataset);
    }
    let mut total = 0.0;
    for p in dataset.patterns() {
        total += pattern_error(&fuse(params, &p.scores)?, &p.target)?;
    }
    Ok(total / dataset.len() as f64)
}

/// Seeded uniform(0, 1) references and ignorance (ignorance floored at 0.01).
pub fn initial_params(
    mode: Mode,
    classifiers: usize,
    classes: usize,
    rng: &mut impl Rng,
) -> Result<EvidenceParams> {
    let weights = (0..classifiers * classes * mode.reference_len(classes))
        .map(|_| rng.random::<f64>())
        .collect();
    let ignorance = (0..classifiers)
        .map(|_| rng.random::<f64>().max(INITIAL_IGNORANCE_FLOOR))
        .collect();
    EvidenceParams::new(mode, classifiers, classes, weights, ignorance)
}

/// Train evidence parameters with per-pattern updates.
///
/// Each epoch visits every pattern once. Ignorance terms are only updated in
/// the first `g_update_epochs` epochs. After an epoch that fails to improve
/// on the best mean error, the best parameters are restored and alpha is
/// multiplied by `lr_decay`. Training stops at `max_epochs`, after
/// `patience` consecutive failures, or when the error reaches zero. The best
/// parameters seen are returned.
pub fn train(
    dataset: &FusionDataset,
    config: &TrainConfig,
) -> Result<(EvidenceParams, TrainTrace)> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(FusionError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = initial_params(
        config.mode,
        dataset.classifier_count(),
        dataset.classes(),
        &mut rng,
    )?;
    let initial_mse = dataset_mse(&init, dataset)?;
    debug!("initial mse {initial_mse}");

    let mut best = init;
    let mut best_mse = initial_mse;
    let mut alpha = config.alpha_init;
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut failures = 0;
    let mut degenerate_steps = 0;
    let mut epoch_mse = Vec::new();
    let mut epoch_alpha = Vec::new();
    let mut stop_reason = StopReason::EpochCap;

    for epoch in 0..config.max_epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        let update_g = epoch < config.g_update_epochs;
        let mut params = best.clone();
        for &i in &order {
            let p = &dataset.patterns()[i];
            let grads = compute_gradients(&params, &p.scores, &p.target)?;
            degenerate_steps += grads.degenerate;
            params = apply_update(&params, &grads, alpha, config.beta, update_g)?;
        }
        let mse = dataset_mse(&params, dataset)?;
        epoch_mse.push(mse);
        epoch_alpha.push(alpha);
        debug!("epoch {} mse {mse} alpha {alpha}", epoch + 1);

        if mse < best_mse {
            best = params;
            best_mse = mse;
            failures = 0;
            if best_mse <= f64::EPSILON {
                stop_reason = StopReason::Converged;
                break;
            }
        } else {
            alpha *= config.lr_decay;
            failures += 1;
            if failures >= config.patience {
                stop_reason = StopReason::Patience;
                break;
            }
        }
    }
    if degenerate_steps > 0 {
        warn!("{degenerate_steps} gradient contributions zeroed near total conflict");
    }
    let trace = TrainTrace {
        epochs_run: epoch_mse.len(),
        epoch_mse,
        epoch_alpha,
        stop_reason,
        initial_mse,
        best_mse,
        degenerate_steps,
    };
    Ok((best, trace))
}
