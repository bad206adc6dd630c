//! Seeded synthetic classifier outputs.
//!
//! Classifier n emits `softmax(s[n][c] · onehot(c) + T · ε)` for a pattern of
//! true class c, where `ε = √ρ · shared + √(1−ρ) · own` mixes a per-pattern
//! noise draw shared by all classifiers with the classifier's own draw. Each
//! signal `s[n][c]` is calibrated by bisection on a pilot sample so that the
//! argmax accuracy on class c approaches the requested target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::model::{one_hot, Frame, FusionDataset, Pattern, ScoreVector};

/// Pilot sample size used to calibrate each signal.
pub const PILOT_DRAWS: usize = 2000;
/// Signal search range, in units of the noise temperature.
const SIGNAL_BOUND: f64 = 40.0;

/// Parameters of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    /// Number of classes K.
    pub classes: usize,
    /// Number of classifiers N.
    pub classifiers: usize,
    pub pattern_count: usize,
    /// Extra held-out patterns drawn after the main ones (same calibration).
    #[serde(default)]
    pub test_pattern_count: usize,
    /// Target argmax accuracy per classifier (rows) and class (columns).
    pub accuracy: Vec<Vec<f64>>,
    pub noise_temperature: f64,
    /// Weight of the shared noise component, in [0, 1).
    #[serde(default)]
    pub correlation: f64,
    pub seed: u64,
    /// Optional class labels; defaults to `c1..cK`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SynthSpec {
    /// Same accuracy target for every classifier and class.
    pub fn uniform(
        classes: usize,
        classifiers: usize,
        pattern_count: usize,
        accuracy: f64,
        seed: u64,
    ) -> Self {
        Self {
            classes,
            classifiers,
            pattern_count,
            test_pattern_count: 0,
            accuracy: vec![vec![accuracy; classes]; classifiers],
            noise_temperature: 1.0,
            correlation: 0.0,
            seed,
            labels: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FusionError::InvalidConfig(msg));
        if self.classes < 2 {
            return bad(format!("need at least 2 classes, got {}", self.classes));
        }
        if self.classifiers == 0 {
            return bad("need at least one classifier".into());
        }
        if self.accuracy.len() != self.classifiers
            || self.accuracy.iter().any(|row| row.len() != self.classes)
        {
            return bad(format!(
                "accuracy table must be {}x{}",
                self.classifiers, self.classes
            ));
        }
        if let Some(a) = self
            .accuracy
            .iter()
            .flatten()
            .find(|a| !(**a > 0.0 && **a <= 1.0))
        {
            return bad(format!("accuracy target {a} outside (0, 1]"));
        }
        if !(self.noise_temperature > 0.0 && self.noise_temperature.is_finite()) {
            return bad(format!(
                "noise_temperature must be > 0, got {}",
                self.noise_temperature
            ));
        }
        if !(0.0..1.0).contains(&self.correlation) {
            return bad(format!(
                "correlation must lie in [0, 1), got {}",
                self.correlation
            ));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.classes {
                return bad(format!(
                    "{} labels for {} classes",
                    labels.len(),
                    self.classes
                ));
            }
        }
        Ok(())
    }

    pub fn frame(&self) -> Result<Frame> {
        match &self.labels {
            Some(labels) => Frame::new(labels.clone()),
            None => Frame::numbered(self.classes),
        }
    }
}

fn normals(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample(StandardNormal)).collect()
}

/// Smallest signal (within bisection precision) reaching `target` accuracy on
/// a fixed pilot sample.
fn calibrate_signal(target: f64, temperature: f64, class: usize, pilot: &[Vec<f64>]) -> f64 {
    let hi_bound = SIGNAL_BOUND * temperature;
    if target >= 1.0 {
        return hi_bound;
    }
    let accuracy = |s: f64| {
        let hits = pilot
            .iter()
            .filter(|eps| {
                let own = s + temperature * eps[class];
                eps.iter()
                    .enumerate()
                    .all(|(j, e)| j == class || own > temperature * e)
            })
            .count();
        hits as f64 / pilot.len() as f64
    };
    let (mut lo, mut hi) = (-hi_bound, hi_bound);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if accuracy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Calibrated signal per classifier and class.
pub fn calibrate(spec: &SynthSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let (n_cls, k_cls) = (spec.classifiers, spec.classes);
    let mut signals = vec![vec![0.0; k_cls]; n_cls];
    for (n, row) in signals.iter_mut().enumerate() {
        for (c, s) in row.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(1 + (n * k_cls + c) as u64);
            let pilot: Vec<Vec<f64>> = (0..PILOT_DRAWS).map(|_| normals(&mut rng, k_cls)).collect();
            *s = calibrate_signal(spec.accuracy[n][c], spec.noise_temperature, c, &pilot);
        }
    }
    Ok(signals)
}

fn draw_patterns(
    spec: &SynthSpec,
    signals: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Result<Vec<Pattern>> {
    let k = spec.classes;
    let shared_w = spec.correlation.sqrt();
    let own_w = (1.0 - spec.correlation).sqrt();
    (0..count)
        .map(|i| {
            let label = rng.random_range(0..k);
            let shared = normals(rng, k);
            let scores = signals
                .iter()
                .enumerate()
                .map(|(n, signal)| {
                    let own = normals(rng, k);
                    let logits: Vec<f64> = (0..k)
                        .map(|j| {
                            let base = if j == label { signal[label] } else { 0.0 };
                            base + spec.noise_temperature * (shared_w * shared[j] + own_w * own[j])
                        })
                        .collect();
                    ScoreVector::new(softmax(&logits), n)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Pattern {
                id: i as u64 + 1,
                scores,
                target: one_hot(label + 1, k)?,
            })
        })
        .collect()
}

/// Generate `pattern_count` patterns.
pub fn gen_synthetic(spec: &SynthSpec) -> Result<FusionDataset> {
    Ok(gen_split(spec)?.0)
}

/// Generate `pattern_count` patterns followed by `test_pattern_count`
/// held-out patterns from the same stream and calibration.
pub fn gen_split(spec: &SynthSpec) -> Result<(FusionDataset, FusionDataset)> {
    let signals = calibrate(spec)?;
    let frame = spec.frame()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let train = draw_patterns(spec, &signals, &mut rng, spec.pattern_count)?;
    let test = draw_patterns(spec, &signals, &mut rng, spec.test_pattern_count)?;
    Ok((
        FusionDataset::new(frame.clone(), spec.classifiers, train)?,
        FusionDataset::new(frame, spec.classifiers, test)?,
    ))
}
