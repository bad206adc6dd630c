//! Classifier fusion with trainable Dempster-Shafer evidence.
//!
//! Each classifier's score vector is turned into a basic belief assignment
//! over the class singletons and the whole frame, using per-class references
//! and a per-classifier ignorance term learned by online gradient descent.
//! The assignments are fused with Dempster's rule. Baseline combiners
//! (weighted sum, average, median, maximum, majority vote, class-mean
//! evidence and the Sugeno fuzzy integral) and evaluation metrics are
//! included for comparison.

pub mod baselines;
pub mod data;
pub mod dempster;
pub mod error;
pub mod evidence;
pub mod metrics;
pub mod model;
pub mod trainer;

pub use error::{FusionError, Result};
pub use model::{
    make_mass, one_hot, EvidenceParams, Frame, FusionDataset, MassFunction, Mode, Pattern,
    PowersetMass, Rule, ScoreVector, TrainConfig,
};
