use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};

/// Tolerance on the total mass of a basic belief assignment.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Largest frame representable by [`PowersetMass`].
pub const MAX_POWERSET_FRAME: usize = 20;

/// Combination rule variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Dempster's rule: conflicting mass is discarded and the rest renormalized.
    #[default]
    Normalized,
    /// Conflicting mass is kept on the empty set.
    Unnormalized,
}

/// Basic belief assignment whose focal elements are the singletons and the
/// whole frame (plus the empty set in unnormalized mode).
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    singletons: Vec<f64>,
    theta: f64,
    empty: f64,
}

/// Build a normalized mass function from singleton masses and `m(Θ)`.
///
/// The masses must already sum to one; nothing is renormalized.
pub fn make_mass(singletons: &[f64], theta: f64) -> Result<MassFunction> {
    MassFunction::new(singletons.to_vec(), theta)
}

fn check_masses<'a>(values: impl IntoIterator<Item = &'a f64>) -> Result<f64> {
    let mut sum = 0.0;
    for (index, &value) in values.into_iter().enumerate() {
        if !value.is_finite() {
            return Err(FusionError::NonFinite {
                context: "mass".into(),
                value,
            });
        }
        if value < 0.0 {
            return Err(FusionError::NegativeMass { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > MASS_TOLERANCE {
        return Err(FusionError::NotNormalized {
            sum,
            tolerance: MASS_TOLERANCE,
        });
    }
    Ok(sum)
}

impl MassFunction {
    pub fn new(singletons: Vec<f64>, theta: f64) -> Result<Self> {
        Self::with_empty(singletons, theta, 0.0)
    }

    /// Mass function that may carry conflict on the empty set.
    pub fn with_empty(singletons: Vec<f64>, theta: f64, empty: f64) -> Result<Self> {
        if singletons.len() < 2 {
            return Err(FusionError::InvalidFrame(format!(
                "need at least 2 singletons, got {}",
                singletons.len()
            )));
        }
        check_masses(singletons.iter().chain([&theta, &empty]))?;
        Ok(Self {
            singletons,
            theta,
            empty,
        })
    }

    pub(crate) fn from_parts(singletons: Vec<f64>, theta: f64, empty: f64) -> Self {
        debug_assert!(singletons.len() >= 2);
        Self {
            singletons,
            theta,
            empty,
        }
    }

    /// All mass on Θ.
    pub fn vacuous(k: usize) -> Self {
        Self::from_parts(vec![0.0; k], 1.0, 0.0)
    }

    pub fn frame_size(&self) -> usize {
        self.singletons.len()
    }

    pub fn singletons(&self) -> &[f64] {
        &self.singletons
    }

    pub fn singleton(&self, k: usize) -> f64 {
        self.singletons[k]
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn empty(&self) -> f64 {
        self.empty
    }

    pub fn total(&self) -> f64 {
        self.singletons.iter().sum::<f64>() + self.theta + self.empty
    }
}

/// General basic belief assignment over the subsets of a frame of at most
/// [`MAX_POWERSET_FRAME`] elements, keyed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct PowersetMass {
    frame_size: usize,
    masses: BTreeMap<u32, f64>,
}

impl PowersetMass {
    /// Validates masses; the empty set (mask 0) is only accepted when
    /// `rule` is [`Rule::Unnormalized`]. Zero entries are dropped.
    pub fn new(
        frame_size: usize,
        entries: impl IntoIterator<Item = (u32, f64)>,
        rule: Rule,
    ) -> Result<Self> {
        if frame_size == 0 || frame_size > MAX_POWERSET_FRAME {
            return Err(FusionError::InvalidFrame(format!(
                "powerset frame size must be in 1..={MAX_POWERSET_FRAME}, got {frame_size}"
            )));
        }
        let full = Self::full_mask(frame_size);
        let mut masses = BTreeMap::new();
        for (mask, value) in entries {
            if mask & !full != 0 {
                return Err(FusionError::ShapeMismatch(format!(
                    "subset {mask:#b} lies outside a frame of {frame_size}"
                )));
            }
            if mask == 0 && rule == Rule::Normalized && value != 0.0 {
                return Err(FusionError::InvalidConfig(
                    "normalized mass assigns nonzero mass to the empty set".into(),
                ));
            }
            *masses.entry(mask).or_insert(0.0) += value;
        }
        check_masses(masses.values())?;
        masses.retain(|_, v| *v != 0.0);
        Ok(Self { frame_size, masses })
    }

    pub(crate) fn from_map(frame_size: usize, mut masses: BTreeMap<u32, f64>) -> Self {
        masses.retain(|_, v| *v != 0.0);
        Self { frame_size, masses }
    }

    /// All mass on the whole frame.
    pub fn vacuous(frame_size: usize) -> Result<Self> {
        Self::new(
            frame_size,
            [(Self::full_mask(frame_size), 1.0)],
            Rule::Normalized,
        )
    }

    pub fn full_mask(frame_size: usize) -> u32 {
        if frame_size >= 32 {
            u32::MAX
        } else {
            (1u32 << frame_size) - 1
        }
    }

    pub fn frame_size(&self) -> usize {
        self.frame_size
    }

    pub fn full(&self) -> u32 {
        Self::full_mask(self.frame_size)
    }

    /// Mass of a subset (0 when it is not a focal element).
    pub fn mass(&self, mask: u32) -> f64 {
        self.masses.get(&mask).copied().unwrap_or(0.0)
    }

    /// Focal elements in ascending bitmask order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.masses.iter().map(|(&m, &v)| (m, v))
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }
}
