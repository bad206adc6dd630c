//! Dempster's rule of combination.
//!
//! Two implementations live here: a fast path for mass functions whose focal
//! elements are singletons and the whole frame, and a general rule over
//! bitmask-encoded subsets. The general rule doubles as the oracle for the
//! fast path (see [`lift_to_powerset`] and [`project`]).

use std::collections::BTreeMap;

use crate::error::{FusionError, Result};
use crate::model::{MassFunction, PowersetMass, Rule};

/// Conflict at or above this level makes the normalized rule undefined.
pub const TOTAL_CONFLICT: f64 = 1.0 - 1e-12;

/// Mass that the conjunctive combination sends to the empty set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictReport {
    pub conflict_mass: f64,
}

/// Combine two singleton+Θ mass functions.
pub fn combine_pair(m1: &MassFunction, m2: &MassFunction, rule: Rule) -> Result<MassFunction> {
    combine_pair_with_conflict(m1, m2, rule).map(|(m, _)| m)
}

/// [`combine_pair`] that also reports the conflict mass.
pub fn combine_pair_with_conflict(
    m1: &MassFunction,
    m2: &MassFunction,
    rule: Rule,
) -> Result<(MassFunction, ConflictReport)> {
    combine_step(m1, m2, rule, 1)
}

fn combine_step(
    m1: &MassFunction,
    m2: &MassFunction,
    rule: Rule,
    step: usize,
) -> Result<(MassFunction, ConflictReport)> {
    let k = m1.frame_size();
    if k != m2.frame_size() {
        return Err(FusionError::FrameMismatch {
            left: k,
            right: m2.frame_size(),
        });
    }
    let (a, b) = (m1.singletons(), m2.singletons());
    let (a_theta, b_theta) = (m1.theta(), m2.theta());

    let a_sum: f64 = a.iter().sum();
    let b_sum: f64 = b.iter().sum();
    let agree: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    // Σ_p Σ_{q≠p} a_p b_q
    let singleton_conflict = (a_sum * b_sum - agree).max(0.0);
    let empty = m1.empty() * (b_sum + b_theta + m2.empty())
        + (a_sum + a_theta) * m2.empty()
        + singleton_conflict;

    let joint: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x * y + (x * b_theta + a_theta * y))
        .collect();
    let theta = a_theta * b_theta;
    let report = ConflictReport {
        conflict_mass: empty,
    };

    match rule {
        Rule::Unnormalized => Ok((MassFunction::from_parts(joint, theta, empty), report)),
        Rule::Normalized => {
            if empty >= TOTAL_CONFLICT {
                return Err(FusionError::TotalConflict {
                    conflict: empty,
                    step,
                });
            }
            let scale = 1.0 - empty;
            let singletons = joint.into_iter().map(|v| v / scale).collect();
            Ok((
                MassFunction::from_parts(singletons, theta / scale, 0.0),
                report,
            ))
        }
    }
}

/// Left fold of [`combine_pair`] over `masses` in list order.
pub fn combine_many(masses: &[MassFunction], rule: Rule) -> Result<MassFunction> {
    let (first, rest) = masses
        .split_first()
        .ok_or(FusionError::EmptyInput("no mass functions to combine"))?;
    let mut acc = first.clone();
    for (i, m) in rest.iter().enumerate() {
        acc = combine_step(&acc, m, rule, i + 1)?.0;
    }
    Ok(acc)
}

/// Dempster's rule over arbitrary subsets.
pub fn combine_powerset(m1: &PowersetMass, m2: &PowersetMass, rule: Rule) -> Result<PowersetMass> {
    combine_powerset_with_conflict(m1, m2, rule).map(|(m, _)| m)
}

/// [`combine_powerset`] that also reports the conflict mass.
pub fn combine_powerset_with_conflict(
    m1: &PowersetMass,
    m2: &PowersetMass,
    rule: Rule,
) -> Result<(PowersetMass, ConflictReport)> {
    if m1.frame_size() != m2.frame_size() {
        return Err(FusionError::FrameMismatch {
            left: m1.frame_size(),
            right: m2.frame_size(),
        });
    }
    let mut out: BTreeMap<u32, f64> = BTreeMap::new();
    for (a, x) in m1.focal_elements() {
        for (b, y) in m2.focal_elements() {
            *out.entry(a & b).or_insert(0.0) += x * y;
        }
    }
    let conflict = out.get(&0).copied().unwrap_or(0.0);
    let report = ConflictReport {
        conflict_mass: conflict,
    };
    match rule {
        Rule::Unnormalized => Ok((PowersetMass::from_map(m1.frame_size(), out), report)),
        Rule::Normalized => {
            if conflict >= TOTAL_CONFLICT {
                return Err(FusionError::TotalConflict { conflict, step: 1 });
            }
            out.remove(&0);
            let scale = 1.0 - conflict;
            for v in out.values_mut() {
                *v /= scale;
            }
            Ok((PowersetMass::from_map(m1.frame_size(), out), report))
        }
    }
}

/// Degree of belief in `subset`: total mass of its nonempty subsets.
pub fn belief(m: &PowersetMass, subset: u32) -> Result<f64> {
    if subset == 0 {
        return Err(FusionError::EmptySubset);
    }
    if subset & !m.full() != 0 {
        return Err(FusionError::ShapeMismatch(format!(
            "subset {subset:#b} lies outside a frame of {}",
            m.frame_size()
        )));
    }
    Ok(m.focal_elements()
        .filter(|&(a, _)| a != 0 && a & !subset == 0)
        .map(|(_, v)| v)
        .sum())
}

/// Singleton θ_k becomes bit k; Θ becomes the full mask; m(∅) stays on mask 0.
pub fn lift_to_powerset(m: &MassFunction) -> PowersetMass {
    let k = m.frame_size();
    let mut map = BTreeMap::new();
    for (i, &v) in m.singletons().iter().enumerate() {
        map.insert(1u32 << i, v);
    }
    map.insert(PowersetMass::full_mask(k), m.theta());
    map.insert(0, m.empty());
    PowersetMass::from_map(k, map)
}

/// Inverse of [`lift_to_powerset`]; fails on any composite focal element
/// other than the whole frame.
pub fn project(p: &PowersetMass) -> Result<MassFunction> {
    let k = p.frame_size();
    if k < 2 {
        return Err(FusionError::InvalidFrame(format!(
            "need at least 2 hypotheses, got {k}"
        )));
    }
    let full = p.full();
    let mut singletons = vec![0.0; k];
    let (mut theta, mut empty) = (0.0, 0.0);
    for (mask, v) in p.focal_elements() {
        if mask == 0 {
            empty = v;
        } else if mask == full {
            theta = v;
        } else if mask.is_power_of_two() {
            singletons[mask.trailing_zeros() as usize] = v;
        } else {
            return Err(FusionError::NonSingletonFocal { mask });
        }
    }
    Ok(MassFunction::from_parts(singletons, theta, empty))
}
