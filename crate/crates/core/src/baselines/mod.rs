//! Comparison combiners: weighted sum, average, median, maximum, majority
//! vote, class-mean evidence (DS0) and the fuzzy integral.

mod ds0;
mod fuzzy;
mod simple;

pub use ds0::{
    class_evidence, class_support, complement_support, ds0_combine, ds0_fit, proximity,
    Ds0Reference, CLASS_BIT, COMPLEMENT_BIT, FRAME_MASK,
};
pub use fuzzy::{
    descending_order, fi_combine, fi_densities, fuzzy_integral, measure_chain, solve_lambda,
    FuzzyCombiner, FuzzyDensities, CHAIN_TOLERANCE, DEFAULT_DENSITY_SUM, DENSITY_MAX, DENSITY_MIN,
    LAMBDA_RESIDUAL,
};
pub use simple::{average, majority_vote, maximum, median, weighted_sum, ClassAccuracyTable};
