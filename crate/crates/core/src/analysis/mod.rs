//! Closed-form evaluators (densities, thresholds, tail bounds, the first
//! moment) and the Monte Carlo threshold harness.

mod formulas;
mod moment;
mod threshold;

pub use formulas::{
    binomial_chernoff_tail, chernoff_tail, daykin_haggkvist_check, density, dirac_coefficient, exponent_verdict,
    jkv_threshold, path_hypergraph, strictly_balanced, Tail,
};
pub use moment::{first_moment, ln_factorial, ln_product, MomentReport};
pub use threshold::{
    binomial_half_cdf, estimate_threshold_curve, median_order_interval, wilson_interval, Crossing, CurvePoint,
    MedianEstimate, ThresholdConfig, ThresholdCurve, TrialRecord, Z_95,
};
