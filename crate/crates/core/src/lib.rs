//! Robustness certification of ridge-regression predictions under training-label
//! multiplicity.
//!
//! A training set `(X, y)` is assumed to carry up to `k` inaccurate labels, each
//! wrong by at most a per-sample interval and only on samples selected by an
//! eligibility predicate. Because the ridge prediction for a test point `x` is a
//! linear functional `z · y` of the labels, the exact range of attainable
//! predictions is found greedily ([`exact`]), and a box enclosing every attainable
//! weight vector certifies many points at once ([`approx`]). The [`oracle`]
//! module holds brute-force references used to check both.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod approx;
pub mod config;
pub mod error;
pub mod exact;
pub mod interval;
pub mod linalg;
pub mod multiplicity;
pub mod oracle;

pub use approx::{build_theta_box, certify_approx, ApproxVerdict, ThetaBox};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use exact::{
    certify_classification, certify_regression, max_prediction, min_prediction,
    potential_impacts, prediction_range, Direction, PredictionRange, Verdict, VerdictStatus,
};
pub use interval::{interval_add, interval_dot, interval_scale, Interval};
pub use linalg::{
    coefficient_map, fit_ridge, influence, CoefficientMap, Dataset, InfluenceVector, LabelKind,
    Matrix, RidgeCertifier, RidgeModel,
};
pub use multiplicity::{
    materialize_spec, targeted_demote, targeted_promote, validate_witness, BiasRule, Budget,
    Comparison, FeatureCondition, MultiplicitySpec, PerturbationWitness,
};
pub use oracle::{
    oracle_prediction_range, sample_theta, theta_membership, EnumerationBudget, OracleRange,
};

/// Prediction mode of a certification query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// ε-band robustness of a real-valued prediction.
    Regression,
    /// Sign robustness of a `{-1, +1}` classifier thresholded at zero.
    Classification,
}

/// Class assigned to a raw prediction: `+1` iff strictly positive.
#[inline]
pub fn predicted_class(prediction: f64) -> f64 {
    if prediction > 0.0 {
        1.0
    } else {
        -1.0
    }
}
