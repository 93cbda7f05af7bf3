//! Global over-approximation: a box around every attainable weight vector.
//!
//! Coordinate `i` of θ′ = C y′ is the linear functional `Cᵢ · y′`, so the exact
//! greedy bounds it tightly. The resulting box is the smallest hyperrectangle
//! containing the (generally non-convex) set of attainable weights, and a test
//! point is then certified with one interval dot product.

use alloc::vec::Vec;

use crate::config::Tolerances;
use crate::error::{check_len, Error, Result};
use crate::exact::{max_prediction, min_prediction};
use crate::interval::{interval_dot, Interval};
use crate::linalg::{dot, CoefficientMap, Dataset, InfluenceVector, RidgeCertifier};
use crate::multiplicity::{MultiplicitySpec, PerturbationWitness};
use crate::Mode;

/// Label changes attaining the two endpoints of one box coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateWitness {
    pub lower: Vec<(usize, f64)>,
    pub upper: Vec<(usize, f64)>,
}

impl CoordinateWitness {
    pub fn lower_witness(&self, labels: &[f64]) -> PerturbationWitness {
        PerturbationWitness::from_changes(labels, self.lower.clone())
    }

    pub fn upper_witness(&self, labels: &[f64]) -> PerturbationWitness {
        PerturbationWitness::from_changes(labels, self.upper.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaBox {
    pub coords: Vec<Interval>,
    pub base_theta: Vec<f64>,
    pub witnesses: Vec<CoordinateWitness>,
}

/// Bounds one coordinate given its influence functional.
pub fn coordinate_bounds(
    functional: &InfluenceVector,
    labels: &[f64],
    spec: &MultiplicitySpec,
) -> Result<(Interval, f64, CoordinateWitness)> {
    let (lo, wl) = min_prediction(functional, labels, spec)?;
    let (hi, wu) = max_prediction(functional, labels, spec)?;
    let base = functional.base_prediction;
    let iv = Interval {
        lo: lo.min(base),
        hi: hi.max(base),
    };
    Ok((
        iv,
        base,
        CoordinateWitness {
            lower: wl.changed,
            upper: wu.changed,
        },
    ))
}

impl ThetaBox {
    /// Assembles a box from per-coordinate results (e.g. computed in parallel).
    pub fn from_coordinates(parts: Vec<(Interval, f64, CoordinateWitness)>) -> Self {
        let mut coords = Vec::with_capacity(parts.len());
        let mut base_theta = Vec::with_capacity(parts.len());
        let mut witnesses = Vec::with_capacity(parts.len());
        for (iv, b, w) in parts {
            coords.push(iv);
            base_theta.push(b);
            witnesses.push(w);
        }
        ThetaBox {
            coords,
            base_theta,
            witnesses,
        }
    }

    /// Box for an explicitly given coefficient map.
    pub fn from_coefficient_map(
        map: &CoefficientMap,
        labels: &[f64],
        spec: &MultiplicitySpec,
    ) -> Result<Self> {
        let parts = (0..map.c.rows())
            .map(|i| coordinate_bounds(&map.row_functional(i, labels)?, labels, spec))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coordinates(parts))
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    /// Range of `θ′ᵀx` over the box.
    pub fn output_range(&self, x: &[f64]) -> Result<Interval> {
        interval_dot(&self.coords, x)
    }

    pub fn base_prediction(&self, x: &[f64]) -> Result<f64> {
        check_len("test point", self.d(), x.len())?;
        Ok(dot(&self.base_theta, x))
    }
}

impl RidgeCertifier<'_> {
    /// Influence functional of weight coordinate `i`: row `i` of `C`.
    pub fn coordinate_functional(&self, i: usize) -> Result<InfluenceVector> {
        let d = self.data().d();
        if i >= d {
            return Err(Error::DimensionMismatch {
                what: "weight coordinate",
                expected: d,
                found: i,
            });
        }
        let mut e = alloc::vec![0.0; d];
        e[i] = 1.0;
        self.influence(&e)
    }

    pub fn theta_box_coordinate(
        &self,
        spec: &MultiplicitySpec,
        i: usize,
    ) -> Result<(Interval, f64, CoordinateWitness)> {
        coordinate_bounds(&self.coordinate_functional(i)?, self.data().labels(), spec)
    }

    pub fn theta_box(&self, spec: &MultiplicitySpec) -> Result<ThetaBox> {
        check_len("spec", self.data().n(), spec.n())?;
        let parts = (0..self.data().d())
            .map(|i| self.theta_box_coordinate(spec, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(ThetaBox::from_coordinates(parts))
    }
}

pub fn build_theta_box(data: &Dataset, lambda: f64, spec: &MultiplicitySpec) -> Result<ThetaBox> {
    RidgeCertifier::new(data, lambda)?.theta_box(spec)
}

/// The box check is one-sided: failing it proves nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApproxVerdict {
    Robust,
    Unknown,
}

pub fn certify_approx(
    theta_box: &ThetaBox,
    x: &[f64],
    epsilon: f64,
    mode: Mode,
) -> Result<ApproxVerdict> {
    certify_approx_with(theta_box, x, epsilon, mode, &Tolerances::DEFAULT)
}

pub fn certify_approx_with(
    theta_box: &ThetaBox,
    x: &[f64],
    epsilon: f64,
    mode: Mode,
    tol: &Tolerances,
) -> Result<ApproxVerdict> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let out = theta_box.output_range(x)?;
    let base = theta_box.base_prediction(x)?;
    let robust = match mode {
        Mode::Regression => out.is_within(
            &Interval {
                lo: base - epsilon,
                hi: base + epsilon,
            },
            tol.decision,
        ),
        Mode::Classification if base > 0.0 => out.lo > 0.0,
        Mode::Classification => out.hi <= 0.0,
    };
    Ok(if robust {
        ApproxVerdict::Robust
    } else {
        ApproxVerdict::Unknown
    })
}
