use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::profile::intrinsic_dimension;

/// Chavez intrinsic dimension, or the degenerate case of zero spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChavezId {
    Finite(f64),
    /// All pairwise distances coincide, so the variance vanishes.
    Undefined,
}

/// Δ and ∂ computed in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDimension {
    pub delta: BigRational,
    /// `None` stands for ∂ = ∞.
    pub dimension: Option<BigRational>,
}

impl ExactDimension {
    pub fn from_delta(delta: BigRational) -> Self {
        let dimension = if delta.is_zero() {
            None
        } else {
            Some(BigRational::one() / (&delta * &delta))
        };
        Self { delta, dimension }
    }
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_fraction(r: &BigRational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closest `f64` to `r`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub delta: f64,
    /// `f64::INFINITY` when `delta == 0`.
    pub dimension: f64,
    pub chavez_id: Option<ChavezId>,
    pub levy_defect: Option<f64>,
    pub exact: Option<ExactDimension>,
    pub n_points: usize,
    pub n_features: usize,
}

impl DimensionReport {
    pub fn from_delta(delta: f64, n_points: usize, n_features: usize) -> Result<Self> {
        Ok(Self {
            delta,
            dimension: intrinsic_dimension(delta)?,
            chavez_id: None,
            levy_defect: None,
            exact: None,
            n_points,
            n_features,
        })
    }

    pub fn from_exact(exact: ExactDimension, n_points: usize, n_features: usize) -> Result<Self> {
        let delta = rational_to_f64(&exact.delta);
        let mut report = Self::from_delta(delta, n_points, n_features)?;
        report.dimension = exact
            .dimension
            .as_ref()
            .map_or(f64::INFINITY, rational_to_f64);
        report.exact = Some(exact);
        Ok(report)
    }
}
