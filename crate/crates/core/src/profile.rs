//! Observable-diameter profiles as exact step functions, and the Δ functional.

use std::fmt;

use num_traits::Num;

use crate::error::{Error, Result};
use crate::exec::{max_merge, Exec};
use crate::measure::{pushforward, GeometricDataSet, MASS_TOL};

/// The right-continuous step function `alpha -> ObsDiam(D; -alpha)` on `[0, 1)`.
///
/// `values[j]` holds on `[breakpoints[j], breakpoints[j + 1])`. The constructor
/// rejects profiles that are not antitone.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsDiamProfile<T = f64> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T> ObsDiamProfile<T>
where
    T: Num + Clone + PartialOrd + fmt::Debug,
{
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::invalid(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != T::zero() || breakpoints[breakpoints.len() - 1] != T::one() {
            return Err(Error::invalid("breakpoints must run from 0 to 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| *v < T::zero()) {
            return Err(Error::invalid("profile values must be nonnegative"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("profile is not antitone: {values:?}")));
        }
        Ok(Self { breakpoints, values })
    }

    /// The identically zero profile.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![T::zero(), T::one()],
            values: vec![T::zero()],
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Pairs `(left endpoint, value)` of the constant pieces.
    pub fn steps(&self) -> impl Iterator<Item = (&T, &T)> {
        self.breakpoints.iter().zip(&self.values)
    }

    /// Value at `alpha`; zero for `alpha >= 1`.
    pub fn value_at(&self, alpha: &T) -> T {
        if *alpha >= T::one() {
            return T::zero();
        }
        let idx = self
            .breakpoints
            .iter()
            .rposition(|b| b <= alpha)
            .unwrap_or(0);
        self.values[idx.min(self.values.len() - 1)].clone()
    }

    /// Collapses adjacent pieces carrying the same value.
    pub fn merged(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut values: Vec<T> = vec![self.values[0].clone()];
        for (b, v) in self.steps().skip(1) {
            if v != values.last().unwrap() {
                breakpoints.push(b.clone());
                values.push(v.clone());
            }
        }
        breakpoints.push(T::one());
        Self { breakpoints, values }
    }

    /// Multiplies every value by `tau`.
    pub fn scaled(&self, tau: T) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.clone() * tau.clone()).collect(),
        }
    }

}

impl ObsDiamProfile<f64> {
    /// Probe points for comparing two profiles: the midpoint of every gap
    /// between their joint breakpoints wider than `MASS_TOL`. Breakpoints that
    /// differ only by rounding in the masses do not open a gap of their own.
    fn probes(&self, other: &Self) -> Vec<f64> {
        let mut cuts: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .filter(|w| w[1] - w[0] > MASS_TOL)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// True when `self <= other + tol` away from rounding-level slivers near breakpoints.
    pub fn dominated_by(&self, other: &Self, tol: f64) -> bool {
        self.probes(other)
            .into_iter()
            .all(|a| self.value_at(&a) <= other.value_at(&a) + tol)
    }

    /// True if the two profiles agree within `tol`, in the same sense as [`Self::dominated_by`].
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.probes(other)
            .into_iter()
            .all(|a| (self.value_at(&a) - other.value_at(&a)).abs() <= tol)
    }
}

/// Exact profile of `ds`, computed from the full window sweep of every feature.
pub fn profile(ds: &GeometricDataSet) -> ObsDiamProfile {
    profile_with(ds, Exec::default())
}

pub fn profile_with(ds: &GeometricDataSet, exec: Exec) -> ObsDiamProfile {
    let steps: Vec<FeatureSteps> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            ds.features()
                .par_iter()
                .map(|col| FeatureSteps::new(col, ds))
                .collect()
        }
        _ => ds
            .features()
            .iter()
            .map(|col| FeatureSteps::new(col, ds))
            .collect(),
    };

    let mut thresholds: Vec<f64> = steps
        .iter()
        .flat_map(|s| s.thresholds.iter().copied())
        .filter(|&t| t > MASS_TOL && t < 1.0 - MASS_TOL)
        .collect();
    thresholds.push(0.0);
    thresholds.sort_by(f64::total_cmp);
    let mut breakpoints: Vec<f64> = Vec::with_capacity(thresholds.len() + 1);
    for t in thresholds {
        if breakpoints.last().is_none_or(|&last| t > last + MASS_TOL) {
            breakpoints.push(t);
        }
    }

    let values = exec.map_reduce(
        steps.len(),
        Vec::new,
        |f| steps[f].evaluate(&breakpoints),
        max_merge,
    );
    let values = if values.is_empty() {
        vec![0.0; breakpoints.len()]
    } else {
        values
    };
    breakpoints.push(1.0);
    ObsDiamProfile::new(breakpoints, values)
        .expect("window sweep yields an antitone profile")
        .merged()
}

/// Per-feature partial-diameter step function: for `alpha` at or above
/// `thresholds[i]` the partial diameter is at most `diameters[i]`.
struct FeatureSteps {
    thresholds: Vec<f64>,
    diameters: Vec<f64>,
}

impl FeatureSteps {
    fn new(column: &[f64], ds: &GeometricDataSet) -> Self {
        let dist = pushforward(column, ds.measure()).expect("validated data set");
        let values = dist.values();
        let prefix = dist.prefix_masses();
        let k = values.len();
        let mut windows: Vec<(f64, f64)> = Vec::with_capacity(k * (k + 1) / 2);
        for i in 0..k {
            for j in i..k {
                let threshold = (1.0 - (prefix[j + 1] - prefix[i])).max(0.0);
                windows.push((threshold, values[j] - values[i]));
            }
        }
        windows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut thresholds = Vec::new();
        let mut diameters: Vec<f64> = Vec::new();
        for (t, d) in windows {
            let best = diameters.last().map_or(f64::INFINITY, |&b| b);
            if d < best {
                thresholds.push(t);
                diameters.push(d);
            }
        }
        Self {
            thresholds,
            diameters,
        }
    }

    fn evaluate(&self, breakpoints: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(breakpoints.len());
        let mut idx = 0;
        let mut current = f64::INFINITY;
        for &b in breakpoints {
            while idx < self.thresholds.len() && self.thresholds[idx] <= b + MASS_TOL {
                current = self.diameters[idx];
                idx += 1;
            }
            out.push(current);
        }
        out
    }
}

/// `Δ = ∫_0^1 min(ObsDiam, 1) dα`, integrated exactly over the steps.
pub fn delta<T>(p: &ObsDiamProfile<T>) -> T
where
    T: Num + Clone + PartialOrd + fmt::Debug,
{
    let one = T::one();
    p.breakpoints
        .windows(2)
        .zip(&p.values)
        .fold(T::zero(), |acc, (w, v)| {
            let clipped = if *v > one { one.clone() } else { v.clone() };
            acc + (w[1].clone() - w[0].clone()) * clipped
        })
}

/// `∂ = 1/Δ²`, infinite exactly when `Δ = 0`.
pub fn intrinsic_dimension(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta {delta} outside [0, 1]")));
    }
    if delta == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / (delta * delta))
    }
}
