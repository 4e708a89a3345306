//! Finite measures, geometric data sets and the diameter functionals on them.

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Absolute tolerance used for every comparison between floating-point masses.
pub const MASS_TOL: f64 = 1e-12;

/// A pushforward measure: finitely many distinct real values carrying
/// positive masses that sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedValueDistribution {
    values: Vec<f64>,
    masses: Vec<f64>,
}

impl WeightedValueDistribution {
    /// Builds a distribution from already-sorted distinct values.
    pub fn new(values: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("distribution needs at least one atom"));
        }
        if values.len() != masses.len() {
            return Err(Error::invalid(format!(
                "{} values but {} masses",
                values.len(),
                masses.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("atom values must be finite"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("atom values must be strictly increasing"));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::invalid("atom masses must be positive"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { values, masses })
    }

    /// Groups arbitrary `(value, mass)` pairs, merging equal values.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        if pairs.iter().any(|(v, _)| !v.is_finite()) {
            return Err(Error::invalid("atom values must be finite"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut masses: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, m) in pairs {
            match values.last() {
                Some(&last) if last == v => *masses.last_mut().unwrap() += m,
                _ => {
                    values.push(v);
                    masses.push(m);
                }
            }
        }
        Self::new(values, masses)
    }

    /// Uniform distribution over the given values (duplicates merge).
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let w = 1.0 / values.len() as f64;
        Self::from_pairs(values.iter().map(|&v| (v, w)))
    }

    /// Point mass at `value`.
    pub fn dirac(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `prefix[i]` is the total mass of atoms `0..i`.
    pub(crate) fn prefix_masses(&self) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for m in &self.masses {
            acc += m;
            prefix.push(acc);
        }
        prefix
    }
}

/// Fully supported probability measure on the points of a data set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    weights: Vec<f64>,
}

impl PointMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("measure needs at least one point"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("point weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Normalized counting measure on `n` points.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("measure needs at least one point"));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// True when every point carries the same weight.
    pub fn is_uniform(&self) -> bool {
        let w0 = self.weights[0];
        self.weights.iter().all(|&w| w == w0)
    }
}

/// A finite point set with real-valued features and a point measure.
///
/// Features are stored column-wise: `features()[f][x]` is the value of
/// feature `f` at point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricDataSet {
    n_points: usize,
    features: Vec<Vec<f64>>,
    measure: PointMeasure,
}

impl GeometricDataSet {
    pub fn new(features: Vec<Vec<f64>>, measure: PointMeasure) -> Result<Self> {
        let n_points = measure.len();
        for (f, col) in features.iter().enumerate() {
            if col.len() != n_points {
                return Err(Error::invalid(format!(
                    "feature {f} has {} rows, measure has {n_points} points",
                    col.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("feature {f} has a non-finite value")));
            }
        }
        Ok(Self {
            n_points,
            features,
            measure,
        })
    }

    /// Data set under the normalized counting measure.
    pub fn uniform(n_points: usize, features: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(features, PointMeasure::uniform(n_points)?)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn measure(&self) -> &PointMeasure {
        &self.measure
    }

    /// Same points and measure, keeping only the listed feature columns.
    pub fn select_features(&self, keep: &[usize]) -> Result<Self> {
        let features = keep
            .iter()
            .map(|&f| {
                self.features
                    .get(f)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("no feature {f}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(features, self.measure.clone())
    }

    /// Largest feature-induced distance `sup_f |f(x) - f(y)|` over point pairs.
    pub fn feature_diameter(&self) -> f64 {
        self.features
            .iter()
            .map(|col| {
                let (lo, hi) = col
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    });
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

/// Image measure of `measure` under the feature `column`.
pub fn pushforward(column: &[f64], measure: &PointMeasure) -> Result<WeightedValueDistribution> {
    if column.len() != measure.len() {
        return Err(Error::invalid(format!(
            "column has {} entries, measure has {} points",
            column.len(),
            measure.len()
        )));
    }
    WeightedValueDistribution::from_pairs(column.iter().copied().zip(measure.weights().iter().copied()))
}

/// Smallest diameter of a set of atoms carrying mass at least `1 - alpha`.
///
/// Only contiguous windows of atoms need to be inspected: a set's diameter is
/// fixed by its extreme atoms, and filling in the atoms between them only adds
/// mass. Returns infinity when no set qualifies (`alpha < 0`).
pub fn partial_diameter(dist: &WeightedValueDistribution, alpha: f64) -> f64 {
    let need = 1.0 - alpha;
    if need <= MASS_TOL {
        return 0.0;
    }
    let values = dist.values();
    let prefix = dist.prefix_masses();
    let k = values.len();
    let mut best = f64::INFINITY;
    for i in 0..k {
        for j in i..k {
            if prefix[j + 1] - prefix[i] >= need - MASS_TOL {
                best = best.min(values[j] - values[i]);
                break;
            }
        }
    }
    best
}

/// `ObsDiam(ds; -alpha)`: the largest partial diameter over all features.
pub fn observable_diameter(ds: &GeometricDataSet, alpha: f64) -> f64 {
    observable_diameter_with(ds, alpha, Exec::default())
}

pub fn observable_diameter_with(ds: &GeometricDataSet, alpha: f64, exec: Exec) -> f64 {
    exec.map_reduce(
        ds.n_features(),
        || 0.0,
        |f| {
            let dist = pushforward(&ds.features[f], &ds.measure).expect("validated data set");
            partial_diameter(&dist, alpha)
        },
        f64::max,
    )
}

/// Multiplies every feature by `tau`; the measure is untouched.
pub fn scale(ds: &GeometricDataSet, tau: f64) -> Result<GeometricDataSet> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("scale factor {tau} must be finite and >= 0")));
    }
    let features = ds
        .features
        .iter()
        .map(|col| col.iter().map(|v| v * tau).collect())
        .collect();
    GeometricDataSet::new(features, ds.measure.clone())
}

/// `me(f, c) = inf { eps >= 0 : mu(|f - c| > eps) <= eps }`, evaluated on the
/// pushforward of `f`.
pub fn concentration_level(dist: &WeightedValueDistribution, c: f64) -> f64 {
    let mut atoms: Vec<(f64, f64)> = dist
        .values()
        .iter()
        .zip(dist.masses())
        .map(|(&v, &m)| ((v - c).abs(), m))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail_above = |eps: f64| -> f64 {
        atoms
            .iter()
            .filter(|(r, _)| *r > eps)
            .map(|(_, m)| m)
            .sum()
    };
    // The feasible set is an up-ray closed on the left; its start is either a
    // jump of the tail function or one of its plateau levels.
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(atoms.iter().map(|(r, _)| *r));
    let mut tail = 0.0;
    for (_, m) in atoms.iter().rev() {
        tail += m;
        candidates.push(tail);
    }
    candidates.sort_by(f64::total_cmp);
    candidates
        .into_iter()
        .find(|&eps| tail_above(eps) <= eps + MASS_TOL)
        .unwrap_or(1.0)
}

/// `inf_c me(f, c)` for a single feature distribution.
///
/// For a fixed `eps`, the atoms within `eps` of `c` always form a window, so
/// the optimum is the best window trade-off between half-width and the mass
/// left outside, with `c` at the window centre.
pub fn feature_levy_level(dist: &WeightedValueDistribution) -> f64 {
    let values = dist.values();
    let prefix = dist.prefix_masses();
    let k = values.len();
    let mut best: f64 = 1.0;
    for i in 0..k {
        for j in i..k {
            let half_width = 0.5 * (values[j] - values[i]);
            if half_width >= best {
                break;
            }
            let outside = (1.0 - (prefix[j + 1] - prefix[i])).max(0.0);
            best = best.min(half_width.max(outside));
        }
    }
    best
}

/// Lévy concentration defect: `sup_f inf_c me(f, c)`; zero without features.
pub fn levy_defect(ds: &GeometricDataSet) -> f64 {
    levy_defect_with(ds, Exec::default())
}

pub fn levy_defect_with(ds: &GeometricDataSet, exec: Exec) -> f64 {
    exec.map_reduce(
        ds.n_features(),
        || 0.0,
        |f| {
            let dist = pushforward(&ds.features[f], &ds.measure).expect("validated data set");
            feature_levy_level(&dist)
        },
        f64::max,
    )
}
