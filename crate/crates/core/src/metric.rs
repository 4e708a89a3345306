//! Point clouds, distance features and the uniform-measure sweep.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::{max_merge, Exec};
use crate::measure::{feature_levy_level, scale, GeometricDataSet, WeightedValueDistribution};
use crate::profile::{delta, intrinsic_dimension, ObsDiamProfile};
use crate::report::ChavezId;

/// Points beyond which distance columns are recomputed per feature instead of
/// being held as a full matrix.
pub const DEFAULT_MATERIALIZE_CAP: usize = 20_000;

const UNIT_NORM_TOL: f64 = 1e-9;

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::invalid(format!(
                "row {i} has {} coordinates, expected {d}",
                rows[i].len()
            )));
        }
        Self::from_flat(n, d, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid("point cloud needs at least one point and one coordinate"));
        }
        if coords.len() != n * d {
            return Err(Error::invalid(format!("{} coordinates for {n}x{d} cloud", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coordinates must be finite"));
        }
        Ok(Self { n, d, coords })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::new(self.points().map(&mut f).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricKind {
    #[default]
    Euclidean,
    /// Great-circle distance on the unit sphere.
    GeodesicSphere,
    /// Fraction of differing coordinates between binary vectors.
    NormalizedHamming,
}

impl MetricKind {
    pub fn validate(self, cloud: &PointCloud) -> Result<()> {
        match self {
            MetricKind::Euclidean => Ok(()),
            MetricKind::GeodesicSphere => {
                for (i, p) in cloud.points().enumerate() {
                    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > UNIT_NORM_TOL {
                        return Err(Error::invalid(format!(
                            "point {i} has norm {norm}; geodesic distance needs unit vectors"
                        )));
                    }
                }
                Ok(())
            }
            MetricKind::NormalizedHamming => {
                if cloud.coords.iter().any(|&c| c != 0.0 && c != 1.0) {
                    return Err(Error::invalid("normalized Hamming distance needs 0/1 coordinates"));
                }
                Ok(())
            }
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            MetricKind::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            MetricKind::GeodesicSphere => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                dot.clamp(-1.0, 1.0).acos()
            }
            MetricKind::NormalizedHamming => {
                let differing = a.iter().zip(b).filter(|(x, y)| x != y).count();
                differing as f64 / a.len() as f64
            }
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(MetricKind::Euclidean),
            "geodesic" | "geodesic_sphere" | "geodesic-sphere" => Ok(MetricKind::GeodesicSphere),
            "hamming" | "normalized_hamming" | "normalized-hamming" => Ok(MetricKind::NormalizedHamming),
            other => Err(Error::invalid(format!("unknown metric '{other}'"))),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::GeodesicSphere => "geodesic_sphere",
            MetricKind::NormalizedHamming => "normalized_hamming",
        })
    }
}

/// Knobs for the distance-feature sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub exec: Exec,
    pub materialize_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            exec: Exec::default(),
            materialize_cap: DEFAULT_MATERIALIZE_CAP,
        }
    }
}

/// Source of distance columns `x -> d(x, y)`, either from a cached matrix or
/// computed on demand.
struct DistanceColumns<'a> {
    cloud: &'a PointCloud,
    metric: MetricKind,
    matrix: Option<Vec<f64>>,
}

impl<'a> DistanceColumns<'a> {
    fn new(cloud: &'a PointCloud, metric: MetricKind, opts: &SweepOptions) -> Result<Self> {
        metric.validate(cloud)?;
        let matrix = (cloud.len() <= opts.materialize_cap).then(|| distance_matrix(cloud, metric, opts.exec));
        Ok(Self { cloud, metric, matrix })
    }

    fn column(&self, y: usize) -> Vec<f64> {
        let n = self.cloud.len();
        match &self.matrix {
            Some(m) => m[y * n..(y + 1) * n].to_vec(),
            None => {
                let py = self.cloud.point(y);
                self.cloud
                    .points()
                    .enumerate()
                    .map(|(x, px)| if x == y { 0.0 } else { self.metric.distance(px, py) })
                    .collect()
            }
        }
    }
}

/// Full symmetric `n x n` distance matrix, row-major.
fn distance_matrix(cloud: &PointCloud, metric: MetricKind, exec: Exec) -> Vec<f64> {
    let n = cloud.len();
    let row = |i: usize| -> Vec<f64> {
        let pi = cloud.point(i);
        (0..n)
            .map(|j| if i == j { 0.0 } else { metric.distance(pi, cloud.point(j)) })
            .collect()
    };
    let rows: Vec<Vec<f64>> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(row).collect()
        }
        _ => (0..n).map(row).collect(),
    };
    let mut m = rows.concat();
    // Enforce exact symmetry; the metric formulas are not bitwise symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            m[j * n + i] = m[i * n + j];
        }
    }
    m
}

/// The induced data set: one feature `x -> d(x, y)` per point `y`, under the
/// normalized counting measure.
pub fn distance_features(cloud: &PointCloud, metric: MetricKind) -> Result<GeometricDataSet> {
    metric.validate(cloud)?;
    let n = cloud.len();
    let m = distance_matrix(cloud, metric, Exec::default());
    let features = m.chunks_exact(n).map(<[f64]>::to_vec).collect();
    GeometricDataSet::uniform(n, features)
}

/// Result of rescaling a data set to unit feature diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub data: GeometricDataSet,
    pub factor: f64,
    /// The diameter was zero, so nothing was rescaled.
    pub degenerate: bool,
}

pub fn normalize_by_diameter(ds: &GeometricDataSet) -> Result<Normalized> {
    let diameter = ds.feature_diameter();
    if diameter > 0.0 {
        let factor = 1.0 / diameter;
        Ok(Normalized {
            data: scale(ds, factor)?,
            factor,
            degenerate: false,
        })
    } else {
        Ok(Normalized {
            data: ds.clone(),
            factor: 1.0,
            degenerate: true,
        })
    }
}

/// Minimal window diameter reaching each mass level `m/n`, `m = 0..=n`, for
/// a distribution whose masses are multiples of `1/n`.
pub fn min_diam_matrix(dist: &WeightedValueDistribution, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("mass denominator must be positive"));
    }
    let counts = dist
        .masses()
        .iter()
        .map(|&m| {
            let scaled = m * n as f64;
            let count = scaled.round();
            if count < 1.0 || (scaled - count).abs() > 1e-9 {
                Err(Error::invalid(format!("mass {m} is not a multiple of 1/{n}")))
            } else {
                Ok(count as usize)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(min_diam_counts(dist.values(), &counts, n))
}

/// Counting-measure core of [`min_diam_matrix`]; `counts` must sum to `n`.
fn min_diam_counts(values: &[f64], counts: &[usize], n: usize) -> Vec<f64> {
    let k = values.len();
    let diam = values[k - 1] - values[0];
    let mut result = vec![diam; n + 1];
    result[0] = 0.0;
    for s in 0..k {
        let mut level = 0;
        for e in s..k {
            level += counts[e];
            let d = values[e] - values[s];
            if result[level] > d {
                result[level] = d;
            }
        }
    }
    // Levels no window hits exactly inherit from the next larger level.
    for i in (1..=n).rev() {
        if result[i] < result[i - 1] {
            result[i - 1] = result[i];
        }
    }
    result
}

/// Sorted distinct values with their multiplicities.
fn value_counts(mut column: Vec<f64>) -> (Vec<f64>, Vec<usize>) {
    column.sort_by(f64::total_cmp);
    let mut values: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for v in column {
        if values.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(v);
            counts.push(1);
        }
    }
    (values, counts)
}

/// Observable-diameter profile of the distance features of `cloud`, via the
/// per-feature minimal-diameter tables.
pub fn obs_diam_distance(cloud: &PointCloud, metric: MetricKind) -> Result<ObsDiamProfile> {
    obs_diam_distance_with(cloud, metric, &SweepOptions::default())
}

pub fn obs_diam_distance_with(
    cloud: &PointCloud,
    metric: MetricKind,
    opts: &SweepOptions,
) -> Result<ObsDiamProfile> {
    let columns = DistanceColumns::new(cloud, metric, opts)?;
    let n = cloud.len();
    let table = opts.exec.map_reduce(
        n,
        Vec::new,
        |y| {
            let (values, counts) = value_counts(columns.column(y));
            min_diam_counts(&values, &counts, n)
        },
        max_merge,
    );
    Ok(profile_from_level_table(&table, n))
}

/// Obs-diam profile from the feature-wise maximum of the minimal-diameter tables
/// of a uniform data set with `n` points.
pub fn obs_diam_uniform(ds: &GeometricDataSet, exec: Exec) -> Result<ObsDiamProfile> {
    if !ds.measure().is_uniform() {
        return Err(Error::invalid("the level sweep needs the uniform measure"));
    }
    let n = ds.n_points();
    let table = exec.map_reduce(
        ds.n_features(),
        Vec::new,
        |f| {
            let (values, counts) = value_counts(ds.features()[f].clone());
            min_diam_counts(&values, &counts, n)
        },
        max_merge,
    );
    Ok(profile_from_level_table(&table, n))
}

fn profile_from_level_table(table: &[f64], n: usize) -> ObsDiamProfile {
    if table.is_empty() {
        return ObsDiamProfile::zero();
    }
    // On [j/n, (j+1)/n) at least n - j of the n points must be kept.
    let breakpoints: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let values: Vec<f64> = (0..n).map(|j| table[n - j]).collect();
    ObsDiamProfile::new(breakpoints, values)
        .expect("level tables are monotone")
        .merged()
}

/// Lévy defect of the distance features of `cloud`, each multiplied by `tau`.
pub fn levy_defect_distance(
    cloud: &PointCloud,
    metric: MetricKind,
    tau: f64,
    opts: &SweepOptions,
) -> Result<f64> {
    let columns = DistanceColumns::new(cloud, metric, opts)?;
    let n = cloud.len();
    Ok(opts.exec.map_reduce(
        n,
        || 0.0,
        |y| {
            let (values, counts) = value_counts(columns.column(y));
            let dist = WeightedValueDistribution::new(
                values.iter().map(|v| v * tau).collect(),
                counts.iter().map(|&c| c as f64 / n as f64).collect(),
            );
            // Scaling can merge neighbouring atoms (tau = 0); fall back to regrouping.
            let dist = dist.or_else(|_| {
                WeightedValueDistribution::from_pairs(
                    values.iter().zip(&counts).map(|(v, &c)| (v * tau, c as f64 / n as f64)),
                )
            });
            feature_levy_level(&dist.expect("finite distances"))
        },
        f64::max,
    ))
}

/// Chavez intrinsic dimension `mu^2 / (2 sigma^2)` of the pairwise distances.
///
/// With `include_diagonal` the expectation runs over all `n^2` ordered pairs,
/// zero self-distances included; otherwise over the `n (n - 1)` distinct pairs.
pub fn chavez_id(cloud: &PointCloud, metric: MetricKind, include_diagonal: bool) -> Result<ChavezId> {
    metric.validate(cloud)?;
    let n = cloud.len();
    if n < 2 {
        return Err(Error::invalid("Chavez ID needs at least two points"));
    }
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            upper.push(metric.distance(cloud.point(i), cloud.point(j)));
        }
    }
    let pairs = if include_diagonal { n * n } else { n * (n - 1) } as f64;
    let mean = 2.0 * upper.iter().sum::<f64>() / pairs;
    let mut sq = 2.0 * upper.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>();
    if include_diagonal {
        sq += n as f64 * mean * mean;
    }
    let variance = sq / pairs;
    if mean == 0.0 || variance <= (1e-12 * mean) * (1e-12 * mean) {
        return Ok(ChavezId::Undefined);
    }
    Ok(ChavezId::Finite(mean * mean / (2.0 * variance)))
}

/// `count` points drawn uniformly from the unit sphere in `R^(dim + 1)`.
pub fn sample_sphere(dim: usize, count: usize, seed: u64) -> Result<PointCloud> {
    if dim == 0 || count == 0 {
        return Err(Error::invalid("sphere sampling needs dim >= 1 and count >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ambient = dim + 1;
    let mut coords = Vec::with_capacity(count * ambient);
    let mut p = vec![0.0; ambient];
    for _ in 0..count {
        loop {
            for x in p.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                coords.extend(p.iter().map(|x| x / norm));
                break;
            }
        }
    }
    PointCloud::from_flat(count, ambient, coords)
}

/// `count` fair-coin points of `{0, 1}^dim`.
pub fn sample_hypercube(dim: usize, count: usize, seed: u64) -> Result<PointCloud> {
    if dim == 0 || count == 0 {
        return Err(Error::invalid("hypercube sampling needs dim >= 1 and count >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..count * dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
        .collect();
    PointCloud::from_flat(count, dim, coords)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Sphere,
    Hypercube,
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(StudyKind::Sphere),
            "hypercube" => Ok(StudyKind::Hypercube),
            other => Err(Error::invalid(format!("unknown study '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub dim: usize,
    pub delta: f64,
    pub sqrt_n_delta: f64,
    pub dimension: f64,
}

/// Δ of diameter-normalized distance features of sampled clouds, per dimension.
pub fn scaling_study(
    kind: StudyKind,
    dims: &[usize],
    count: usize,
    seed: u64,
    opts: &SweepOptions,
) -> Result<Vec<StudyRow>> {
    dims.iter()
        .map(|&dim| {
            let (cloud, metric) = match kind {
                StudyKind::Sphere => (sample_sphere(dim, count, seed)?, MetricKind::GeodesicSphere),
                StudyKind::Hypercube => (sample_hypercube(dim, count, seed)?, MetricKind::NormalizedHamming),
            };
            let raw = obs_diam_distance_with(&cloud, metric, opts)?;
            // For distance features ObsDiam at alpha = 0 is the diameter.
            let diameter = raw.values()[0];
            let profile = if diameter > 0.0 { raw.scaled(1.0 / diameter) } else { raw };
            let d = delta(&profile);
            Ok(StudyRow {
                dim,
                delta: d,
                sqrt_n_delta: (dim as f64).sqrt() * d,
                dimension: intrinsic_dimension(d)?,
            })
        })
        .collect()
}
