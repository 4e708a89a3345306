//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use obsdim::fca::FormalContext;
use obsdim::{GeometricDataSet, PointCloud, PointMeasure, WeightedValueDistribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(|extent|, |intent|)` of every concept, found by closing all `2^|M|`
/// attribute sets with plain boolean loops.
pub fn powerset_concepts(incidence: &[Vec<bool>], n_attributes: usize) -> Vec<(usize, usize)> {
    assert!(n_attributes <= 20);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n_attributes) {
        let has = |m: usize| mask & (1 << m) != 0;
        let extent: Vec<usize> = (0..incidence.len())
            .filter(|&g| (0..n_attributes).all(|m| !has(m) || incidence[g][m]))
            .collect();
        let closed = (0..n_attributes).all(|m| has(m) == extent.iter().all(|&g| incidence[g][m]));
        if closed {
            out.push((extent.len(), mask.count_ones() as usize));
        }
    }
    out
}

/// Δ of the associated data set, evaluating `sup { |A|/|G| : alpha < |B|/|M| < 1 - alpha }`
/// at the midpoint of each cell `[j/|M|, (j+1)/|M|)`; all breakpoints are multiples of `1/|M|`.
pub fn brute_force_fca_delta(concepts: &[(usize, usize)], n_objects: usize, n_attributes: usize) -> BigRational {
    let m = n_attributes as i64;
    let mut total = BigRational::zero();
    for j in 0..m {
        let alpha = q(2 * j + 1, 2 * m);
        let one_minus = BigRational::one() - &alpha;
        let best = concepts
            .iter()
            .filter(|(_, b)| {
                let b = q(*b as i64, m);
                alpha < b && b < one_minus
            })
            .map(|(a, _)| q(*a as i64, n_objects as i64))
            .max()
            .unwrap_or_else(BigRational::zero);
        let clipped = if best > BigRational::one() { BigRational::one() } else { best };
        total += clipped * q(1, m);
    }
    total
}

pub fn random_context(rng: &mut ChaCha8Rng, max_g: usize, max_m: usize) -> FormalContext {
    let g = rng.random_range(1..=max_g);
    let m = rng.random_range(1..=max_m);
    let density: f64 = rng.random_range(0.1..0.9);
    let incidence: Vec<Vec<bool>> = (0..g)
        .map(|_| (0..m).map(|_| rng.random_bool(density)).collect())
        .collect();
    FormalContext::new(
        (0..g).map(|i| format!("g{i}")).collect(),
        (0..m).map(|i| format!("m{i}")).collect(),
        &incidence,
    )
    .unwrap()
}

/// Random distribution with up to `max_atoms` atoms; values on a coarse grid
/// so that ties between window diameters occur.
pub fn random_distribution(rng: &mut ChaCha8Rng, max_atoms: usize) -> WeightedValueDistribution {
    let k = rng.random_range(1..=max_atoms);
    let pairs: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let v = if rng.random_bool(0.5) {
                rng.random_range(-10..=10) as f64
            } else {
                rng.random_range(-10.0..10.0)
            };
            (v, rng.random_range(0.05..1.0))
        })
        .collect();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    WeightedValueDistribution::from_pairs(pairs.into_iter().map(|(v, w)| (v, w / total))).unwrap()
}

pub fn random_cloud(rng: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> PointCloud {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let coords = (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect();
    PointCloud::from_flat(n, d, coords).unwrap()
}

/// Random data set with weighted points and up to `max_features` features.
pub fn random_data_set(rng: &mut ChaCha8Rng, max_points: usize, max_features: usize) -> GeometricDataSet {
    let n = rng.random_range(1..=max_points);
    let f = rng.random_range(0..=max_features);
    let measure = if rng.random_bool(0.5) {
        PointMeasure::uniform(n).unwrap()
    } else {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut w: Vec<f64> = w.iter().map(|x| x / total).collect();
        // Absorb rounding so the weights sum to one within tolerance.
        let drift: f64 = 1.0 - w.iter().sum::<f64>();
        w[0] += drift;
        PointMeasure::new(w).unwrap()
    };
    let features = (0..f)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.3) {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(-3.0..3.0)
                    }
                })
                .collect()
        })
        .collect();
    GeometricDataSet::new(features, measure).unwrap()
}

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("obsdim").chain(args.iter().copied());
    let code = obsdim::cli::cli_main(argv, &mut out, &mut err);
    (code, out, err)
}
