//! Brute-force reference implementations, independent of the window sweeps.

use crate::error::{Error, Result};
use crate::measure::{concentration_level, WeightedValueDistribution, MASS_TOL};

/// Largest support the subset oracle accepts.
pub const ORACLE_MAX_ATOMS: usize = 18;

/// Partial diameter by exhaustive search over all `2^k` sets of atoms.
pub fn oracle_partial_diameter(dist: &WeightedValueDistribution, alpha: f64) -> Result<f64> {
    let k = dist.len();
    if k > ORACLE_MAX_ATOMS {
        return Err(Error::SupportTooLarge {
            size: k,
            limit: ORACLE_MAX_ATOMS,
        });
    }
    let need = 1.0 - alpha;
    let values = dist.values();
    let masses = dist.masses();
    let mut best = f64::INFINITY;
    for subset in 0u32..(1u32 << k) {
        let mut mass = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, (&v, &m)) in values.iter().zip(masses).enumerate() {
            if subset & (1 << i) != 0 {
                mass += m;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if mass >= need - MASS_TOL {
            let diam = if subset == 0 { 0.0 } else { hi - lo };
            best = best.min(diam);
        }
    }
    Ok(best)
}

/// `inf_c me(f, c)` approximated by scanning `c` on a uniform grid of
/// `steps + 1` points spanning the support, plus every atom.
pub fn oracle_levy_level_grid(dist: &WeightedValueDistribution, steps: usize) -> f64 {
    let values = dist.values();
    let lo = values[0];
    let hi = values[values.len() - 1];
    let grid = (0..=steps).map(|s| lo + (hi - lo) * s as f64 / steps.max(1) as f64);
    grid.chain(values.iter().copied())
        .map(|c| concentration_level(dist, c))
        .fold(f64::INFINITY, f64::min)
}

/// `inf_c me(f, c)` with `c` restricted to centres of atom windows, each
/// evaluated through the definition of `me`.
pub fn oracle_levy_level_midpoints(dist: &WeightedValueDistribution) -> f64 {
    let values = dist.values();
    let mut best = f64::INFINITY;
    for i in 0..values.len() {
        for j in i..values.len() {
            best = best.min(concentration_level(dist, 0.5 * (values[i] + values[j])));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let d = WeightedValueDistribution::uniform(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(oracle_partial_diameter(&d, 1.0 / 3.0).unwrap(), 1.0);
        let dirac = WeightedValueDistribution::dirac(2.5).unwrap();
        for alpha in [0.0, 0.3, 1.0] {
            assert_eq!(oracle_partial_diameter(&dirac, alpha).unwrap(), 0.0);
        }
        let far = WeightedValueDistribution::uniform(&[0.0, 10.0]).unwrap();
        assert_eq!(oracle_partial_diameter(&far, 0.4).unwrap(), 10.0);
    }

    #[test]
    fn oracle_rejects_large_support() {
        let values: Vec<f64> = (0..19).map(f64::from).collect();
        let d = WeightedValueDistribution::uniform(&values).unwrap();
        assert!(matches!(
            oracle_partial_diameter(&d, 0.0),
            Err(Error::SupportTooLarge { size: 19, .. })
        ));
    }

    #[test]
    fn levy_oracles_on_coin() {
        let d = WeightedValueDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(oracle_levy_level_midpoints(&d), 0.5);
        assert_eq!(oracle_levy_level_grid(&d, 100), 0.5);
    }
}
