//! Fitting the normalized Mallows parameter to a dataset of elections.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cultures::mallows::{sample_mallows_norm_with, MallowsNormalizer};
use crate::election::Election;
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::metric::{normalized, positionwise};

pub const DEFAULT_SAMPLES_PER_VALUE: usize = 100;
pub const COARSE_SAMPLES_PER_VALUE: usize = 20;
pub const SAMPLE_VOTERS: usize = 100;

/// `0, 0.001, ..., 0.5`.
pub fn default_grid() -> Vec<f64> {
    (0..=500).map(|k| k as f64 / 1000.0).collect()
}

/// `0, 0.01, ..., 0.5`.
pub fn coarse_grid() -> Vec<f64> {
    (0..=50).map(|k| k as f64 / 100.0).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub relphi: f64,
    /// Mean normalized distance between the sampled and the dataset elections.
    pub mean: f64,
    /// Standard deviation over dataset elections of their mean normalized
    /// distance to the sampled elections.
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub best: GridPoint,
    /// One entry per grid value, in grid order.
    pub objective: Vec<GridPoint>,
}

/// Evaluates every grid value on `samples_per_value` normalized-Mallows
/// elections with 100 voters. Grid value `k` draws from stream `k` of the
/// seeded generator, so the outcome does not depend on thread scheduling.
/// Ties go to the smaller grid value.
pub fn fit_mallows(
    dataset: &[Election],
    grid: &[f64],
    samples_per_value: usize,
    seed: u64,
) -> Result<FitResult> {
    if grid.is_empty() {
        return Err(Error::param("empty relphi grid"));
    }
    if let Some(bad) = grid.iter().find(|r| !(0.0..=0.5).contains(*r)) {
        return Err(Error::param(format!("grid value {bad} outside [0, 0.5]")));
    }
    let Some(first) = dataset.first() else {
        return Err(Error::param("empty dataset"));
    };
    let m = first.m();
    if let Some(e) = dataset.iter().find(|e| e.m() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: e.m(),
        });
    }
    if m < 2 {
        return Err(Error::param("fitting needs at least two candidates"));
    }
    if samples_per_value == 0 {
        return Err(Error::param("samples per value must be positive"));
    }
    let targets: Vec<FrequencyMatrix> = dataset.iter().map(Election::frequency_matrix).collect();
    let normalizer = MallowsNormalizer::new(m);

    let objective = grid
        .par_iter()
        .enumerate()
        .map(|(k, &relphi)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut per_target = vec![0.0f64; targets.len()];
            for _ in 0..samples_per_value {
                let sample =
                    sample_mallows_norm_with(&normalizer, SAMPLE_VOTERS, relphi, &mut rng)?;
                let x = sample.frequency_matrix();
                for (acc, t) in per_target.iter_mut().zip(&targets) {
                    let d = normalized(positionwise(&x, t)?.value, m);
                    *acc += *d.numer() as f64 / *d.denom() as f64;
                }
            }
            per_target
                .iter_mut()
                .for_each(|a| *a /= samples_per_value as f64);
            let mean = per_target.iter().sum::<f64>() / per_target.len() as f64;
            let var = per_target
                .iter()
                .map(|a| (a - mean) * (a - mean))
                .sum::<f64>()
                / per_target.len() as f64;
            Ok(GridPoint {
                relphi,
                mean,
                std: var.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = objective
        .iter()
        .fold(None::<&GridPoint>, |best, p| match best {
            Some(b) if b.mean <= p.mean => Some(b),
            _ => Some(p),
        })
        .expect("grid is nonempty")
        .clone();
    Ok(FitResult { best, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::Ranking;

    fn unanimous(m: usize) -> Election {
        Election::from_rankings(m, vec![Ranking::identity(m); 20]).unwrap()
    }

    #[test]
    fn unanimous_data_fits_zero() {
        let data = vec![unanimous(5); 3];
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 20.0).collect();
        let fit = fit_mallows(&data, &grid, 3, 4).unwrap();
        assert_eq!(fit.best.relphi, 0.0);
        assert_eq!(fit.best.mean, 0.0);
        assert!(fit.objective.windows(2).all(|w| w[0].mean <= w[1].mean));
    }

    #[test]
    fn deterministic() {
        let data = vec![unanimous(4)];
        let a = fit_mallows(&data, &coarse_grid()[..6], 2, 9).unwrap();
        let b = fit_mallows(&data, &coarse_grid()[..6], 2, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let data = vec![unanimous(4), unanimous(5)];
        assert!(fit_mallows(&data, &[0.1], 1, 0).is_err());
        assert!(fit_mallows(&data[..1], &[], 1, 0).is_err());
        assert!(fit_mallows(&data[..1], &[0.7], 1, 0).is_err());
        assert!(fit_mallows(&[], &[0.1], 1, 0).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(default_grid().len(), 501);
        assert_eq!(coarse_grid().len(), 51);
        assert_eq!(coarse_grid()[37], 0.37);
    }
}
