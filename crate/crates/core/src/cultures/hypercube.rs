//! Euclidean hypercube culture: voters and candidates are uniform points in
//! `[0,1]^t`, each voter ranks candidates by increasing distance.

use rand::Rng;

use crate::election::{Election, Ranking};
use crate::error::{Error, Result};

pub fn uniform_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Candidates ordered by distance from `voter`; equal distances go to the
/// lower candidate index.
pub fn rank_by_proximity(voter: &[f64], candidates: &[Vec<f64>]) -> Ranking {
    let dist: Vec<f64> = candidates
        .iter()
        .map(|c| squared_distance(voter, c))
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    Ranking::from_vec_unchecked(order)
}

pub fn sample_hypercube<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Election> {
    if dim == 0 {
        return Err(Error::param("hypercube dimension must be at least 1"));
    }
    let candidates: Vec<Vec<f64>> = (0..m).map(|_| uniform_point(dim, rng)).collect();
    let votes = (0..n)
        .map(|_| rank_by_proximity(&uniform_point(dim, rng), &candidates))
        .collect();
    let mut e = Election::from_rankings(m, votes)?.with_metadata("dim", dim);
    if dim == 1 {
        let mut axis: Vec<usize> = (0..m).collect();
        axis.sort_by(|&a, &b| {
            candidates[a][0]
                .total_cmp(&candidates[b][0])
                .then(a.cmp(&b))
        });
        let label = axis
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        e = e.with_metadata("axis", label);
    }
    Ok(e)
}
