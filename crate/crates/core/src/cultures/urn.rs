//! Impartial culture and the Pólya-Eggenberger urn.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::election::{Election, Ranking};
use crate::error::{Error, Result};

/// Shape of the Gamma distribution urn parameters are drawn from.
pub const URN_GAMMA_SHAPE: f64 = 0.8;
pub const URN_GAMMA_SCALE: f64 = 1.0;

pub fn uniform_ranking<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Ranking {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    Ranking::from_vec_unchecked(order)
}

pub fn sample_ic<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<Election> {
    let votes = (0..n).map(|_| uniform_ranking(m, rng)).collect();
    Election::from_rankings(m, votes)
}

/// Urn with `alpha * m!` copies added per draw, simulated without the urn:
/// after `k` votes the next one is fresh with probability `1 / (1 + k alpha)`
/// and otherwise a copy of a uniformly chosen earlier vote.
pub fn sample_urn<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<Election> {
    if alpha.is_nan() || alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::param(format!(
            "urn alpha must be a nonnegative number, got {alpha}"
        )));
    }
    let mut votes: Vec<Ranking> = Vec::with_capacity(n);
    for k in 0..n {
        let fresh = k == 0 || rng.random::<f64>() * (1.0 + k as f64 * alpha) < 1.0;
        let vote = if fresh {
            uniform_ranking(m, rng)
        } else {
            votes[rng.random_range(0..k)].clone()
        };
        votes.push(vote);
    }
    Ok(Election::from_rankings(m, votes)?.with_metadata("alpha", alpha))
}

pub fn draw_urn_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Gamma::new(URN_GAMMA_SHAPE, URN_GAMMA_SCALE)
        .expect("valid gamma parameters")
        .sample(rng)
}

/// Urn election with `alpha ~ Gamma(0.8, 1)`; the drawn value is kept in
/// the metadata under `alpha`.
pub fn sample_urn_gamma<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<Election> {
    let alpha = draw_urn_alpha(rng);
    sample_urn(m, n, alpha, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_ic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = sample_ic(1, 1, &mut rng).unwrap();
        assert_eq!(e.ballots()[0].ranking.as_slice(), &[0]);
    }

    #[test]
    fn huge_alpha_copies_first_vote() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = sample_urn(6, 50, 1e9, &mut rng).unwrap();
        assert_eq!(e.distinct_votes(), 1);
    }

    #[test]
    fn negative_alpha_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_urn(3, 3, -0.5, &mut rng).is_err());
        assert!(sample_urn(3, 3, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn second_vote_copy_probability() {
        // P(second vote copies first) = alpha / (1 + alpha); a fresh draw
        // can also coincide with probability 1/m!, so use many candidates.
        let alpha = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 40_000;
        let mut same = 0;
        for _ in 0..trials {
            let e = sample_urn(8, 2, alpha, &mut rng).unwrap();
            if e.distinct_votes() == 1 {
                same += 1;
            }
        }
        let p = alpha / (1.0 + alpha) + (1.0 / (1.0 + alpha)) / 40320.0;
        let observed = same as f64 / trials as f64;
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((observed - p).abs() < 4.0 * sd, "{observed} vs {p}");
    }

    #[test]
    fn gamma_alpha_recorded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = sample_urn_gamma(5, 10, &mut rng).unwrap();
        let alpha: f64 = e.metadata["alpha"].parse().unwrap();
        assert!(alpha >= 0.0);
    }

    #[test]
    fn gamma_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let draws: Vec<f64> = (0..10_000).map(|_| draw_urn_alpha(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((mean - 0.8).abs() < 0.05, "mean {mean}");
        assert!((var - 0.8).abs() < 0.1, "variance {var}");
    }
}
