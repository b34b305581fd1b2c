//! Single-peaked cultures (Conitzer and Walsh) and a recognizer.

use rand::Rng;

use super::urn::uniform_ranking;
use crate::election::{Election, Ranking};

/// Whether every top-`t` prefix of `vote` is an interval of `axis`, where
/// `axis[k]` is the candidate at axis position `k`.
pub fn is_single_peaked(vote: &Ranking, axis: &Ranking) -> bool {
    if vote.len() != axis.len() {
        return false;
    }
    let place = axis.positions();
    let mut lo = usize::MAX;
    let mut hi = 0usize;
    for (t, &c) in vote.as_slice().iter().enumerate() {
        lo = lo.min(place[c]);
        hi = hi.max(place[c]);
        if hi - lo != t {
            return false;
        }
    }
    true
}

pub fn election_is_single_peaked_on(e: &Election, axis: &Ranking) -> bool {
    e.ballots()
        .iter()
        .all(|b| is_single_peaked(&b.ranking, axis))
}

fn axis_label(axis: &Ranking) -> String {
    axis.as_slice()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses the `axis` metadata entry written by the single-peaked samplers.
pub fn axis_from_metadata(e: &Election) -> Option<Ranking> {
    let order = e
        .metadata
        .get("axis")?
        .split_whitespace()
        .map(|s| s.parse().ok())
        .collect::<Option<Vec<usize>>>()?;
    Ranking::new(order).ok()
}

/// Conitzer vote: uniform peak, then grow the interval left or right by a
/// fair coin, forced once one side of the axis is exhausted.
pub fn conitzer_vote<R: Rng + ?Sized>(axis: &Ranking, rng: &mut R) -> Ranking {
    let m = axis.len();
    let axis = axis.as_slice();
    let peak = rng.random_range(0..m);
    let (mut lo, mut hi) = (peak, peak);
    let mut vote = Vec::with_capacity(m);
    vote.push(axis[peak]);
    while vote.len() < m {
        let go_left = if lo == 0 {
            false
        } else if hi == m - 1 {
            true
        } else {
            rng.random_bool(0.5)
        };
        if go_left {
            lo -= 1;
            vote.push(axis[lo]);
        } else {
            hi += 1;
            vote.push(axis[hi]);
        }
    }
    Ranking::from_vec_unchecked(vote)
}

/// Walsh vote: uniform over the `2^(m-1)` single-peaked orders, built from
/// the bottom by peeling the left or right end of the axis.
pub fn walsh_vote<R: Rng + ?Sized>(axis: &Ranking, rng: &mut R) -> Ranking {
    let m = axis.len();
    let axis = axis.as_slice();
    let (mut lo, mut hi) = (0usize, m - 1);
    let mut bottom_up = Vec::with_capacity(m);
    while lo < hi {
        if rng.random_bool(0.5) {
            bottom_up.push(axis[lo]);
            lo += 1;
        } else {
            bottom_up.push(axis[hi]);
            hi -= 1;
        }
    }
    bottom_up.push(axis[lo]);
    bottom_up.reverse();
    Ranking::from_vec_unchecked(bottom_up)
}

fn sample_with_axis<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    rng: &mut R,
    vote: fn(&Ranking, &mut R) -> Ranking,
) -> crate::Result<Election> {
    let axis = uniform_ranking(m, rng);
    let votes = (0..n).map(|_| vote(&axis, rng)).collect();
    Ok(Election::from_rankings(m, votes)?.with_metadata("axis", axis_label(&axis)))
}

/// One uniformly drawn axis per election; recorded as metadata `axis`.
pub fn sample_conitzer<R: Rng>(m: usize, n: usize, rng: &mut R) -> crate::Result<Election> {
    sample_with_axis(m, n, rng, conitzer_vote::<R>)
}

pub fn sample_walsh<R: Rng>(m: usize, n: usize, rng: &mut R) -> crate::Result<Election> {
    sample_with_axis(m, n, rng, walsh_vote::<R>)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(v: &[usize]) -> Ranking {
        Ranking::new(v.to_vec()).unwrap()
    }

    #[test]
    fn recognizer() {
        let axis = r(&[0, 1, 2, 3]);
        assert!(is_single_peaked(&r(&[1, 2, 0, 3]), &axis));
        assert!(is_single_peaked(&r(&[3, 2, 1, 0]), &axis));
        assert!(!is_single_peaked(&r(&[0, 3, 1, 2]), &axis));
        assert!(!is_single_peaked(&r(&[1, 3, 2, 0]), &axis));
    }

    #[test]
    fn conitzer_top_b_then_a() {
        // axis a < b < c: P(top = b, second = a) = 1/3 * 1/2
        let axis = r(&[0, 1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 60_000;
        let hits = (0..trials)
            .filter(|_| conitzer_vote(&axis, &mut rng).as_slice()[..2] == [1, 0])
            .count();
        let p = 1.0 / 6.0;
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 4.0 * sd);
    }

    #[test]
    fn trivial_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = sample_conitzer(1, 3, &mut rng).unwrap();
        assert!(e.votes().all(|v| v.as_slice() == [0]));
        let w = sample_walsh(1, 3, &mut rng).unwrap();
        assert!(w.votes().all(|v| v.as_slice() == [0]));
    }

    #[test]
    fn walsh_two_candidates_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let axis = r(&[0, 1]);
        let trials = 20_000;
        let first = (0..trials)
            .filter(|_| walsh_vote(&axis, &mut rng).as_slice()[0] == 0)
            .count();
        let sd = (0.25 / trials as f64).sqrt();
        assert!((first as f64 / trials as f64 - 0.5).abs() < 4.0 * sd);
    }

    #[test]
    fn axis_metadata_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = sample_walsh(6, 20, &mut rng).unwrap();
        let axis = axis_from_metadata(&e).unwrap();
        assert!(election_is_single_peaked_on(&e, &axis));
    }
}
