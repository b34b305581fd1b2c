#![allow(dead_code)]

use election_compass::matrix::{FrequencyMatrix, Rational};
use election_compass::Ranking;
use rand::seq::SliceRandom;
use rand::Rng;

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                rec(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

pub fn inversions(p: &[usize]) -> usize {
    let mut k = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                k += 1;
            }
        }
    }
    k
}

/// Earth mover's distance on a line by explicitly moving mass left to right.
pub fn transport_emd(x: &[Rational], y: &[Rational]) -> Rational {
    let mut supply: Vec<Rational> = x.to_vec();
    let mut demand: Vec<Rational> = y.to_vec();
    let (mut i, mut j) = (0, 0);
    let mut cost = Rational::from_integer(0);
    let zero = Rational::from_integer(0);
    while i < supply.len() && j < demand.len() {
        if supply[i] == zero {
            i += 1;
            continue;
        }
        if demand[j] == zero {
            j += 1;
            continue;
        }
        let moved = supply[i].min(demand[j]);
        cost += moved * Rational::from_integer((i as i128 - j as i128).abs());
        supply[i] -= moved;
        demand[j] -= moved;
    }
    cost
}

/// Positionwise distance by trying every column matching.
pub fn brute_positionwise(x: &FrequencyMatrix, y: &FrequencyMatrix) -> Rational {
    let m = x.m();
    permutations(m)
        .into_iter()
        .map(|sigma| {
            (0..m)
                .map(|c| transport_emd(&x.column(c), &y.column(sigma[c])))
                .sum::<Rational>()
        })
        .min()
        .unwrap()
}

/// Each vote is single-peaked on `axis` iff no candidate is ranked below
/// two candidates lying on both sides of it on the axis.
pub fn valley_free(vote: &Ranking, axis: &Ranking) -> bool {
    let m = vote.len();
    let mut place = vec![0; m];
    for (k, &c) in axis.as_slice().iter().enumerate() {
        place[c] = k;
    }
    let rank = vote.positions();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if place[a] < place[b]
                    && place[b] < place[c]
                    && rank[b] > rank[a]
                    && rank[b] > rank[c]
                {
                    return false;
                }
            }
        }
    }
    true
}

/// A random bistochastic matrix: a weighted mix of random permutation matrices.
pub fn random_bistochastic<R: Rng>(m: usize, rng: &mut R) -> FrequencyMatrix {
    let terms = rng.random_range(1..=4);
    let mut counts = vec![vec![0i128; m]; m];
    let mut total = 0i128;
    for _ in 0..terms {
        let w = rng.random_range(1..=12);
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        for (row, &col) in perm.iter().enumerate() {
            counts[row][col] += w;
        }
        total += w;
    }
    let rows = counts
        .into_iter()
        .map(|r| r.into_iter().map(|c| Rational::new(c, total)).collect())
        .collect();
    FrequencyMatrix::from_rows(rows).unwrap()
}

/// All nonnegative integer `m x m` matrices whose rows and columns sum to `n`.
pub fn all_position_matrices(m: usize, n: u64) -> Vec<Vec<Vec<u64>>> {
    fn compositions(n: u64, parts: usize) -> Vec<Vec<u64>> {
        if parts == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for first in 0..=n {
            for mut rest in compositions(n - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let rows = compositions(n, m);
    let mut out = Vec::new();
    let mut current: Vec<Vec<u64>> = Vec::new();
    fn rec(
        rows: &[Vec<u64>],
        m: usize,
        n: u64,
        current: &mut Vec<Vec<u64>>,
        out: &mut Vec<Vec<Vec<u64>>>,
    ) {
        if current.len() == m {
            if (0..m).all(|c| current.iter().map(|r| r[c]).sum::<u64>() == n) {
                out.push(current.clone());
            }
            return;
        }
        for r in rows {
            if (0..m).all(|c| current.iter().map(|x| x[c]).sum::<u64>() + r[c] <= n) {
                current.push(r.clone());
                rec(rows, m, n, current, out);
                current.pop();
            }
        }
    }
    rec(&rows, m, n, &mut current, &mut out);
    out
}

/// `sum_ij |n x_ij - p_ij|`.
pub fn deviation(x: &FrequencyMatrix, n: u64, p: &[Vec<u64>]) -> Rational {
    let m = x.m();
    let mut d = Rational::from_integer(0);
    for i in 0..m {
        for j in 0..m {
            let diff = x.get(i, j) * Rational::from_integer(n as i128)
                - Rational::from_integer(p[i][j] as i128);
            d += if diff < Rational::from_integer(0) {
                -diff
            } else {
                diff
            };
        }
    }
    d
}

/// Pearson's statistic for observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e) * (o as f64 - e) / e
        })
        .sum()
}

pub fn critical_value(df: usize, level: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - level)
}
