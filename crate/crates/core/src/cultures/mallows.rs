//! Mallows model: repeated-insertion sampling, Mahonian numbers, and the
//! normalization that maps a relative expected swap distance to `phi`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::election::{Election, Ranking};
use crate::error::{Error, Result};

/// `counts(m)[i]` is the number of permutations of `m` elements with `i` inversions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MahonianTable {
    rows: Vec<Vec<BigUint>>,
}

impl MahonianTable {
    /// Builds rows `0..=m_max` with `T[m][i] = T[m][i-1] + T[m-1][i] - T[m-1][i-m]`.
    pub fn new(m_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u8)]];
        for m in 1..=m_max {
            let prev = &rows[m - 1];
            let len = m * (m - 1) / 2 + 1;
            let mut row: Vec<BigUint> = Vec::with_capacity(len);
            row.push(BigUint::from(1u8));
            for i in 1..len {
                // T[m][i-1] + T[m-1][i] - T[m-1][i-m], computed as a sum to stay unsigned.
                let mut v = row[i - 1].clone();
                if let Some(x) = prev.get(i) {
                    v += x;
                }
                if i >= m {
                    if let Some(x) = prev.get(i - m) {
                        v -= x;
                    }
                }
                row.push(v);
            }
            rows.push(row);
        }
        MahonianTable { rows }
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn counts(&self, m: usize) -> &[BigUint] {
        &self.rows[m]
    }
}

fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Expected swap distance and its inverse for a fixed number of candidates.
#[derive(Clone, Debug)]
pub struct MallowsNormalizer {
    m: usize,
    ln_counts: Vec<f64>,
}

impl MallowsNormalizer {
    pub fn new(m: usize) -> Self {
        let table = MahonianTable::new(m);
        MallowsNormalizer {
            m,
            ln_counts: table.counts(m).iter().map(ln_big).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `(1/Z) sum_i i T[m][i] phi^i` with `Z = sum_i T[m][i] phi^i`.
    pub fn expected_swaps(&self, phi: f64) -> Result<f64> {
        check_unit("phi", phi)?;
        let max_swaps = self.ln_counts.len() - 1;
        if phi == 0.0 || max_swaps == 0 {
            return Ok(0.0);
        }
        if phi == 1.0 {
            return Ok(max_swaps as f64 / 2.0);
        }
        let ln_phi = phi.ln();
        let logs: Vec<f64> = self
            .ln_counts
            .iter()
            .enumerate()
            .map(|(i, lc)| lc + i as f64 * ln_phi)
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut weighted = 0.0;
        for (i, l) in logs.iter().enumerate() {
            let w = (l - top).exp();
            z += w;
            weighted += i as f64 * w;
        }
        Ok(weighted / z)
    }

    /// Expected swap distance divided by `m(m-1)/2`.
    pub fn relswaps(&self, phi: f64) -> Result<f64> {
        let max_swaps = self.ln_counts.len() - 1;
        if max_swaps == 0 {
            return Err(Error::param("relative swaps need at least two candidates"));
        }
        Ok(self.expected_swaps(phi)? / max_swaps as f64)
    }

    /// The `phi` whose relative expected swap distance is `relphi`, by
    /// bisection (relswaps is strictly increasing in `phi`).
    pub fn phi_for(&self, relphi: f64) -> Result<f64> {
        if self.m < 2 {
            return Err(Error::param(
                "relphi normalization needs at least two candidates",
            ));
        }
        if !(0.0..=0.5).contains(&relphi) {
            return Err(Error::param(format!(
                "relphi must lie in [0, 0.5], got {relphi}"
            )));
        }
        if relphi == 0.0 {
            return Ok(0.0);
        }
        if relphi == 0.5 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.relswaps(mid)? < relphi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must lie in [0, 1], got {x}")))
    }
}

pub fn mahonian_table(m_max: usize) -> MahonianTable {
    MahonianTable::new(m_max)
}

pub fn expected_swaps(m: usize, phi: f64) -> Result<f64> {
    MallowsNormalizer::new(m).expected_swaps(phi)
}

pub fn relswaps(m: usize, phi: f64) -> Result<f64> {
    MallowsNormalizer::new(m).relswaps(phi)
}

pub fn relphi_to_phi(m: usize, relphi: f64) -> Result<f64> {
    MallowsNormalizer::new(m).phi_for(relphi)
}

/// One Mallows vote by repeated insertion: the `j`-th candidate of the
/// central order lands `k` places above the bottom of the partial vote with
/// probability proportional to `phi^k`, `k = 0..=j`.
pub fn mallows_vote<R: Rng + ?Sized>(central: &Ranking, phi: f64, rng: &mut R) -> Ranking {
    let m = central.len();
    let mut vote: Vec<usize> = Vec::with_capacity(m);
    let mut weights: Vec<f64> = Vec::with_capacity(m);
    for (j, &cand) in central.as_slice().iter().enumerate() {
        // weights[k] = phi^k
        weights.push(if j == 0 { 1.0 } else { weights[j - 1] * phi });
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut k = 0;
        while k < j && u >= weights[k] {
            u -= weights[k];
            k += 1;
        }
        vote.insert(j - k, cand);
    }
    Ranking::from_vec_unchecked(vote)
}

pub fn sample_mallows<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    phi: f64,
    central: Option<&Ranking>,
    rng: &mut R,
) -> Result<Election> {
    check_unit("phi", phi)?;
    let identity = Ranking::identity(m);
    let central = central.unwrap_or(&identity);
    if central.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: central.len(),
        });
    }
    let votes = (0..n).map(|_| mallows_vote(central, phi, rng)).collect();
    Ok(Election::from_rankings(m, votes)?.with_metadata("phi", phi))
}

/// Normalized Mallows. For `relphi > 0.5` the vote is drawn with the
/// parameter for `1 - relphi` around the reversed central order.
pub fn sample_mallows_norm<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    relphi: f64,
    rng: &mut R,
) -> Result<Election> {
    check_unit("relphi", relphi)?;
    if m < 2 {
        let votes = (0..n).map(|_| Ranking::identity(m)).collect();
        return Election::from_rankings(m, votes);
    }
    let normalizer = MallowsNormalizer::new(m);
    sample_mallows_norm_with(&normalizer, n, relphi, rng)
}

/// As [`sample_mallows_norm`], reusing a precomputed normalizer.
pub fn sample_mallows_norm_with<R: Rng + ?Sized>(
    normalizer: &MallowsNormalizer,
    n: usize,
    relphi: f64,
    rng: &mut R,
) -> Result<Election> {
    check_unit("relphi", relphi)?;
    let m = normalizer.m();
    let (central, phi) = if relphi <= 0.5 {
        (Ranking::identity(m), normalizer.phi_for(relphi)?)
    } else {
        (
            Ranking::identity(m).reversed(),
            normalizer.phi_for(1.0 - relphi)?,
        )
    };
    let votes = (0..n).map(|_| mallows_vote(&central, phi, rng)).collect();
    Ok(Election::from_rankings(m, votes)?
        .with_metadata("relphi", relphi)
        .with_metadata("phi", phi))
}
