//! Reconstructing elections from position matrices and from frequency
//! matrices with a voter count.

mod flow;

pub use flow::MinCostFlow;

use num_integer::Integer;
use num_traits::Zero;

use crate::election::{default_names, Ballot, Election, Ranking};
use crate::error::{Error, Result};
use crate::matrix::{FrequencyMatrix, PositionMatrix, Rational};

/// Decomposes a position matrix into votes (permutation matrices).
///
/// Each round matches positions to candidates along nonzero entries and
/// subtracts the largest multiple `z` of the matched permutation that keeps
/// the matrix nonnegative, so at least one entry reaches zero per round.
pub fn election_from_position_matrix(x: &PositionMatrix) -> Result<Election> {
    let m = x.m();
    if x.n() == 0 {
        return Err(Error::InvalidMatrix(
            "position matrix with zero voters".into(),
        ));
    }
    let mut rest: Vec<Vec<u64>> = x.rows();
    let mut ballots = Vec::new();
    let max_rounds = m * m - m + 1;
    loop {
        if rest.iter().flatten().all(|&e| e == 0) {
            break;
        }
        if ballots.len() == max_rounds {
            return Err(Error::Internal(format!(
                "decomposition exceeded {max_rounds} rounds"
            )));
        }
        let matching = perfect_matching(&rest).ok_or_else(|| {
            Error::Internal("no perfect matching on the support of a position matrix".into())
        })?;
        let z = matching
            .iter()
            .enumerate()
            .map(|(pos, &cand)| rest[pos][cand])
            .min()
            .expect("m >= 1");
        for (pos, &cand) in matching.iter().enumerate() {
            rest[pos][cand] -= z;
        }
        ballots.push(Ballot {
            ranking: Ranking::from_vec_unchecked(matching),
            count: z,
        });
    }
    Election::new(default_names(m), ballots)
}

/// Kuhn's augmenting-path matching of rows to columns over nonzero entries.
fn perfect_matching(support: &[Vec<u64>]) -> Option<Vec<usize>> {
    let m = support.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; m];
    for row in 0..m {
        let mut visited = vec![false; m];
        if !augment(support, row, &mut visited, &mut col_owner) {
            return None;
        }
    }
    let mut row_to_col = vec![0; m];
    for (col, owner) in col_owner.iter().enumerate() {
        row_to_col[owner.expect("perfect matching")] = col;
    }
    Some(row_to_col)
}

fn augment(
    support: &[Vec<u64>],
    row: usize,
    visited: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for col in 0..support.len() {
        if support[row][col] == 0 || visited[col] {
            continue;
        }
        visited[col] = true;
        let free = match col_owner[col] {
            None => true,
            Some(other) => augment(support, other, visited, col_owner),
        };
        if free {
            col_owner[col] = Some(row);
            return true;
        }
    }
    false
}

/// Rounds `n * x` to a position matrix `P` with `|n x_ij - p_ij| <= 1` whose
/// total deviation is minimal among such roundings.
///
/// With `Y` the fractional parts of `n x`, the set of entries rounded up is
/// an integral min-cost flow: row chains `s -> v_i1 -> ... -> v_im` carrying
/// the row sums of `Y`, unit arcs `v_ij -> t_j` costing `1 - 2 y_ij`, and
/// arcs `t_j -> t` carrying the column sums of `Y`.
pub fn round_frequency_matrix(x: &FrequencyMatrix, n: u64) -> Result<PositionMatrix> {
    if n == 0 {
        return Err(Error::param("voter count must be at least 1"));
    }
    if !x.is_bistochastic() {
        return Err(Error::InvalidMatrix("input is not bistochastic".into()));
    }
    let m = x.m();
    let scaled: Vec<Rational> = x.entries().iter().map(|e| e * n as i128).collect();
    let floors: Vec<u64> = scaled
        .iter()
        .map(|e| e.floor().to_integer() as u64)
        .collect();
    let frac: Vec<Rational> = scaled.iter().map(|e| e.fract()).collect();

    let mut scale: i128 = 1;
    for y in &frac {
        let d = *y.denom();
        scale = (scale / scale.gcd(&d))
            .checked_mul(d)
            .ok_or(Error::Overflow("scaling rounding costs"))?;
    }
    let line_sum = |idx: &mut dyn Iterator<Item = usize>| -> Result<i64> {
        let s: Rational = idx.map(|k| frac[k]).sum();
        if !s.is_integer() {
            return Err(Error::Internal(format!("fractional line sum {s}")));
        }
        Ok(s.to_integer() as i64)
    };
    let row_sums = (0..m)
        .map(|i| line_sum(&mut (0..m).map(|j| i * m + j)))
        .collect::<Result<Vec<_>>>()?;
    let col_sums = (0..m)
        .map(|j| line_sum(&mut (0..m).map(|i| i * m + j)))
        .collect::<Result<Vec<_>>>()?;

    let source = 0;
    let cell = |i: usize, j: usize| 1 + i * m + j;
    let pre_sink = |j: usize| 1 + m * m + j;
    let sink = 1 + m * m + m;
    let mut net = MinCostFlow::new(sink + 1);
    let mut cell_arcs = vec![0usize; m * m];
    for i in 0..m {
        net.add_arc(source, cell(i, 0), row_sums[i], 0);
        for j in 0..m {
            if j + 1 < m {
                net.add_arc(cell(i, j), cell(i, j + 1), row_sums[i], 0);
            }
            let y = frac[i * m + j];
            let cost = scale - 2 * (y * scale).to_integer();
            cell_arcs[i * m + j] = net.add_arc(cell(i, j), pre_sink(j), 1, cost);
        }
    }
    for j in 0..m {
        net.add_arc(pre_sink(j), sink, col_sums[j], 0);
    }
    let total: i64 = row_sums.iter().sum();
    let (sent, _) = net.run(source, sink, total);
    if sent != total {
        return Err(Error::Internal(format!(
            "rounding flow carried {sent} of {total} units"
        )));
    }
    let entries: Vec<u64> = (0..m * m)
        .map(|k| floors[k] + net.flow(cell_arcs[k]) as u64)
        .collect();
    PositionMatrix::from_rows(entries.chunks(m).map(<[u64]>::to_vec).collect())
        .map_err(|e| Error::Internal(format!("rounded matrix invalid: {e}")))
}

/// An `n`-voter election whose position matrix is the optimal rounding of `n x`.
pub fn election_from_frequency_matrix(x: &FrequencyMatrix, n: u64) -> Result<Election> {
    election_from_position_matrix(&round_frequency_matrix(x, n)?)
}

/// `sum |n x_ij - p_ij|`.
pub fn rounding_deviation(x: &FrequencyMatrix, p: &PositionMatrix) -> Rational {
    let m = x.m();
    let n = p.n() as i128;
    let mut total = Rational::zero();
    for i in 0..m {
        for j in 0..m {
            let d = x.get(i, j) * n - Rational::from_integer(p.get(i, j) as i128);
            total += if d < Rational::zero() { -d } else { d };
        }
    }
    total
}
