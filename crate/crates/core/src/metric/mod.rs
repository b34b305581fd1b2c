//! Earth mover's distance on position distributions and the positionwise
//! distance between frequency matrices.

pub mod assignment;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::election::Election;
use crate::error::{Error, Result};
use crate::matrix::{FrequencyMatrix, Rational};

/// Positionwise distance together with one optimal column matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceRecord {
    pub value: Rational,
    /// Column `i` of the first matrix is matched with column
    /// `column_permutation[i]` of the second.
    pub column_permutation: Vec<usize>,
}

/// EMD between two distributions on positions `1..=m` with ground cost
/// `|i - j|`: the sum of absolute differences of prefix sums.
pub fn emd(x: &[Rational], y: &[Rational]) -> Result<Rational> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    for v in [x, y] {
        if v.iter().any(|e| e.is_negative()) {
            return Err(Error::param("distribution has a negative entry"));
        }
        let s: Rational = v.iter().sum();
        if !s.is_one() {
            return Err(Error::param(format!("distribution sums to {s}, not 1")));
        }
    }
    Ok(emd_unchecked(x.iter().copied(), y.iter().copied()))
}

fn emd_unchecked(x: impl Iterator<Item = Rational>, y: impl Iterator<Item = Rational>) -> Rational {
    let mut carry = Rational::zero();
    let mut total = Rational::zero();
    for (a, b) in x.zip(y) {
        carry += a - b;
        total += carry.abs();
    }
    total
}

/// `cost[i][j]` = EMD between column `i` of `x` and column `j` of `y`.
pub fn emd_cost_matrix(x: &FrequencyMatrix, y: &FrequencyMatrix) -> Vec<Vec<Rational>> {
    let m = x.m();
    let xs: Vec<Vec<Rational>> = (0..m).map(|c| x.column(c)).collect();
    let ys: Vec<Vec<Rational>> = (0..m).map(|c| y.column(c)).collect();
    xs.iter()
        .map(|xc| {
            ys.iter()
                .map(|yc| emd_unchecked(xc.iter().copied(), yc.iter().copied()))
                .collect()
        })
        .collect()
}

/// Minimum over column permutations of the summed column EMDs.
pub fn positionwise(x: &FrequencyMatrix, y: &FrequencyMatrix) -> Result<DistanceRecord> {
    if x.m() != y.m() {
        return Err(Error::DimensionMismatch {
            expected: x.m(),
            actual: y.m(),
        });
    }
    let cost = emd_cost_matrix(x, y);

    let mut scale: i128 = 1;
    for c in cost.iter().flatten() {
        let d = *c.denom();
        scale = scale
            .checked_div(scale.gcd(&d))
            .and_then(|s| s.checked_mul(d))
            .ok_or(Error::Overflow("scaling the EMD cost matrix"))?;
    }
    let int_cost = cost
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    c.numer()
                        .checked_mul(scale / c.denom())
                        .ok_or(Error::Overflow("scaling the EMD cost matrix"))
                })
                .collect::<Result<Vec<i128>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let (_, sigma) = assignment::min_cost_assignment(&int_cost);
    let value = sigma.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(DistanceRecord {
        value,
        column_permutation: sigma,
    })
}

/// Positionwise distance between the frequency matrices of two elections.
pub fn positionwise_elections(e: &Election, f: &Election) -> Result<DistanceRecord> {
    if e.m() != f.m() {
        return Err(Error::DimensionMismatch {
            expected: e.m(),
            actual: f.m(),
        });
    }
    positionwise(&e.frequency_matrix(), &f.frequency_matrix())
}

/// `D(m) = POS(ID_m, UN_m) = (m^2 - 1) / 3`.
pub fn normalization_constant(m: usize) -> Rational {
    let m = m as i128;
    Rational::new(m * m - 1, 3)
}

/// Distance divided by `D(m)`. Zero when `m = 1`.
pub fn normalized(value: Rational, m: usize) -> Rational {
    let d = normalization_constant(m);
    if d.is_zero() {
        Rational::zero()
    } else {
        value / d
    }
}

/// Symmetric matrix of pairwise positionwise distances. Pairs are computed
/// in parallel; the result does not depend on scheduling.
pub fn distance_matrix(items: &[FrequencyMatrix]) -> Result<Vec<Vec<Rational>>> {
    let k = items.len();
    if let Some(first) = items.first() {
        for it in items {
            if it.m() != first.m() {
                return Err(Error::DimensionMismatch {
                    expected: first.m(),
                    actual: it.m(),
                });
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| positionwise(&items[i], &items[j]).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let mut d = vec![vec![Rational::zero(); k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[i][j] = v;
        d[j][i] = v;
    }
    Ok(d)
}

/// Decimal rendering with `digits` significant digits, trailing zeros trimmed.
pub fn format_decimal(x: Rational, digits: usize) -> String {
    let v = *x.numer() as f64 / *x.denom() as f64;
    format_f64(v, digits)
}

pub(crate) fn format_f64(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// CSV with a header row of ids, then the matrix rendered as decimals.
pub fn distance_csv_decimal(ids: &[String], d: &[Vec<Rational>]) -> String {
    render_distance_csv(ids, d, |x| format_decimal(x, 12))
}

/// Same layout as [`distance_csv_decimal`] with exact `p/q` entries.
pub fn distance_csv_exact(ids: &[String], d: &[Vec<Rational>]) -> String {
    render_distance_csv(ids, d, |x| format!("{}/{}", x.numer(), x.denom()))
}

fn render_distance_csv(
    ids: &[String],
    d: &[Vec<Rational>],
    render: impl Fn(Rational) -> String,
) -> String {
    let mut s = ids.join(",");
    s.push('\n');
    for row in d {
        let line: Vec<String> = row.iter().map(|&x| render(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Reads a distance CSV (header of ids, then decimal or `p/q` entries).
pub fn parse_distance_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty distance file"))?;
    let ids: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let row = line
            .split(',')
            .map(|tok| {
                parse_number(tok.trim())
                    .ok_or_else(|| Error::parse(lineno + 1, format!("not a number: {tok:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != ids.len() {
            return Err(Error::parse(
                lineno + 1,
                format!("expected {} values, got {}", ids.len(), row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != ids.len() {
        return Err(Error::DimensionMismatch {
            expected: ids.len(),
            actual: rows.len(),
        });
    }
    Ok((ids, rows))
}

fn parse_number(tok: &str) -> Option<f64> {
    if let Some((p, q)) = tok.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        Some(p / q)
    } else {
        tok.parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::tests::example_election;
    use crate::election::{Ballot, Election, Ranking};

    fn q(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn emd_examples() {
        let a = [q(1, 2), q(1, 2), q(0, 1)];
        assert_eq!(emd(&a, &a).unwrap(), q(0, 1));
        assert_eq!(
            emd(&[q(1, 1), q(0, 1), q(0, 1)], &[q(0, 1), q(0, 1), q(1, 1)]).unwrap(),
            q(2, 1)
        );
        // columns a and b of the example election
        assert_eq!(emd(&a, &[q(1, 6), q(1, 2), q(1, 3)]).unwrap(), q(2, 3));
    }

    #[test]
    fn emd_errors() {
        assert!(emd(&[q(1, 1)], &[q(1, 2), q(1, 2)]).is_err());
        assert!(emd(&[q(1, 2), q(1, 3)], &[q(1, 2), q(1, 2)]).is_err());
        assert!(emd(&[q(3, 2), q(-1, 2)], &[q(1, 2), q(1, 2)]).is_err());
    }

    #[test]
    fn self_distance_is_zero() {
        let f = example_election().frequency_matrix();
        let r = positionwise(&f, &f).unwrap();
        assert_eq!(r.value, q(0, 1));
        assert_eq!(r.column_permutation, vec![0, 1, 2]);
    }

    #[test]
    fn unanimous_elections_coincide() {
        let m = 3;
        let e = Election::from_rankings(m, vec![Ranking::identity(m)]).unwrap();
        let f = Election::from_rankings(m, vec![Ranking::identity(m).reversed()]).unwrap();
        let r = positionwise_elections(&e, &f).unwrap();
        assert_eq!(r.value, q(0, 1));
        assert_eq!(r.column_permutation, vec![2, 1, 0]);

        let hundred = Election::new(
            crate::election::default_names(m),
            vec![Ballot {
                ranking: Ranking::identity(m),
                count: 100,
            }],
        )
        .unwrap();
        let doubled = Election::new(
            crate::election::default_names(m),
            vec![Ballot {
                ranking: Ranking::identity(m),
                count: 200,
            }],
        )
        .unwrap();
        assert_eq!(
            positionwise_elections(&hundred, &doubled).unwrap().value,
            q(0, 1)
        );
    }

    #[test]
    fn dimension_mismatch() {
        let a = FrequencyMatrix::identity(3);
        let b = FrequencyMatrix::identity(4);
        assert!(positionwise(&a, &b).is_err());
        assert!(distance_matrix(&[a, b]).is_err());
    }

    #[test]
    fn distance_matrix_single() {
        let d = distance_matrix(&[FrequencyMatrix::identity(4)]).unwrap();
        assert_eq!(d, vec![vec![q(0, 1)]]);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(q(5, 1), 12), "5");
        assert_eq!(format_decimal(q(1, 3), 12), "0.333333333333");
        assert_eq!(format_decimal(q(65, 3), 12), "21.6666666667");
        assert_eq!(format_decimal(q(0, 1), 12), "0");
        assert_eq!(format_decimal(q(1, 8000), 12), "0.000125");
    }

    #[test]
    fn distance_csv_round_trip() {
        let ids = vec!["x".to_string(), "y".to_string()];
        let d = vec![vec![q(0, 1), q(5, 3)], vec![q(5, 3), q(0, 1)]];
        for text in [distance_csv_decimal(&ids, &d), distance_csv_exact(&ids, &d)] {
            let (rid, rows) = parse_distance_csv(&text).unwrap();
            assert_eq!(rid, ids);
            assert!((rows[0][1] - 5.0 / 3.0).abs() < 1e-10);
        }
    }
}
