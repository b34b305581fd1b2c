//! Position and frequency matrices. Rows are positions, columns are candidates.

use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = num_rational::Ratio<i128>;

/// An `m x m` nonnegative integer matrix whose rows and columns all sum to `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionMatrix {
    m: usize,
    n: u64,
    entries: Vec<u64>,
}

impl PositionMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(m * m);
        for row in &rows {
            if row.len() != m {
                return Err(Error::InvalidMatrix(format!(
                    "row of length {} in a {m}x{m} matrix",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let n: u64 = rows[0].iter().sum();
        for i in 0..m {
            let row: u64 = (0..m).map(|j| entries[i * m + j]).sum();
            let col: u64 = (0..m).map(|j| entries[j * m + i]).sum();
            if row != n || col != n {
                return Err(Error::InvalidMatrix(format!(
                    "line sums differ: row {i} sums to {row}, column {i} to {col}, expected {n}"
                )));
            }
        }
        Ok(PositionMatrix { m, n, entries })
    }

    pub(crate) fn from_parts_unchecked(m: usize, n: u64, entries: Vec<u64>) -> Self {
        PositionMatrix { m, n, entries }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Common row/column sum (number of voters).
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, pos: usize, cand: usize) -> u64 {
        self.entries[pos * self.m + cand]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.m).map(<[u64]>::to_vec).collect()
    }

    pub fn to_frequency(&self) -> FrequencyMatrix {
        let n = self.n as i128;
        FrequencyMatrix {
            m: self.m,
            entries: self
                .entries
                .iter()
                .map(|&p| Rational::new(p as i128, n))
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.entries.chunks(self.m) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// An `m x m` bistochastic matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyMatrix {
    m: usize,
    entries: Vec<Rational>,
}

impl FrequencyMatrix {
    /// Builds a matrix from rows, checking it is bistochastic.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::InvalidMatrix(format!(
                    "row of length {} in a {m}x{m} matrix",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        let fm = FrequencyMatrix { m, entries };
        fm.check_bistochastic()?;
        Ok(fm)
    }

    pub(crate) fn from_entries_unchecked(m: usize, entries: Vec<Rational>) -> Self {
        debug_assert_eq!(entries.len(), m * m);
        FrequencyMatrix { m, entries }
    }

    /// The `m x m` identity matrix.
    pub fn identity(m: usize) -> Self {
        let mut entries = vec![Rational::zero(); m * m];
        for i in 0..m {
            entries[i * m + i] = Rational::one();
        }
        FrequencyMatrix { m, entries }
    }

    fn check_bistochastic(&self) -> Result<()> {
        let m = self.m;
        for (k, x) in self.entries.iter().enumerate() {
            if *x < Rational::zero() || *x > Rational::one() {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({}, {}) = {x} outside [0, 1]",
                    k / m,
                    k % m
                )));
            }
        }
        for i in 0..m {
            let row: Rational = (0..m).map(|j| self.get(i, j)).sum();
            let col: Rational = (0..m).map(|j| self.get(j, i)).sum();
            if !row.is_one() || !col.is_one() {
                return Err(Error::InvalidMatrix(format!(
                    "not bistochastic: row {i} sums to {row}, column {i} to {col}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_bistochastic(&self) -> bool {
        self.check_bistochastic().is_ok()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, pos: usize, cand: usize) -> Rational {
        self.entries[pos * self.m + cand]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Column `cand`: the distribution of the candidate over positions.
    pub fn column(&self, cand: usize) -> Vec<Rational> {
        (0..self.m).map(|i| self.get(i, cand)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries
            .chunks(self.m)
            .map(<[Rational]>::to_vec)
            .collect()
    }

    /// Matrix whose column `j` is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> FrequencyMatrix {
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for &src in perm {
                entries.push(self.get(i, src));
            }
        }
        FrequencyMatrix { m, entries }
    }

    /// `alpha * x + (1 - alpha) * y`.
    pub fn convex_combination(
        alpha: Rational,
        x: &FrequencyMatrix,
        y: &FrequencyMatrix,
    ) -> Result<FrequencyMatrix> {
        if x.m != y.m {
            return Err(Error::DimensionMismatch {
                expected: x.m,
                actual: y.m,
            });
        }
        if alpha < Rational::zero() || alpha > Rational::one() {
            return Err(Error::param(format!(
                "convex weight {alpha} outside [0, 1]"
            )));
        }
        let beta = Rational::one() - alpha;
        let entries = x
            .entries
            .iter()
            .zip(&y.entries)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(FrequencyMatrix { m: x.m, entries })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.entries.chunks(self.m) {
            let line: Vec<String> = row.iter().map(Rational::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for FrequencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// A matrix read from CSV, classified by its line sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixFile {
    Position(PositionMatrix),
    Frequency(FrequencyMatrix),
}

impl MatrixFile {
    pub fn into_frequency(self) -> FrequencyMatrix {
        match self {
            MatrixFile::Position(p) => p.to_frequency(),
            MatrixFile::Frequency(f) => f,
        }
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.70` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rational>() {
        return Ok(r);
    }
    let bad = || Error::param(format!("not a number: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.is_empty() && whole.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
        || frac.len() > 30
    {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Parses `m` lines of `m` comma-separated rationals (`p/q` or `p`).
pub fn parse_rational_rows(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<Rational>()
                    .map_err(|_| Error::parse(lineno + 1, format!("not a rational: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a matrix CSV. Rows summing to 1 make a frequency matrix; integer
/// matrices with other equal line sums make a position matrix.
pub fn parse_matrix_csv(text: &str) -> Result<MatrixFile> {
    let rows = parse_rational_rows(text)?;
    if rows.is_empty() {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    let first: Rational = rows[0].iter().sum();
    if first.is_one() {
        return FrequencyMatrix::from_rows(rows).map(MatrixFile::Frequency);
    }
    let mut int_rows = Vec::with_capacity(rows.len());
    for row in rows {
        let r = row
            .iter()
            .map(|x| {
                if x.is_integer() && *x >= Rational::zero() {
                    Ok(x.to_integer() as u64)
                } else {
                    Err(Error::InvalidMatrix(format!(
                        "rows do not sum to 1 and entry {x} is not a nonnegative integer"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        int_rows.push(r);
    }
    PositionMatrix::from_rows(int_rows).map(MatrixFile::Position)
}

pub fn read_matrix_csv(path: &Path) -> Result<MatrixFile> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("0.70").unwrap(), Rational::new(7, 10));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_integer(-2));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), Rational::new(-5, 4));
        for bad in ["", ".", "1.2.3", "abc", "1e3", "0.-1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    fn q(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn rejects_non_bistochastic() {
        assert!(
            FrequencyMatrix::from_rows(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 3)]])
                .is_err()
        );
        assert!(
            FrequencyMatrix::from_rows(vec![vec![q(3, 2), q(-1, 2)], vec![q(-1, 2), q(3, 2)]])
                .is_err()
        );
        assert!(PositionMatrix::from_rows(vec![vec![1, 1], vec![2, 0]]).is_err());
    }

    #[test]
    fn csv_autodetect() {
        let pos = parse_matrix_csv("3,1,2\n3,3,0\n0,2,4\n").unwrap();
        assert!(matches!(pos, MatrixFile::Position(ref p) if p.n() == 6));
        let freq = parse_matrix_csv("1/2,1/2\n1/2,1/2\n").unwrap();
        assert!(matches!(freq, MatrixFile::Frequency(_)));
        assert!(parse_matrix_csv("1/2,1\n1,1/2\n").is_err());
        assert!(parse_matrix_csv("a,b\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = FrequencyMatrix::from_rows(vec![
            vec![q(1, 2), q(1, 6), q(1, 3)],
            vec![q(1, 2), q(1, 2), q(0, 1)],
            vec![q(0, 1), q(1, 3), q(2, 3)],
        ])
        .unwrap();
        assert_eq!(f.to_csv(), "1/2,1/6,1/3\n1/2,1/2,0\n0,1/3,2/3\n");
        assert_eq!(
            parse_matrix_csv(&f.to_csv()).unwrap(),
            MatrixFile::Frequency(f)
        );
    }

    #[test]
    fn convex_combination_is_bistochastic() {
        let id = FrequencyMatrix::identity(3);
        let rev = id.permute_columns(&[2, 1, 0]);
        let mid = FrequencyMatrix::convex_combination(q(1, 3), &id, &rev).unwrap();
        assert!(mid.is_bistochastic());
        assert_eq!(mid.get(0, 0), q(1, 3));
        assert_eq!(mid.get(0, 2), q(2, 3));
        assert_eq!(mid.get(1, 1), q(1, 1));
    }
}
