//! The four compass matrices (identity, uniformity, stratification,
//! antagonism) and the convex-combination paths connecting them.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{FrequencyMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompassKind {
    /// Identity: every voter has the same ranking.
    Id,
    /// Uniformity: every candidate on every position equally often.
    Un,
    /// Stratification: two halves, indistinguishable inside each half.
    St,
    /// Antagonism: half of ID plus half of reversed ID.
    An,
    /// Reversed identity (columns of ID in reverse order).
    RId,
}

impl CompassKind {
    /// The four corners, in map order.
    pub const CORNERS: [CompassKind; 4] = [
        CompassKind::Id,
        CompassKind::Un,
        CompassKind::An,
        CompassKind::St,
    ];

    /// The six corner pairs, in the order paths are emitted.
    pub const PAIRS: [(CompassKind, CompassKind); 6] = [
        (CompassKind::Id, CompassKind::Un),
        (CompassKind::Id, CompassKind::An),
        (CompassKind::Id, CompassKind::St),
        (CompassKind::Un, CompassKind::An),
        (CompassKind::Un, CompassKind::St),
        (CompassKind::An, CompassKind::St),
    ];

    pub fn label(self) -> &'static str {
        match self {
            CompassKind::Id => "ID",
            CompassKind::Un => "UN",
            CompassKind::St => "ST",
            CompassKind::An => "AN",
            CompassKind::RId => "rID",
        }
    }

    fn requires_even(self) -> bool {
        matches!(self, CompassKind::St | CompassKind::An)
    }

    /// rID is ID up to relabeling, so it shares ID's distances.
    fn distance_class(self) -> CompassKind {
        match self {
            CompassKind::RId => CompassKind::Id,
            k => k,
        }
    }
}

impl fmt::Display for CompassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CompassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ID" => Ok(CompassKind::Id),
            "UN" => Ok(CompassKind::Un),
            "ST" => Ok(CompassKind::St),
            "AN" => Ok(CompassKind::An),
            "RID" => Ok(CompassKind::RId),
            _ => Err(Error::param(format!("unknown compass matrix {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompassMatrix {
    pub kind: CompassKind,
    pub m: usize,
    pub matrix: FrequencyMatrix,
}

pub fn compass_matrix(kind: CompassKind, m: usize) -> Result<CompassMatrix> {
    if m == 0 {
        return Err(Error::param("compass matrices need m >= 1"));
    }
    if kind.requires_even() && m % 2 == 1 {
        return Err(Error::param(format!(
            "{kind} requires an even number of candidates, got {m}"
        )));
    }
    let mut entries = vec![Rational::zero(); m * m];
    let half = m / 2;
    for pos in 0..m {
        for cand in 0..m {
            entries[pos * m + cand] = match kind {
                CompassKind::Id => indicator(pos == cand),
                CompassKind::RId => indicator(pos == m - 1 - cand),
                CompassKind::Un => Rational::new(1, m as i128),
                CompassKind::St => {
                    if (pos < half) == (cand < half) {
                        Rational::new(1, half as i128)
                    } else {
                        Rational::zero()
                    }
                }
                CompassKind::An => {
                    let half_weight = Rational::new(1, 2);
                    let mut x = Rational::zero();
                    if pos == cand {
                        x += half_weight;
                    }
                    if pos == m - 1 - cand {
                        x += half_weight;
                    }
                    x
                }
            };
        }
    }
    Ok(CompassMatrix {
        kind,
        m,
        matrix: FrequencyMatrix::from_entries_unchecked(m, entries),
    })
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Normalization constant and limiting normalized distances between corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompassNorms {
    pub m: usize,
    /// `D(m) = (m^2 - 1) / 3`.
    pub d_m: Rational,
}

impl CompassNorms {
    pub fn new(m: usize) -> Self {
        CompassNorms {
            m,
            d_m: crate::metric::normalization_constant(m),
        }
    }

    /// `lim POS(a_m, b_m) / D(m)` as `m` grows.
    pub fn limit(a: CompassKind, b: CompassKind) -> Rational {
        use CompassKind::*;
        let (a, b) = ordered(a.distance_class(), b.distance_class());
        let r = |p, q| Rational::new(p, q);
        match (a, b) {
            _ if a == b => Rational::zero(),
            (Id, Un) => r(1, 1),
            (Id, An) | (Un, St) => r(3, 4),
            (St, An) => r(13, 16),
            (Id, St) | (Un, An) => r(1, 2),
            _ => unreachable!("distance classes are Id, Un, St, An"),
        }
    }
}

fn ordered(a: CompassKind, b: CompassKind) -> (CompassKind, CompassKind) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact positionwise distance between two corners for `m` divisible by 4.
pub fn closed_form_distance(a: CompassKind, b: CompassKind, m: usize) -> Result<Rational> {
    use CompassKind::*;
    if m == 0 || !m.is_multiple_of(4) {
        return Err(Error::param(format!(
            "closed forms hold for m divisible by 4, got {m}"
        )));
    }
    let m2 = (m * m) as i128;
    let r = |p, q| Rational::new(p, q);
    let (a, b) = ordered(a.distance_class(), b.distance_class());
    Ok(match (a, b) {
        _ if a == b => Rational::zero(),
        (Id, Un) => r(m2 - 1, 3),
        (Id, An) | (Un, St) => r(m2, 4),
        (Id, St) | (Un, An) => r(2, 3) * (r(m2, 4) - Rational::one()),
        (St, An) => r(13 * m2, 48) - r(1, 3),
        _ => unreachable!("distance classes are Id, Un, St, An"),
    })
}

/// One point on the segment between two compass matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSpec {
    pub from: CompassKind,
    pub to: CompassKind,
    /// Weight on `from`; the point is `alpha * from + (1 - alpha) * to`.
    pub alpha: Rational,
    pub point: FrequencyMatrix,
}

pub fn path_point(x: &CompassMatrix, y: &CompassMatrix, alpha: Rational) -> Result<PathSpec> {
    Ok(PathSpec {
        from: x.kind,
        to: y.kind,
        alpha,
        point: FrequencyMatrix::convex_combination(alpha, &x.matrix, &y.matrix)?,
    })
}

/// `count` interior points with `alpha = k / (count + 1)`, `k = 1..=count`.
pub fn path_points(x: &CompassMatrix, y: &CompassMatrix, count: usize) -> Result<Vec<PathSpec>> {
    if x.m != y.m {
        return Err(Error::DimensionMismatch {
            expected: x.m,
            actual: y.m,
        });
    }
    let denom = count as i128 + 1;
    (1..=count as i128)
        .map(|k| path_point(x, y, Rational::new(k, denom)))
        .collect()
}

/// `ceil(scale * d(a, b))`.
pub fn default_path_count(a: CompassKind, b: CompassKind, scale: usize) -> usize {
    (Rational::from_integer(scale as i128) * CompassNorms::limit(a, b))
        .ceil()
        .to_integer() as usize
}

/// A labeled matrix of the full compass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompassEntry {
    pub label: String,
    /// `None` for the corners.
    pub pair: Option<(CompassKind, CompassKind)>,
    /// Weight on the first matrix of `pair` (1 for corners).
    pub alpha: Rational,
    pub matrix: FrequencyMatrix,
}

/// The four corners followed by `ceil(scale * d)` interior points on each
/// of the six connecting paths.
pub fn full_compass(m: usize, scale: usize) -> Result<Vec<CompassEntry>> {
    if m == 0 || !m.is_multiple_of(4) {
        return Err(Error::param(format!(
            "the full compass needs m divisible by 4, got {m}"
        )));
    }
    let mut out = Vec::new();
    for kind in CompassKind::CORNERS {
        out.push(CompassEntry {
            label: kind.label().to_string(),
            pair: None,
            alpha: Rational::one(),
            matrix: compass_matrix(kind, m)?.matrix,
        });
    }
    for (a, b) in CompassKind::PAIRS {
        let x = compass_matrix(a, m)?;
        let y = compass_matrix(b, m)?;
        let count = default_path_count(a, b, scale);
        for (k, p) in path_points(&x, &y, count)?.into_iter().enumerate() {
            out.push(CompassEntry {
                label: format!("{a}-{b}_a{}of{}", k + 1, count + 1),
                pair: Some((a, b)),
                alpha: p.alpha,
                matrix: p.point,
            });
        }
    }
    Ok(out)
}
