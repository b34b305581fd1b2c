//! Planar embedding of distance matrices and rendering of maps.
//!
//! The layout minimizes the weighted stress
//! `sum_{i<j} w_ij (|p_i - p_j| - d_ij)^2` over normalized distances
//! `d = D / max(D)`, with `w_ij = d_ij^2` so that far-apart elections pull
//! hardest towards their target separation.

mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use svg::{render_svg, svg_document};

use crate::compass::CompassKind;
use crate::error::{Error, Result};

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const INITIAL_STEP: f64 = 0.1;
/// Random starts tried before committing to one.
pub const STARTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct MapPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Marker {
    /// Compass corner: large, outlined, labeled.
    Corner,
    /// Point on a path between two corners: small, connected to its neighbours.
    PathPoint,
    Dot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Style {
    pub color: String,
    pub marker: Marker,
    pub group: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapLayout {
    pub points: Vec<MapPoint>,
    /// Styling by point id. Points without an entry use the default style.
    pub styling: BTreeMap<String, Style>,
    pub seed: u64,
    pub iterations: usize,
    /// Stress after each iteration, in embedding units before rescaling.
    pub stress: Vec<f64>,
}

impl MapLayout {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.points[i], &self.points[j]);
        (a.x - b.x).hypot(a.y - b.y)
    }

    /// Embedded pairwise distances divided by their maximum.
    pub fn normalized_distances(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut d = vec![vec![0.0; n]; n];
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d[i][j] = self.distance(i, j);
                max = max.max(d[i][j]);
            }
        }
        if max > 0.0 {
            d.iter_mut().flatten().for_each(|x| *x /= max);
        }
        d
    }

    pub fn group_of(&self, id: &str) -> &str {
        self.styling.get(id).map_or("", |s| s.group.as_str())
    }

    /// Fills `styling` from the ids alone: `ID`, `UN`, `AN`, `ST` are
    /// corners, `X-Y_...` are path points of the pair `X-Y`, and any other
    /// id is grouped by its text before the first `_`.
    pub fn with_inferred_styling(mut self) -> Self {
        let mut groups: Vec<String> = Vec::new();
        for p in &self.points {
            let group = infer_group(&p.id);
            if !groups.contains(&group) {
                groups.push(group);
            }
        }
        let mut palette_index = BTreeMap::new();
        for g in &groups {
            if !is_corner(g) {
                let k = palette_index.len();
                palette_index.insert(g.clone(), k);
            }
        }
        for p in &self.points {
            let group = infer_group(&p.id);
            let (marker, color) = if is_corner(&group) {
                (Marker::Corner, "#000000".to_string())
            } else {
                let marker = if is_compass_pair(&group) {
                    Marker::PathPoint
                } else {
                    Marker::Dot
                };
                (
                    marker,
                    PALETTE[palette_index[&group] % PALETTE.len()].to_string(),
                )
            };
            self.styling.insert(
                p.id.clone(),
                Style {
                    color,
                    marker,
                    group,
                },
            );
        }
        self
    }
}

const PALETTE: [&str; 10] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

fn infer_group(id: &str) -> String {
    id.split('_').next().unwrap_or(id).to_string()
}

fn is_corner(group: &str) -> bool {
    matches!(group.parse::<CompassKind>(), Ok(k) if CompassKind::CORNERS.contains(&k))
}

fn is_compass_pair(group: &str) -> bool {
    match group.split_once('-') {
        Some((a, b)) => is_corner(a) && (is_corner(b) || b == "rID"),
        None => false,
    }
}

fn validate(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) = {x} is not a nonnegative distance"
                )));
            }
            if x != d[j][i] {
                return Err(Error::InvalidMatrix(format!(
                    "entries ({i}, {j}) and ({j}, {i}) differ"
                )));
            }
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidMatrix(format!(
                "diagonal entry {i} is nonzero"
            )));
        }
    }
    Ok(())
}

fn stress(p: &[(f64, f64)], target: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let e = (p[i].0 - p[j].0).hypot(p[i].1 - p[j].1) - target[i][j];
            s += target[i][j] * target[i][j] * e * e;
        }
    }
    s
}

/// Preconditioned gradient steps `t` in `steps`, with step size
/// `INITIAL_STEP / (1 + t / decay)`; stress is appended after each step.
fn descend(
    p: &mut [(f64, f64)],
    target: &[Vec<f64>],
    weight_sum: &[f64],
    steps: std::ops::Range<usize>,
    decay: f64,
    history: &mut Vec<f64>,
) {
    let n = p.len();
    let mut grad = vec![(0.0, 0.0); n];
    for t in steps {
        grad.iter_mut().for_each(|g| *g = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let w = target[i][j] * target[i][j];
                if w == 0.0 {
                    continue;
                }
                let (dx, dy) = (p[i].0 - p[j].0, p[i].1 - p[j].1);
                let len = dx.hypot(dy);
                if len < 1e-12 {
                    continue;
                }
                let c = 2.0 * w * (len - target[i][j]) / len;
                grad[i].0 += c * dx;
                grad[i].1 += c * dy;
                grad[j].0 -= c * dx;
                grad[j].1 -= c * dy;
            }
        }
        let step = INITIAL_STEP / (1.0 + t as f64 / decay);
        for i in 0..n {
            if weight_sum[i] > 0.0 {
                p[i].0 -= step * grad[i].0 / weight_sum[i];
                p[i].1 -= step * grad[i].1 / weight_sum[i];
            }
        }
        history.push(stress(p, target));
    }
}

/// Embeds `d` in the plane: `STARTS` seeded random starts each take the
/// first tenth of the iterations, and the one with the lowest stress runs
/// the rest. Same `seed` and `iters` give identical output.
pub fn embed_distances(
    ids: &[String],
    d: &[Vec<f64>],
    seed: u64,
    iters: usize,
) -> Result<MapLayout> {
    if ids.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            actual: ids.len(),
        });
    }
    validate(d)?;
    let n = d.len();
    let max = d.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let target: Vec<Vec<f64>> = d
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| if max > 0.0 { x / max } else { 0.0 })
                .collect()
        })
        .collect();
    let weight_sum: Vec<f64> = target
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>())
        .collect();

    let decay = (iters as f64 / 10.0).max(1.0);
    let burn_in = iters / 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<(f64, f64)>, Vec<f64>)> = None;
    for _ in 0..STARTS {
        let mut p: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut history = Vec::with_capacity(iters);
        descend(
            &mut p,
            &target,
            &weight_sum,
            0..burn_in,
            decay,
            &mut history,
        );
        let score = history
            .last()
            .copied()
            .unwrap_or_else(|| stress(&p, &target));
        let better = match &best {
            Some((q, h)) => score < h.last().copied().unwrap_or_else(|| stress(q, &target)),
            None => true,
        };
        if better {
            best = Some((p, history));
        }
    }
    let (mut p, mut history) = best.expect("at least one start");
    descend(
        &mut p,
        &target,
        &weight_sum,
        burn_in..iters,
        decay,
        &mut history,
    );

    let (cx, cy) = p.iter().fold((0.0, 0.0), |a, q| (a.0 + q.0, a.1 + q.1));
    let (cx, cy) = (cx / n.max(1) as f64, cy / n.max(1) as f64);
    p.iter_mut().for_each(|q| *q = (q.0 - cx, q.1 - cy));
    let rms = (p.iter().map(|q| q.0 * q.0 + q.1 * q.1).sum::<f64>() / n.max(1) as f64).sqrt();
    if rms > 0.0 {
        p.iter_mut().for_each(|q| *q = (q.0 / rms, q.1 / rms));
    }

    Ok(MapLayout {
        points: ids
            .iter()
            .zip(p)
            .map(|(id, (x, y))| MapPoint {
                id: id.clone(),
                x,
                y,
            })
            .collect(),
        styling: BTreeMap::new(),
        seed,
        iterations: iters,
        stress: history,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateRow {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub group: String,
}

pub fn coordinates_csv(layout: &MapLayout) -> Result<String> {
    let mut out = String::from("id,x,y,group\n");
    for p in &layout.points {
        let group = layout.group_of(&p.id);
        for field in [p.id.as_str(), group] {
            if field.contains([',', '\n', '\r']) {
                return Err(Error::param(format!(
                    "{field:?} cannot be written as a CSV field"
                )));
            }
        }
        writeln!(out, "{},{:?},{:?},{}", p.id, p.x, p.y, group).unwrap();
    }
    Ok(out)
}

pub fn write_coordinates(layout: &MapLayout, path: &Path) -> Result<()> {
    std::fs::write(path, coordinates_csv(layout)?)?;
    Ok(())
}

pub fn parse_coordinates(text: &str) -> Result<Vec<CoordinateRow>> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            if line.trim() != "id,x,y,group" {
                return Err(Error::parse(1, "expected header id,x,y,group"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                k + 1,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(k + 1, format!("bad coordinate {s:?}")))
        };
        rows.push(CoordinateRow {
            id: fields[0].to_string(),
            x: num(fields[1])?,
            y: num(fields[2])?,
            group: fields[3].to_string(),
        });
    }
    Ok(rows)
}

pub fn read_coordinates(path: &Path) -> Result<Vec<CoordinateRow>> {
    parse_coordinates(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn two_points() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let layout = embed_distances(&names(2), &d, 3, DEFAULT_ITERATIONS).unwrap();
        assert!((layout.normalized_distances()[0][1] - 1.0).abs() < 1e-3);
        // two points at unit RMS radius sit at distance 2
        assert!((layout.distance(0, 1) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn right_triangle() {
        let d = vec![
            vec![0.0, 3.0, 4.0],
            vec![3.0, 0.0, 5.0],
            vec![4.0, 5.0, 0.0],
        ];
        for seed in 0..5 {
            let layout = embed_distances(&names(3), &d, seed, DEFAULT_ITERATIONS).unwrap();
            let e = layout.normalized_distances();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let want = d[i][j] / 5.0;
                assert!((e[i][j] - want).abs() / want < 0.02, "seed {seed}: {e:?}");
            }
        }
    }

    #[test]
    fn deterministic_and_converging() {
        let d = vec![
            vec![0.0, 1.0, 2.0, 2.5],
            vec![1.0, 0.0, 1.5, 2.0],
            vec![2.0, 1.5, 0.0, 0.5],
            vec![2.5, 2.0, 0.5, 0.0],
        ];
        let a = embed_distances(&names(4), &d, 11, 500).unwrap();
        let b = embed_distances(&names(4), &d, 11, 500).unwrap();
        assert_eq!(a, b);
        let tail = &a.stress[450..];
        assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let rms = (a.points.iter().map(|p| p.x * p.x + p.y * p.y).sum::<f64>() / 4.0).sqrt();
        assert!((rms - 1.0).abs() < 1e-9);
        let cx: f64 = a.points.iter().map(|p| p.x).sum();
        assert!(cx.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let ids = names(2);
        assert!(embed_distances(&ids, &[vec![0.0, 1.0], vec![2.0, 0.0]], 0, 10).is_err());
        assert!(embed_distances(&ids, &[vec![0.0, -1.0], vec![-1.0, 0.0]], 0, 10).is_err());
        assert!(embed_distances(&ids, &[vec![1.0, 1.0], vec![1.0, 0.0]], 0, 10).is_err());
        assert!(embed_distances(&names(3), &[vec![0.0, 1.0], vec![1.0, 0.0]], 0, 10).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let d = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let ids = vec![
            "ID".to_string(),
            "mallows_0".to_string(),
            "ID-UN_a1of3".to_string(),
        ];
        let layout = embed_distances(&ids, &d, 0, 50)
            .unwrap()
            .with_inferred_styling();
        let text = coordinates_csv(&layout).unwrap();
        assert!(text.lines().all(|l| l.split(',').count() == 4));
        let rows = parse_coordinates(&text).unwrap();
        assert_eq!(rows.iter().map(|r| r.id.clone()).collect::<Vec<_>>(), ids);
        assert_eq!(rows[1].group, "mallows");
        assert_eq!(rows[2].group, "ID-UN");
        for (r, p) in rows.iter().zip(&layout.points) {
            assert_eq!((r.x, r.y), (p.x, p.y));
        }
        assert_eq!(layout.styling["ID"].marker, Marker::Corner);
        assert_eq!(layout.styling["ID-UN_a1of3"].marker, Marker::PathPoint);
        assert_eq!(layout.styling["mallows_0"].marker, Marker::Dot);
    }
}
