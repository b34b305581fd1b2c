use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use election_compass::compass::full_compass;
use election_compass::cultures::single_peaked::is_single_peaked;
use election_compass::cultures::{sample_hypercube, Culture, CultureSpec};
use election_compass::embed::{embed_distances, read_coordinates, render_svg, write_coordinates};
use election_compass::metric::distance_matrix;
use election_compass::Ranking;

#[test]
fn samplers_respect_sizes_and_seed() {
    let cultures = [
        Culture::Ic,
        Culture::Urn { alpha: 0.1 },
        Culture::UrnGamma,
        Culture::Mallows { phi: 0.8 },
        Culture::MallowsNorm { relphi: 0.7 },
        Culture::Conitzer,
        Culture::Walsh,
        Culture::Hypercube { dim: 2 },
    ];
    for culture in cultures {
        for (m, n) in [(1, 1), (3, 10), (9, 40)] {
            let spec = CultureSpec {
                culture,
                m,
                n,
                seed: 17,
            };
            let e = spec.generate().unwrap();
            assert_eq!((e.m(), e.n() as usize), (m, n), "{culture}");
            assert!(e.frequency_matrix().is_bistochastic());
            assert_eq!(e, spec.generate().unwrap());
        }
    }
}

#[test]
fn one_dimensional_hypercube_is_single_peaked() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for m in 2..=8 {
        let e = sample_hypercube(m, 50, 1, &mut rng).unwrap();
        let order: Vec<usize> = e.metadata["axis"]
            .split_whitespace()
            .map(|s| s.parse().unwrap())
            .collect();
        let axis = Ranking::new(order).unwrap();
        assert!(e.votes().all(|v| is_single_peaked(v, &axis)));
    }
}

fn compass_layout() -> election_compass::embed::MapLayout {
    let entries = full_compass(4, 5).unwrap();
    let ids: Vec<String> = entries.iter().map(|e| e.label.clone()).collect();
    let mats: Vec<_> = entries.iter().map(|e| e.matrix.clone()).collect();
    let d: Vec<Vec<f64>> = distance_matrix(&mats)
        .unwrap()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| *x.numer() as f64 / *x.denom() as f64)
                .collect()
        })
        .collect();
    embed_distances(&ids, &d, 2, 400)
        .unwrap()
        .with_inferred_styling()
}

#[test]
fn compass_map_svg_structure() {
    let layout = compass_layout();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.svg");
    render_svg(&layout, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let class = |c: &str| {
        doc.descendants()
            .filter(|n| n.attribute("class") == Some(c))
            .collect::<Vec<_>>()
    };
    let labels: Vec<&str> = class("corner-label")
        .iter()
        .filter_map(|n| n.text())
        .collect();
    assert_eq!(labels, ["ID", "UN", "AN", "ST"]);
    assert_eq!(class("corner").len(), 4);
    let paths = class("path");
    assert_eq!(paths.len(), 6);
    for p in &paths {
        // every path runs corner to corner through at least one interior point
        assert!(p.attribute("points").unwrap().split(' ').count() >= 3);
    }
    assert_eq!(class("path-point").len(), layout.len() - 4);
    assert_eq!(class("legend-entry").len(), 6);
}

#[test]
fn coordinates_file_round_trip() {
    let layout = compass_layout();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coords.csv");
    write_coordinates(&layout, &path).unwrap();
    let rows = read_coordinates(&path).unwrap();
    assert_eq!(rows.len(), layout.len());
    for (row, p) in rows.iter().zip(&layout.points) {
        assert_eq!(row.id, p.id);
        assert_eq!((row.x, row.y), (p.x, p.y));
        assert_eq!(row.group, layout.group_of(&p.id));
    }
    write_coordinates(&layout, &dir.path().join("again.csv")).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(dir.path().join("again.csv")).unwrap()
    );
}

#[test]
fn stress_settles_at_the_end() {
    let layout = compass_layout();
    let tail = &layout.stress[layout.stress.len() * 9 / 10..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0]));
}
