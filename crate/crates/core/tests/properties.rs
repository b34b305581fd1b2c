mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use election_compass::compass::{closed_form_distance, compass_matrix, CompassKind};
use election_compass::cultures::{relswaps, sample_ic};
use election_compass::election::Ballot;
use election_compass::matrix::{FrequencyMatrix, Rational};
use election_compass::metric::{emd, positionwise, positionwise_elections};
use election_compass::recovery::{election_from_position_matrix, round_frequency_matrix};
use election_compass::{Election, Ranking};

use common::*;

fn election_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = Election> {
    (1..=max_m).prop_flat_map(move |m| {
        prop::collection::vec(
            Just((0..m).collect::<Vec<usize>>()).prop_shuffle(),
            1..=max_n,
        )
        .prop_map(move |votes| {
            Election::from_rankings(
                m,
                votes
                    .into_iter()
                    .map(|v| Ranking::new(v).unwrap())
                    .collect(),
            )
            .unwrap()
        })
    })
}

fn same_m_elections(count: usize) -> impl Strategy<Value = Vec<Election>> {
    (1usize..=5).prop_flat_map(move |m| {
        prop::collection::vec(
            prop::collection::vec(Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), 1..=8),
            count,
        )
        .prop_map(move |es| {
            es.into_iter()
                .map(|votes| {
                    Election::from_rankings(
                        m,
                        votes
                            .into_iter()
                            .map(|v| Ranking::new(v).unwrap())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect()
        })
    })
}

/// Candidate `c` becomes `pi[c]`.
fn relabel(e: &Election, pi: &[usize]) -> Election {
    let votes = e
        .votes()
        .map(|v| Ranking::new(v.as_slice().iter().map(|&c| pi[c]).collect()).unwrap())
        .collect();
    Election::from_rankings(e.m(), votes).unwrap()
}

fn reversed_votes(e: &Election) -> Election {
    let mut votes: Vec<Ranking> = e.votes().cloned().collect();
    votes.reverse();
    Election::from_rankings(e.m(), votes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frequency_matrix_is_bistochastic(e in election_strategy(7, 12)) {
        let f = e.frequency_matrix();
        prop_assert!(f.is_bistochastic());
        for row in f.rows() {
            prop_assert!(row.iter().sum::<Rational>().is_one());
        }
        for c in 0..e.m() {
            prop_assert!(f.column(c).iter().sum::<Rational>().is_one());
        }
    }

    #[test]
    fn matrices_ignore_vote_order(e in election_strategy(6, 10)) {
        let r = reversed_votes(&e);
        prop_assert_eq!(e.position_matrix(), r.position_matrix());
        prop_assert_eq!(e.frequency_matrix(), r.frequency_matrix());
    }

    #[test]
    fn relabeling_permutes_columns(
        (e, pi) in election_strategy(6, 10).prop_flat_map(|e| {
            let m = e.m();
            (Just(e), Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let r = relabel(&e, &pi);
        let (p, q) = (e.position_matrix(), r.position_matrix());
        for pos in 0..e.m() {
            for c in 0..e.m() {
                prop_assert_eq!(p.get(pos, c), q.get(pos, pi[c]));
            }
        }
        prop_assert!(positionwise_elections(&e, &r).unwrap().value.is_zero());
    }

    #[test]
    fn borda_total(e in election_strategy(7, 12)) {
        let m = e.m() as u64;
        prop_assert_eq!(e.borda_scores().iter().sum::<u64>(), e.n() * m * (m - 1) / 2);
    }

    #[test]
    fn metric_axioms(es in same_m_elections(3)) {
        let f: Vec<FrequencyMatrix> = es.iter().map(Election::frequency_matrix).collect();
        let d = |a: usize, b: usize| positionwise(&f[a], &f[b]).unwrap().value;
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert!(d(0, 0).is_zero());
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        prop_assert!(d(0, 1) >= Rational::zero());
    }

    #[test]
    fn zero_distance_iff_columns_permuted(es in same_m_elections(2)) {
        let (x, y) = (es[0].frequency_matrix(), es[1].frequency_matrix());
        let m = x.m();
        let permuted = permutations(m)
            .into_iter()
            .any(|sigma| (0..m).all(|c| x.column(c) == y.column(sigma[c])));
        prop_assert_eq!(positionwise(&x, &y).unwrap().value.is_zero(), permuted);
    }

    #[test]
    fn invariant_under_relabeling_and_voter_order(
        (es, pi) in same_m_elections(2).prop_flat_map(|es| {
            let m = es[0].m();
            (Just(es), Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let base = positionwise_elections(&es[0], &es[1]).unwrap().value;
        let relabeled = positionwise_elections(&relabel(&es[0], &pi), &es[1]).unwrap().value;
        let other = positionwise_elections(&es[0], &relabel(&es[1], &pi)).unwrap().value;
        let reordered = positionwise_elections(&reversed_votes(&es[0]), &es[1]).unwrap().value;
        prop_assert_eq!(base, relabeled);
        prop_assert_eq!(base, other);
        prop_assert_eq!(base, reordered);
    }

    #[test]
    fn round_trip_through_position_matrix(e in election_strategy(6, 15)) {
        let pm = e.position_matrix();
        let back = election_from_position_matrix(&pm).unwrap();
        prop_assert_eq!(back.position_matrix(), pm);
        let m = e.m();
        prop_assert!(back.distinct_votes() <= m * m - m + 1);
    }
}

#[test]
fn emd_matches_transport_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for _ in 0..500 {
        let m = rng.random_range(1..=8);
        let denom = rng.random_range(1..=60i128);
        let mut draw = || {
            let mut counts = vec![0i128; m];
            for _ in 0..denom {
                counts[rng.random_range(0..m)] += 1;
            }
            counts
                .into_iter()
                .map(|c| Rational::new(c, denom))
                .collect::<Vec<_>>()
        };
        let (x, y) = (draw(), draw());
        assert_eq!(emd(&x, &y).unwrap(), transport_emd(&x, &y), "{x:?} {y:?}");
    }
}

#[test]
fn assignment_matches_brute_force_for_small_m() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..150 {
        let m = rng.random_range(1..=4);
        let x = random_bistochastic(m, &mut rng);
        let y = random_bistochastic(m, &mut rng);
        let record = positionwise(&x, &y).unwrap();
        assert_eq!(record.value, brute_positionwise(&x, &y));
        let via_sigma: Rational = (0..m)
            .map(|c| transport_emd(&x.column(c), &y.column(record.column_permutation[c])))
            .sum();
        assert_eq!(via_sigma, record.value);
    }
}

#[test]
fn rounding_holds_for_resampled_voter_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=30);
        let e = sample_ic(m, n, &mut rng).unwrap();
        let target = rng.random_range(1..=40u64);
        let x = e.frequency_matrix();
        let p = round_frequency_matrix(&x, target).unwrap();
        let tn = Rational::from_integer(target as i128);
        for i in 0..m {
            let row: u64 = (0..m).map(|j| p.get(i, j)).sum();
            let col: u64 = (0..m).map(|j| p.get(j, i)).sum();
            assert_eq!((row, col), (target, target));
            for j in 0..m {
                let diff = x.get(i, j) * tn - Rational::from_integer(p.get(i, j) as i128);
                assert!(diff <= Rational::one() && -diff <= Rational::one());
            }
        }
        let again = election_from_position_matrix(&p).unwrap();
        assert_eq!(again.n(), target);
    }
}

#[test]
fn closed_forms_hold_for_both_argument_orders() {
    for m in [4usize, 8, 12] {
        for (a, b) in CompassKind::PAIRS {
            let x = compass_matrix(a, m).unwrap().matrix;
            let y = compass_matrix(b, m).unwrap().matrix;
            let want = closed_form_distance(a, b, m).unwrap();
            assert_eq!(positionwise(&y, &x).unwrap().value, want);
            assert_eq!(closed_form_distance(b, a, m).unwrap(), want);
        }
    }
}

#[test]
fn path_points_split_distance_proportionally() {
    let m = 8;
    for (a, b) in CompassKind::PAIRS {
        let x = compass_matrix(a, m).unwrap().matrix;
        let y = compass_matrix(b, m).unwrap().matrix;
        let total = positionwise(&x, &y).unwrap().value;
        for k in [1i128, 3, 7] {
            let alpha = Rational::new(k, 8);
            let z = FrequencyMatrix::convex_combination(alpha, &x, &y).unwrap();
            assert_eq!(
                positionwise(&x, &z).unwrap().value,
                (Rational::one() - alpha) * total
            );
        }
    }
}

#[test]
fn relswaps_strictly_increasing() {
    for m in 3..=12 {
        let values: Vec<f64> = (0..=100)
            .map(|k| relswaps(m, k as f64 / 100.0).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]), "m={m}");
        assert_eq!(values[0], 0.0);
        assert!((values[100] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn ballots_with_counts_match_expanded_votes() {
    let r = |v: &[usize]| Ranking::new(v.to_vec()).unwrap();
    let grouped = Election::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![
            Ballot {
                ranking: r(&[2, 0, 1]),
                count: 3,
            },
            Ballot {
                ranking: r(&[0, 1, 2]),
                count: 2,
            },
        ],
    )
    .unwrap();
    let expanded = Election::from_rankings(
        3,
        vec![
            r(&[2, 0, 1]),
            r(&[0, 1, 2]),
            r(&[2, 0, 1]),
            r(&[0, 1, 2]),
            r(&[2, 0, 1]),
        ],
    )
    .unwrap();
    assert_eq!(grouped.position_matrix(), expanded.position_matrix());
    assert_eq!(grouped.borda_scores(), expanded.borda_scores());
}
