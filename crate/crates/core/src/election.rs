//! Elections over `m` candidates with complete strict rankings.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{FrequencyMatrix, PositionMatrix};

/// A complete strict ranking: `order[pos]` is the candidate placed at
/// position `pos` (0 = most preferred).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking(Vec<usize>);

impl Ranking {
    /// Builds a ranking, checking that `order` is a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m || seen[c] {
                return Err(Error::InvalidElection(format!(
                    "ranking {order:?} is not a permutation of 0..{m}"
                )));
            }
            seen[c] = true;
        }
        Ok(Ranking(order))
    }

    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(Ranking::new(order.clone()).is_ok());
        Ranking(order)
    }

    pub fn identity(m: usize) -> Self {
        Ranking((0..m).collect())
    }

    pub fn reversed(&self) -> Self {
        Ranking(self.0.iter().rev().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// `positions()[c]` is the position of candidate `c`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (p, &c) in self.0.iter().enumerate() {
            pos[c] = p;
        }
        pos
    }

    /// Number of candidate pairs ordered differently by `self` and `other`.
    pub fn swap_distance(&self, other: &Ranking) -> usize {
        let pos = other.positions();
        let mapped: Vec<usize> = self.0.iter().map(|&c| pos[c]).collect();
        let mut inv = 0;
        for i in 0..mapped.len() {
            for j in i + 1..mapped.len() {
                if mapped[i] > mapped[j] {
                    inv += 1;
                }
            }
        }
        inv
    }
}

/// A ranking together with the number of voters that cast it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ballot {
    pub ranking: Ranking,
    pub count: u64,
}

/// An election: candidate names plus a multiset of complete strict rankings.
///
/// `k` copies of a ranking stored as one ballot behave exactly as `k`
/// separate ballots in every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<String>,
    ballots: Vec<Ballot>,
    /// Free-form provenance (culture, parameters, drawn values).
    pub metadata: BTreeMap<String, String>,
}

impl Election {
    pub fn new(candidates: Vec<String>, ballots: Vec<Ballot>) -> Result<Self> {
        let m = candidates.len();
        if m == 0 {
            return Err(Error::InvalidElection("no candidates".into()));
        }
        let mut n = 0u64;
        for b in &ballots {
            if b.ranking.len() != m {
                return Err(Error::InvalidElection(format!(
                    "ranking of length {} in an election with {m} candidates",
                    b.ranking.len()
                )));
            }
            n += b.count;
        }
        if n == 0 {
            return Err(Error::InvalidElection("no voters".into()));
        }
        let ballots = ballots.into_iter().filter(|b| b.count > 0).collect();
        Ok(Election {
            candidates,
            ballots,
            metadata: BTreeMap::new(),
        })
    }

    /// Election with candidates named `c0, c1, ...` and one ballot per ranking.
    pub fn from_rankings(m: usize, rankings: Vec<Ranking>) -> Result<Self> {
        let ballots = rankings
            .into_iter()
            .map(|ranking| Ballot { ranking, count: 1 })
            .collect();
        Election::new(default_names(m), ballots)
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Total number of voters, counting multiplicities.
    pub fn n(&self) -> u64 {
        self.ballots.iter().map(|b| b.count).sum()
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    /// Every vote, with multiplicities expanded.
    pub fn votes(&self) -> impl Iterator<Item = &Ranking> + '_ {
        self.ballots
            .iter()
            .flat_map(|b| std::iter::repeat_n(&b.ranking, b.count as usize))
    }

    /// Number of distinct rankings.
    pub fn distinct_votes(&self) -> usize {
        let mut rs: Vec<&Ranking> = self.ballots.iter().map(|b| &b.ranking).collect();
        rs.sort();
        rs.dedup();
        rs.len()
    }

    /// Merges identical rankings into one ballot, ordered by first appearance.
    pub fn compressed(&self) -> Election {
        let mut index: BTreeMap<&Ranking, usize> = BTreeMap::new();
        let mut ballots: Vec<Ballot> = Vec::new();
        for b in &self.ballots {
            match index.get(&b.ranking) {
                Some(&i) => ballots[i].count += b.count,
                None => {
                    index.insert(&b.ranking, ballots.len());
                    ballots.push(b.clone());
                }
            }
        }
        Election {
            candidates: self.candidates.clone(),
            ballots,
            metadata: self.metadata.clone(),
        }
    }

    /// Entry `(i, j)` counts voters ranking candidate `j` at position `i`.
    pub fn position_matrix(&self) -> PositionMatrix {
        let m = self.m();
        let mut entries = vec![0u64; m * m];
        for b in &self.ballots {
            for (pos, &c) in b.ranking.as_slice().iter().enumerate() {
                entries[pos * m + c] += b.count;
            }
        }
        PositionMatrix::from_parts_unchecked(m, self.n(), entries)
    }

    pub fn frequency_matrix(&self) -> FrequencyMatrix {
        self.position_matrix().to_frequency()
    }

    /// Borda scores with scoring vector `(m-1, m-2, ..., 0)`, indexed by candidate.
    pub fn borda_scores(&self) -> Vec<u64> {
        let m = self.m();
        let mut scores = vec![0u64; m];
        for b in &self.ballots {
            for (pos, &c) in b.ranking.as_slice().iter().enumerate() {
                scores[c] += (m - 1 - pos) as u64 * b.count;
            }
        }
        scores
    }

    /// Keeps only the candidates in `keep` (preserving their original
    /// relative order and names), restricting each vote accordingly.
    pub fn restrict_to_candidates(&self, keep: &[usize]) -> Result<Election> {
        let m = self.m();
        let mut kept = vec![false; m];
        for &c in keep {
            if c >= m {
                return Err(Error::param(format!("candidate {c} out of range 0..{m}")));
            }
            kept[c] = true;
        }
        let mut new_index = vec![usize::MAX; m];
        let mut names = Vec::new();
        for c in 0..m {
            if kept[c] {
                new_index[c] = names.len();
                names.push(self.candidates[c].clone());
            }
        }
        if names.is_empty() {
            return Err(Error::param("cannot restrict to an empty candidate set"));
        }
        let ballots = self
            .ballots
            .iter()
            .map(|b| Ballot {
                ranking: Ranking::from_vec_unchecked(
                    b.ranking
                        .as_slice()
                        .iter()
                        .filter(|&&c| kept[c])
                        .map(|&c| new_index[c])
                        .collect(),
                ),
                count: b.count,
            })
            .collect();
        let mut e = Election::new(names, ballots)?;
        e.metadata = self.metadata.clone();
        Ok(e)
    }
}

pub(crate) fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|c| format!("c{c}")).collect()
}
