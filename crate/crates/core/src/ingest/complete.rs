//! Turning partial, tied votes into complete strict rankings.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::election::{Ballot, Election, Ranking};
use crate::error::Result;

use super::preflib::{PartialProfile, PartialVote};

/// Resolves one voter's ballot into a strict prefix. A final group holding
/// every candidate not ranked earlier is the unranked tail and is dropped;
/// any other tie group is shuffled uniformly.
pub fn break_ties<R: Rng + ?Sized>(vote: &PartialVote, m: usize, rng: &mut R) -> Vec<usize> {
    let mut groups: &[Vec<usize>] = &vote.groups;
    if let Some(last) = groups.last() {
        if last.len() > 1 && vote.len() == m {
            groups = &groups[..groups.len() - 1];
        }
    }
    let mut prefix = Vec::with_capacity(m);
    for g in groups {
        let mut g = g.clone();
        g.shuffle(rng);
        prefix.extend(g);
    }
    prefix
}

/// Prefix tree over the original votes; `through` counts votes that rank
/// at least one more candidate below the node.
#[derive(Default)]
struct PrefixTree {
    children: BTreeMap<usize, (usize, u64)>,
}

struct Trie {
    nodes: Vec<PrefixTree>,
}

impl Trie {
    fn build(prefixes: &[Vec<usize>]) -> Self {
        let mut nodes = vec![PrefixTree::default()];
        for p in prefixes {
            let mut at = 0;
            for &c in p {
                let next = match nodes[at].children.get(&c) {
                    Some(&(idx, _)) => idx,
                    None => {
                        nodes.push(PrefixTree::default());
                        nodes.len() - 1
                    }
                };
                let entry = nodes[at].children.entry(c).or_insert((next, 0));
                entry.1 += 1;
                at = next;
            }
        }
        Trie { nodes }
    }

    fn find(&self, prefix: &[usize]) -> Option<usize> {
        let mut at = 0;
        for c in prefix {
            at = self.nodes[at].children.get(c)?.0;
        }
        Some(at)
    }
}

/// Completes every vote. Ties are broken first; then each vote `v` of
/// length `t` is extended by the `(t+1)`-st candidate of an original vote
/// drawn uniformly among those that rank at least `t+1` candidates and
/// start with `v`, or by a uniform unranked candidate when none exists.
pub fn complete_votes<R: Rng + ?Sized>(p: &PartialProfile, rng: &mut R) -> Result<Election> {
    let m = p.m();
    let mut prefixes: Vec<Vec<usize>> = Vec::new();
    for v in &p.votes {
        for _ in 0..v.count {
            prefixes.push(break_ties(v, m, rng));
        }
    }
    let trie = Trie::build(&prefixes);
    let mut ballots = Vec::with_capacity(prefixes.len());
    for prefix in &prefixes {
        let mut vote = prefix.clone();
        let mut node = trie.find(&vote);
        while vote.len() < m {
            let next = match node.map(|at| &trie.nodes[at].children) {
                Some(children) if !children.is_empty() => {
                    let total: u64 = children.values().map(|&(_, k)| k).sum();
                    let mut pick = rng.random_range(0..total);
                    let mut chosen = None;
                    for (&c, &(child, k)) in children {
                        if pick < k {
                            chosen = Some((c, child));
                            break;
                        }
                        pick -= k;
                    }
                    let (c, child) = chosen.expect("pick below total");
                    node = Some(child);
                    c
                }
                _ => {
                    node = None;
                    let unranked: Vec<usize> = (0..m).filter(|c| !vote.contains(c)).collect();
                    unranked[rng.random_range(0..unranked.len())]
                }
            };
            vote.push(next);
        }
        ballots.push(Ballot {
            ranking: Ranking::new(vote)?,
            count: 1,
        });
    }
    let mut e = Election::new(p.candidates.clone(), ballots)?;
    e.metadata = p.metadata.clone();
    Ok(e)
}
