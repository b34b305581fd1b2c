//! Coverage pruning: drop candidates and votes until every candidate
//! appears in at least a `threshold` fraction of the votes and every vote
//! lists at least a `threshold` fraction of the candidates.

use std::cmp::Ordering;

use crate::matrix::Rational;

use super::preflib::PartialProfile;

/// What pruning removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub removed_candidates: Vec<String>,
    /// Individual voters removed (multiplicities counted).
    pub removed_votes: u64,
}

#[derive(Clone, Copy, Debug)]
enum Victim {
    Candidate(usize),
    Vote(usize),
}

/// Removes the worst-covered candidate or vote until both coverage
/// conditions hold. Lowest coverage goes first; ties go to the lower index
/// and to candidates before votes. Votes with multiplicity lose one copy at
/// a time. The result may be empty.
pub fn prune_coverage(p: &PartialProfile, threshold: Rational) -> (PartialProfile, PruneReport) {
    let mut p = p.clone();
    let mut report = PruneReport::default();
    loop {
        let m = p.m();
        let n = p.n();
        if m == 0 || n == 0 {
            break;
        }
        let mut appearances = vec![0u64; m];
        for v in &p.votes {
            for g in &v.groups {
                for &c in g {
                    appearances[c] += v.count;
                }
            }
        }
        let mut worst: Option<(Rational, Victim)> = None;
        let mut consider = |cov: Rational, victim: Victim| {
            if cov >= threshold {
                return;
            }
            // strict comparison keeps the earlier (candidate, lower index) entry on ties
            if worst.is_none_or(|(w, _)| cov.cmp(&w) == Ordering::Less) {
                worst = Some((cov, victim));
            }
        };
        for (c, &a) in appearances.iter().enumerate() {
            consider(Rational::new(a as i128, n as i128), Victim::Candidate(c));
        }
        for (i, v) in p.votes.iter().enumerate() {
            consider(Rational::new(v.len() as i128, m as i128), Victim::Vote(i));
        }
        match worst {
            None => break,
            Some((_, Victim::Candidate(c))) => {
                report.removed_candidates.push(p.candidates[c].clone());
                remove_candidate(&mut p, c);
            }
            Some((_, Victim::Vote(i))) => {
                report.removed_votes += 1;
                p.votes[i].count -= 1;
                if p.votes[i].count == 0 {
                    p.votes.remove(i);
                }
            }
        }
    }
    (p, report)
}

fn remove_candidate(p: &mut PartialProfile, c: usize) {
    p.candidates.remove(c);
    for v in &mut p.votes {
        for g in &mut v.groups {
            g.retain(|&x| x != c);
            for x in g.iter_mut() {
                if *x > c {
                    *x -= 1;
                }
            }
        }
        v.groups.retain(|g| !g.is_empty());
    }
}
