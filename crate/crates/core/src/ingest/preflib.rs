//! Legacy PrefLib text layout (soc / soi / toc).
//!
//! ```text
//! 3
//! 1,Alice
//! 2,Bob
//! 3,Carol
//! 6,6,2
//! 4,1,2,3
//! 2,3,{1,2}
//! ```
//! Line 1 is the candidate count, then one `id,name` line per candidate,
//! then `voters,sum_of_counts,distinct_orders`, then `count,c1,c2,...`
//! with tied candidates grouped in braces. Lines starting with `#` carry
//! `key: value` metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::election::{Ballot, Election, Ranking};
use crate::error::{Error, Result};

/// A vote as a sequence of indifference groups, best first. Candidates not
/// listed are ranked below every listed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialVote {
    pub groups: Vec<Vec<usize>>,
    pub count: u64,
}

impl PartialVote {
    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_ties(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }

    pub fn contains(&self, c: usize) -> bool {
        self.groups.iter().any(|g| g.contains(&c))
    }
}

/// Preference data with possibly partial and tied votes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PartialProfile {
    pub candidates: Vec<String>,
    pub votes: Vec<PartialVote>,
    pub metadata: BTreeMap<String, String>,
}

impl PartialProfile {
    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn n(&self) -> u64 {
        self.votes.iter().map(|v| v.count).sum()
    }

    pub fn is_strict_complete(&self) -> bool {
        let m = self.m();
        self.votes.iter().all(|v| !v.has_ties() && v.len() == m)
    }

    /// Converts a strict complete profile into an election.
    pub fn to_election(&self) -> Result<Election> {
        if !self.is_strict_complete() {
            return Err(Error::InvalidElection(
                "profile has partial or tied votes".into(),
            ));
        }
        let ballots = self
            .votes
            .iter()
            .map(|v| {
                Ok(Ballot {
                    ranking: Ranking::new(v.groups.iter().map(|g| g[0]).collect())?,
                    count: v.count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut e = Election::new(self.candidates.clone(), ballots)?;
        e.metadata = self.metadata.clone();
        Ok(e)
    }

    pub fn from_election(e: &Election) -> Self {
        PartialProfile {
            candidates: e.candidates().to_vec(),
            votes: e
                .ballots()
                .iter()
                .map(|b| PartialVote {
                    groups: b.ranking.as_slice().iter().map(|&c| vec![c]).collect(),
                    count: b.count,
                })
                .collect(),
            metadata: e.metadata.clone(),
        }
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}: {tok:?}")))
}

pub fn parse_preflib(text: &str) -> Result<PartialProfile> {
    let mut metadata = BTreeMap::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once(':') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if !line.is_empty() {
            lines.push((i + 1, line));
        }
    }
    let mut it = lines.into_iter();
    let (lno, first) = it.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let m = parse_u64(first, lno, "candidate count")? as usize;
    if m == 0 {
        return Err(Error::parse(lno, "candidate count must be positive"));
    }

    let mut id_to_index = BTreeMap::new();
    let mut candidates = Vec::with_capacity(m);
    for _ in 0..m {
        let (lno, line) = it
            .next()
            .ok_or_else(|| Error::parse(lno, "missing candidate lines"))?;
        let (id, name) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(lno, format!("expected `id,name`, got {line:?}")))?;
        let id = parse_u64(id, lno, "candidate id")?;
        if id_to_index.insert(id, candidates.len()).is_some() {
            return Err(Error::parse(lno, format!("duplicate candidate id {id}")));
        }
        candidates.push(name.trim().to_string());
    }

    let (hno, header) = it
        .next()
        .ok_or_else(|| Error::parse(lno, "missing voter count line"))?;
    let fields = split_fields(header);
    if fields.len() != 3 {
        return Err(Error::parse(
            hno,
            "expected `voters,sum_of_counts,distinct_orders`",
        ));
    }
    let total = parse_u64(fields[0], hno, "voter count")?;
    let sum_counts = parse_u64(fields[1], hno, "sum of counts")?;
    let distinct = parse_u64(fields[2], hno, "distinct order count")?;

    let mut votes = Vec::new();
    for (lno, line) in it {
        votes.push(parse_vote_line(line, lno, &id_to_index)?);
    }
    if votes.len() as u64 != distinct {
        return Err(Error::parse(
            hno,
            format!("header announces {distinct} orders, found {}", votes.len()),
        ));
    }
    let counted: u64 = votes.iter().map(|v| v.count).sum();
    if counted != sum_counts || total != sum_counts {
        return Err(Error::parse(
            hno,
            format!("header counts {total}/{sum_counts} disagree with the votes' total {counted}"),
        ));
    }
    Ok(PartialProfile {
        candidates,
        votes,
        metadata,
    })
}

fn parse_vote_line(line: &str, lno: usize, ids: &BTreeMap<u64, usize>) -> Result<PartialVote> {
    let (count, rest) = match line.split_once(',') {
        Some((c, r)) => (c, r),
        None => (line, ""),
    };
    let count = parse_u64(count, lno, "vote count")?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; ids.len()];
    let mut lookup = |tok: &str| -> Result<usize> {
        let id = parse_u64(tok, lno, "candidate id")?;
        let &c = ids
            .get(&id)
            .ok_or_else(|| Error::parse(lno, format!("unknown candidate id {id}")))?;
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::parse(lno, format!("candidate {id} appears twice")));
        }
        Ok(c)
    };
    let mut rest = rest.trim();
    while !rest.is_empty() {
        if let Some(inner) = rest.strip_prefix('{') {
            let close = inner
                .find('}')
                .ok_or_else(|| Error::parse(lno, "unterminated tie group"))?;
            let group = inner[..close]
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(&mut lookup)
                .collect::<Result<Vec<_>>>()?;
            if !group.is_empty() {
                groups.push(group);
            }
            rest = inner[close + 1..].trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            let tok = rest[..end].trim();
            if tok.is_empty() {
                return Err(Error::parse(lno, "empty field in vote"));
            }
            groups.push(vec![lookup(tok)?]);
            rest = &rest[end..];
        }
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err(Error::parse(lno, "trailing comma in vote"));
            }
        } else if !rest.is_empty() {
            return Err(Error::parse(lno, format!("unexpected text {rest:?}")));
        }
    }
    Ok(PartialVote { groups, count })
}

pub fn serialize_preflib(p: &PartialProfile) -> String {
    let mut s = String::new();
    for (k, v) in &p.metadata {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let _ = writeln!(s, "{}", p.m());
    for (i, name) in p.candidates.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, name);
    }
    let n = p.n();
    let _ = writeln!(s, "{n},{n},{}", p.votes.len());
    for v in &p.votes {
        let mut fields = vec![v.count.to_string()];
        for g in &v.groups {
            if g.len() == 1 {
                fields.push((g[0] + 1).to_string());
            } else {
                let ids: Vec<String> = g.iter().map(|c| (c + 1).to_string()).collect();
                fields.push(format!("{{{}}}", ids.join(",")));
            }
        }
        let _ = writeln!(s, "{}", fields.join(","));
    }
    s
}

/// Strict complete layout of an election, metadata in `#` comments.
/// Identical rankings share one line, in order of first appearance.
pub fn serialize_election(e: &Election) -> String {
    serialize_preflib(&PartialProfile::from_election(&e.compressed()))
}

pub fn read_preflib(path: &Path) -> Result<PartialProfile> {
    parse_preflib(&std::fs::read_to_string(path)?)
}

pub fn read_election(path: &Path) -> Result<Election> {
    read_preflib(path)?.to_election()
}

pub fn write_election(e: &Election, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_election(e))?;
    Ok(())
}
