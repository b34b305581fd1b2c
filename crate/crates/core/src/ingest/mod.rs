//! Preference-data ingestion: parsing, coverage pruning, vote completion,
//! Borda truncation, and fixed-size resampling.

pub mod complete;
pub mod preflib;
pub mod prune;

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use complete::complete_votes;
pub use preflib::{
    parse_preflib, read_election, read_preflib, serialize_election, serialize_preflib,
    write_election, PartialProfile, PartialVote,
};
pub use prune::{prune_coverage, PruneReport};

use crate::election::{Ballot, Election};
use crate::error::{Error, Result};
use crate::matrix::Rational;

/// Keeps the `k` candidates with the highest Borda score (ties to the lower index).
pub fn select_top_k(e: &Election, k: usize) -> Result<Election> {
    if e.m() < k {
        return Err(Error::param(format!(
            "cannot keep {k} candidates of an election with {}",
            e.m()
        )));
    }
    let scores = e.borda_scores();
    let mut order: Vec<usize> = (0..e.m()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    e.restrict_to_candidates(&order)
}

/// Draws `samples` elections: each picks a source uniformly, then
/// `votes_per_sample` votes from it uniformly with replacement.
pub fn sample_dataset<R: Rng + ?Sized>(
    elections: &[Election],
    samples: usize,
    votes_per_sample: usize,
    rng: &mut R,
) -> Result<Vec<(usize, Election)>> {
    if elections.is_empty() {
        return Err(Error::param("no elections to sample from"));
    }
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let src = rng.random_range(0..elections.len());
        let e = &elections[src];
        let n = e.n();
        let mut ballots = Vec::with_capacity(votes_per_sample);
        for _ in 0..votes_per_sample {
            let mut pick = rng.random_range(0..n);
            let b = e
                .ballots()
                .iter()
                .find(|b| {
                    if pick < b.count {
                        true
                    } else {
                        pick -= b.count;
                        false
                    }
                })
                .expect("pick below n");
            ballots.push(Ballot {
                ranking: b.ranking.clone(),
                count: 1,
            });
        }
        let mut sampled = Election::new(e.candidates().to_vec(), ballots)?;
        sampled.metadata = e.metadata.clone();
        out.push((src, sampled));
    }
    Ok(out)
}

/// Named preprocessing settings for known datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Custom,
    Irish,
    Glasgow,
    Aspen,
    Ers,
    FigureSkating,
    SpeedSkating,
    Tdf,
    Gdi,
    TShirt,
    Sushi,
    Cities,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "custom" => Preset::Custom,
            "irish" => Preset::Irish,
            "glasgow" => Preset::Glasgow,
            "aspen" => Preset::Aspen,
            "ers" => Preset::Ers,
            "figure-skating" => Preset::FigureSkating,
            "speed-skating" => Preset::SpeedSkating,
            "tdf" => Preset::Tdf,
            "gdi" => Preset::Gdi,
            "tshirt" | "t-shirt" => Preset::TShirt,
            "sushi" => Preset::Sushi,
            "cities" => Preset::Cities,
            _ => return Err(Error::param(format!("unknown preset {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Coverage pruning threshold; `None` skips pruning.
    pub prune_threshold: Option<Rational>,
    /// Profiles with fewer candidates (after pruning) are dropped.
    pub min_candidates: usize,
    pub top_k: usize,
    pub samples: usize,
    pub votes_per_sample: usize,
    pub min_voters: Option<u64>,
    pub max_candidates: Option<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            prune_threshold: None,
            min_candidates: 10,
            top_k: 10,
            samples: 15,
            votes_per_sample: 100,
            min_voters: None,
            max_candidates: None,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn preset(preset: Preset) -> Self {
        let seventy = Some(Rational::new(7, 10));
        let base = PipelineConfig::default();
        match preset {
            Preset::Ers => PipelineConfig {
                min_voters: Some(500),
                ..base
            },
            Preset::SpeedSkating => PipelineConfig {
                prune_threshold: seventy,
                min_voters: Some(80),
                ..base
            },
            Preset::Tdf => PipelineConfig {
                prune_threshold: seventy,
                min_voters: Some(20),
                max_candidates: Some(75),
                ..base
            },
            Preset::Gdi => PipelineConfig {
                prune_threshold: seventy,
                ..base
            },
            Preset::FigureSkating => PipelineConfig {
                min_voters: Some(9),
                ..base
            },
            Preset::Custom
            | Preset::Irish
            | Preset::Glasgow
            | Preset::Aspen
            | Preset::TShirt
            | Preset::Sushi
            | Preset::Cities => base,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.prune_threshold {
            if t <= Rational::from_integer(0) || t > Rational::from_integer(1) {
                return Err(Error::param(format!(
                    "coverage threshold {t} outside (0, 1]"
                )));
            }
        }
        if self.top_k > self.min_candidates {
            return Err(Error::param(
                "top-k may not exceed the minimum candidate count",
            ));
        }
        if self.top_k == 0 || self.votes_per_sample == 0 {
            return Err(Error::param("top-k and votes per sample must be positive"));
        }
        Ok(())
    }
}

/// What happened to one input profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileReport {
    pub source: String,
    pub pruned: PruneReport,
    /// Why the profile was dropped, if it was.
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub reports: Vec<ProfileReport>,
    /// Completed, truncated profiles with the name of their source.
    pub intermediate: Vec<(String, Election)>,
    /// Resampled elections with the name of their source.
    pub samples: Vec<(String, Election)>,
}

/// Runs pruning, filtering, completion, and Borda truncation on every
/// profile, then resamples the surviving ones. Profile `i` completes with
/// stream `i + 1` of the seeded generator and resampling uses stream 0.
pub fn run_pipeline(
    profiles: &[(String, PartialProfile)],
    config: &PipelineConfig,
) -> Result<PipelineOutput> {
    config.validate()?;
    let mut reports = Vec::new();
    let mut intermediate = Vec::new();
    for (i, (source, profile)) in profiles.iter().enumerate() {
        let (profile, pruned) = match config.prune_threshold {
            Some(t) => prune_coverage(profile, t),
            None => (profile.clone(), PruneReport::default()),
        };
        let skipped = if profile.m() < config.min_candidates {
            Some(format!(
                "{} candidates, need {}",
                profile.m(),
                config.min_candidates
            ))
        } else if config.max_candidates.is_some_and(|k| profile.m() > k) {
            Some(format!("{} candidates exceed the maximum", profile.m()))
        } else if profile.n() == 0 {
            Some("no voters".to_string())
        } else if config.min_voters.is_some_and(|k| profile.n() < k) {
            Some(format!("{} voters below the minimum", profile.n()))
        } else {
            None
        };
        if skipped.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64 + 1);
            let complete = complete_votes(&profile, &mut rng)?;
            intermediate.push((source.clone(), select_top_k(&complete, config.top_k)?));
        }
        reports.push(ProfileReport {
            source: source.clone(),
            pruned,
            skipped,
        });
    }
    let samples = if intermediate.is_empty() {
        Vec::new()
    } else {
        let elections: Vec<Election> = intermediate.iter().map(|(_, e)| e.clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        sample_dataset(
            &elections,
            config.samples,
            config.votes_per_sample,
            &mut rng,
        )?
        .into_iter()
        .map(|(src, e)| (intermediate[src].0.clone(), e))
        .collect()
    };
    Ok(PipelineOutput {
        reports,
        intermediate,
        samples,
    })
}
