//! Statistical cultures for sampling elections.
//!
//! Every sampler draws from an explicit random stream; [`CultureSpec`]
//! seeds a ChaCha8 stream so that a seed fully determines the election.

pub mod hypercube;
pub mod mallows;
pub mod single_peaked;
pub mod urn;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use hypercube::{rank_by_proximity, sample_hypercube};
pub use mallows::{
    expected_swaps, mahonian_table, relphi_to_phi, relswaps, sample_mallows, sample_mallows_norm,
    MahonianTable, MallowsNormalizer,
};
pub use single_peaked::{is_single_peaked, sample_conitzer, sample_walsh};
pub use urn::{sample_ic, sample_urn, sample_urn_gamma};

use crate::election::Election;
use crate::error::{Error, Result};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Culture {
    Ic,
    Urn { alpha: f64 },
    UrnGamma,
    Mallows { phi: f64 },
    MallowsNorm { relphi: f64 },
    Conitzer,
    Walsh,
    Hypercube { dim: usize },
}

impl Culture {
    pub fn name(&self) -> &'static str {
        match self {
            Culture::Ic => "ic",
            Culture::Urn { .. } => "urn",
            Culture::UrnGamma => "urn-gamma",
            Culture::Mallows { .. } => "mallows",
            Culture::MallowsNorm { .. } => "mallows-norm",
            Culture::Conitzer => "conitzer",
            Culture::Walsh => "walsh",
            Culture::Hypercube { .. } => "hypercube",
        }
    }

    pub fn sample<R: rand::Rng>(&self, m: usize, n: usize, rng: &mut R) -> Result<Election> {
        match *self {
            Culture::Ic => sample_ic(m, n, rng),
            Culture::Urn { alpha } => sample_urn(m, n, alpha, rng),
            Culture::UrnGamma => sample_urn_gamma(m, n, rng),
            Culture::Mallows { phi } => sample_mallows(m, n, phi, None, rng),
            Culture::MallowsNorm { relphi } => sample_mallows_norm(m, n, relphi, rng),
            Culture::Conitzer => sample_conitzer(m, n, rng),
            Culture::Walsh => sample_walsh(m, n, rng),
            Culture::Hypercube { dim } => sample_hypercube(m, n, dim, rng),
        }
    }
}

impl fmt::Display for Culture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Culture::Urn { alpha } => write!(f, "urn(alpha={alpha})"),
            Culture::Mallows { phi } => write!(f, "mallows(phi={phi})"),
            Culture::MallowsNorm { relphi } => write!(f, "mallows-norm(relphi={relphi})"),
            Culture::Hypercube { dim } => write!(f, "hypercube(dim={dim})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A culture with its election size and seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CultureSpec {
    pub culture: Culture,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

impl CultureSpec {
    pub fn generate(&self) -> Result<Election> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::param("elections need m >= 1 and n >= 1"));
        }
        let mut rng = rng_from_seed(self.seed);
        let e = self.culture.sample(self.m, self.n, &mut rng)?;
        Ok(e.with_metadata("culture", self.culture.name())
            .with_metadata("seed", self.seed))
    }
}
