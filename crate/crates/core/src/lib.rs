//! Maps of elections with a compass.
//!
//! Elections and their position/frequency matrices, the positionwise
//! distance, reconstructing elections from matrices, the four compass
//! matrices with their connecting paths, statistical cultures (including
//! normalized Mallows), preference-data preprocessing, planar embeddings
//! of distance matrices, and fitting the normalized Mallows parameter to a
//! dataset.

pub mod compass;
pub mod cultures;
pub mod election;
pub mod embed;
pub mod error;
pub mod fit;
pub mod ingest;
pub mod matrix;
pub mod metric;
pub mod recovery;

pub use election::{Ballot, Election, Ranking};
pub use error::{Error, Result};
pub use matrix::{FrequencyMatrix, MatrixFile, PositionMatrix, Rational};
pub use metric::{positionwise, positionwise_elections, DistanceRecord};
