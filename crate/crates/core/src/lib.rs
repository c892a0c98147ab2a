//! Diversity-driven selection among exploration strategies.
//!
//! Exploration strategies propose motor commands to a black-box environment.
//! Every effect the environment returns is scored by the area it adds to a
//! union-of-disks coverage set, and the [`adapt`] selector hands out trials
//! to strategies in proportion to the diversity they produced recently.
//!
//! The crate ships the pieces needed to reproduce the planar-arm experiments:
//!
//! * [`coverage`]: occupancy-grid coverage measure plus a Monte-Carlo oracle.
//! * [`environment`]: the environment contract and a 20-joint planar arm.
//! * [`strategies`]: shared observation store, motor babbling, goal babbling.
//! * [`adapt`]: windowed strategy diversity and the selection rule.
//! * [`harness`]: configuration, episodes, sweeps and report emission.

pub mod adapt;
pub mod coverage;
pub mod environment;
pub mod error;
pub mod harness;
pub mod strategies;

pub use error::{Error, Result};

/// Random stream type used throughout the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;
