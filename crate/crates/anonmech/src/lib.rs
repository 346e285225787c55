//! Simulation and verification toolkit for anonymous auction mechanisms.
//!
//! The crate is organized around a small set of layers:
//!
//! - [`distributions`]: value priors (point masses, finite pmfs, uniform
//!   intervals), auction instances, and the scalar statistics everything
//!   else consumes (monopoly price, median, exceedance probability,
//!   ambiguity).
//! - [`mechanisms`]: executable auctions — the decreasing price mechanism
//!   (DPM) in its DSIC and non-DSIC forms, single price / VCG with
//!   reserves, non-anonymous posted prices, and the position-auction
//!   variants (scaled DPM, randomized-reserve top-item second price).
//! - [`pricing`]: the randomized DPM pricing constructions — per-index
//!   rates for 1-ambiguous instances, block rates with chain/drop
//!   probabilities for the general case, the harmonic reserve mixture,
//!   and the final mechanism mixtures.
//! - [`posterior`]: the optimal anonymous digital-goods auction built on
//!   matrix permanents, plus the exact counting formulas for the nested
//!   uniform instance family.
//! - [`simulate`]: seeded Monte Carlo revenue estimation, payer-tail
//!   statistics, exact revenue benchmarks, and approximation-ratio
//!   experiments.
//! - [`verify`]: exhaustive small-grid checking of DSIC, ex-post IR,
//!   anonymity, and monotonicity.
//! - [`instance`]: JSON instance files and the named instance generators
//!   used by the CLI.

pub mod cli;
pub mod distributions;
pub mod instance;
pub mod mechanisms;
pub mod posterior;
pub mod pricing;
pub mod rng;
pub mod simulate;
pub mod verify;

pub use cli::cli_main;

pub use distributions::{AuctionInstance, ValueDistribution};
pub use mechanisms::{BidProfile, Outcome, PricingScheme};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("instance is {found}-ambiguous but the mechanism requires ambiguity <= {max}")]
    AmbiguityTooHigh { found: usize, max: usize },
    #[error("matrix of size {0} exceeds the permanent limit of {1}")]
    MatrixTooLarge(usize, usize),
    #[error("observed values have zero likelihood under every bidder permutation")]
    InconsistentEvidence,
    #[error("grid enumeration needs {0} profiles, above the limit of {1}")]
    GridTooLarge(u128, u128),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("instance parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
