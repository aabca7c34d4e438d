//! Distance analysis for classical and quantum stabilizer turbo-style codes.
//!
//! The crate models error propagation through encoders as linear maps over
//! GF(2) acting on words of error letters. On top of that sit:
//!
//! - block and seed (memory-carrying) encoders with their truncated decoders,
//! - convolutional composition with exact minimum-weight search over
//!   undetected stabilizer choices,
//! - a finite-graph classifier for memory behaviour (recursive / systematic /
//!   totally recursive verdicts and the speed of a seed),
//! - exact weight spectra and every counting bound used in the distance
//!   analysis, in arbitrary-precision arithmetic,
//! - turbo composition (outer blockwise encoder, random interleaver, inner
//!   convolutional encoder) with exact distances and Monte Carlo experiments
//!   over random interleavers.
//!
//! The `turbolab` binary exposes all of it as subcommands; `experiments`
//! holds the reproducible run orchestration.

// dynamic programs here walk several parallel arrays by state index
#![allow(clippy::needless_range_loop)]

pub mod alphabet;
pub mod bounds;
pub mod classify;
pub mod convolutional;
pub mod encoders;
pub mod experiments;
pub mod gf2;
pub mod precise;
pub mod spectra;
pub mod specfile;
pub mod turbo;

pub use alphabet::{automorphism_group, LetterAutomorphism, LetterSpace, Role, Word};
pub use encoders::{BlockEncoder, Distance, DistancePair, SeedMorphism};

/// Resource guards for enumerations and dynamic programs. The defaults match
/// desk-scale experiments; anything larger fails loudly instead of silently
/// subsampling.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct Budgets {
    /// Cap on brute-force input enumerations (distances, turbo search).
    pub max_enumeration: u64,
    /// Cap on memory-state bits for dynamic programs over 2^(b*m) states.
    pub max_state_bits: u32,
    /// Cap on undetected stabilizer choices per step.
    pub max_z_choices: u64,
    /// Cap on (memory, information) tuples visited by a spectrum sweep.
    pub max_spectrum_inputs: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_enumeration: 1 << 24,
            max_state_bits: 20,
            max_z_choices: 1 << 12,
            max_spectrum_inputs: 1 << 24,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not invertible: not an isomorphism")]
    NotInvertible,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("letter spaces do not match")]
    SpaceMismatch,
    #[error("{0}")]
    MissingRoles(String),
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("hypotheses not satisfied: {0}")]
    Hypotheses(String),
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded { what: String, needed: u64, limit: u64 },
    #[error("speed is undefined: every memory state admits a finite continuation")]
    EtaUndefined,
    #[error("length {n} is not eligible: {n}*{n_out} - {m_in} is not a positive multiple of {k_in}")]
    Ineligible {
        n: usize,
        n_out: usize,
        k_in: usize,
        m_in: usize,
    },
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
