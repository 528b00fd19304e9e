//! Private information retrieval on path and cyclic storage graphs,
//! with per-server privacy-requirement sets.
//!
//! Each of `N` servers stores two of `K` replicated messages (one on the
//! path ends) and carries a *privacy-requirement set*: the message
//! indices whose retrieval must be indistinguishable from that server's
//! point of view. The crate constructs a retrieval scheme for every
//! supported privacy rule, runs it over a simulated multi-server
//! network, and proves at desk scale — by exhaustive enumeration and
//! exact linear algebra — that each scheme is private, decodable, and
//! achieves its closed-form rate.
//!
//! ```
//! use pirlab::audit::{audit_privacy, check_decodability, measure_rate};
//! use pirlab::algebra::FieldSpec;
//! use pirlab::model::{GraphKind, PrivacySetting, StorageGraph};
//! use pirlab::Rational;
//!
//! let graph = StorageGraph::build(GraphKind::Cycle, 5)?;
//! let setting = PrivacySetting::CyclicFirstNeighbor;
//!
//! assert!(audit_privacy(&setting, &graph)?.passed());
//! assert!(check_decodability(&setting, &graph, FieldSpec::GF2)?.passed());
//! assert_eq!(measure_rate(&setting, &graph)?.rate, Rational::new(2, 5));
//! # Ok::<(), pirlab::Error>(())
//! ```
//!
//! The guide under `book/` walks through the concepts chapter by
//! chapter; its code samples are embedded below as doc-tests, so the
//! book can never drift from the library.

pub mod algebra;
pub mod audit;
pub mod capacity;
pub mod cli;
mod error;
pub mod model;
pub mod netsim;
pub mod schemes;

pub use error::{Error, Result};

/// Exact rational arithmetic used for probabilities, rates, and bounds.
/// Desk-scale numerators and denominators fit comfortably in `i64`.
pub type Rational = num_rational::Ratio<i64>;

/// The guide's chapters, embedded so every code sample compiles and runs
/// under `cargo test --doc`.
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}

    #[doc = include_str!("../../../book/src/storage-and-privacy.md")]
    pub mod storage_and_privacy {}

    #[doc = include_str!("../../../book/src/queries-and-answers.md")]
    pub mod queries_and_answers {}

    #[doc = include_str!("../../../book/src/retrieval-schemes.md")]
    pub mod retrieval_schemes {}

    #[doc = include_str!("../../../book/src/auditing.md")]
    pub mod auditing {}

    #[doc = include_str!("../../../book/src/rates-and-capacities.md")]
    pub mod rates_and_capacities {}

    #[doc = include_str!("../../../book/src/network-simulation.md")]
    pub mod network_simulation {}

    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli_usage {}

    #[doc = include_str!("../../../book/src/open-ranges.md")]
    pub mod open_ranges {}
}
