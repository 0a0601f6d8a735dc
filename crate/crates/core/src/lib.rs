//! Use Case Points sizing.
//!
//! Three ways to size a project from its use case model:
//!
//! - [`karner`]: the classical three-band weights, technical and
//!   environmental factors, and effort rates.
//! - [`fuzzy`]: ten graduated use-case weights from a small fuzzy system.
//! - [`mlp`]: a trained 13-20-1 perceptron mapping the use-case/actor
//!   histogram to UUCP.
//!
//! [`metrics`] compares any of them against actual sizes, [`corpus`] reads
//! and writes project files, and [`report`] renders tables and CSV.
//!
//! ```
//! use ucp_core::karner::{self, RatePolicy};
//! use ucp_core::model::{ActorKind, ActorSpec, ProjectSpec, TransactionPolicy, UseCaseSpec};
//!
//! let project = ProjectSpec::new(
//!     "tiny",
//!     vec![UseCaseSpec::direct("log in", 2)],
//!     vec![ActorSpec::new("user", ActorKind::Simple)],
//! );
//! let est = karner::estimate(&project, TransactionPolicy::FULL, RatePolicy::Schneider)?;
//! assert_eq!(est.uucp, 6.0);
//! assert!((est.tf - 1.02).abs() < 1e-12);
//! assert!((est.ucp - 6.0 * 1.02 * 0.995).abs() < 1e-12);
//! # Ok::<(), ucp_core::Error>(())
//! ```

pub mod corpus;
pub mod error;
pub mod estimate;
pub mod fuzzy;
pub mod karner;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod report;

pub use error::{Error, Result, Violation};

// Guide chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/karner.md")]
    mod karner {}
    #[doc = include_str!("../../../book/src/fuzzy.md")]
    mod fuzzy {}
    #[doc = include_str!("../../../book/src/neural.md")]
    mod neural {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/corpus-format.md")]
    mod corpus_format {}
    #[doc = include_str!("../../../book/src/model-file.md")]
    mod model_file {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
