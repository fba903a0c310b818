//! Spectral projectors, affiliated bases and certified near-identity
//! intertwiners for unitary orbits of finite-rank Hermitian operators.
//!
//! Everything is dense and computed in a finite ambient dimension. The
//! guide in `book/` walks through the constructions with runnable examples.

pub mod affiliation;
pub mod cli;
pub mod config;
pub mod error;
pub mod intertwiner;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod spectral;
pub mod suite;

pub use config::Tolerances;
pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tolerances.md")]
    mod tolerances {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/projection-pairs.md")]
    mod projection_pairs {}
    #[doc = include_str!("../../../book/src/intertwiners.md")]
    mod intertwiners {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
