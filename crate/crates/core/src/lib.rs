//! Subordinated Lévy processes and Lévy bases.
//!
//! The crate covers the distributional side (triplets, Lévy mixing, the
//! triplet and characteristic-function maps of subordination), Monte Carlo
//! simulation of subordinators, subordinated paths, Lévy-basis grid fields
//! and Lévy semistationary processes, and a least-squares solver that
//! recovers the law of the time change from observations.

pub mod error;
pub mod levy;
pub mod mixing;
pub mod quadrature;
pub mod recover;
pub mod simulate;
pub mod special;
pub mod subordinate;

pub use error::{Error, Result};
pub use levy::*;
