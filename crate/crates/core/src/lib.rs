//! Numerical verification of mirror-symmetric Gamma-class identities for
//! smooth toric Fano varieties.
//!
//! The library has two independent computational routes for each identity:
//! convex-geometry integrals of Laurent-polynomial mirrors on one side
//! ([`mirror`]), and Gromov-Witten series paired with Gamma classes in a
//! finite-dimensional cohomology ring on the other ([`series`], [`classes`]).
//! The toric combinatorics, intersection theory and moment polytopes live in
//! [`fan`] and [`cohomology`]; end-to-end checks and the CLI live in
//! [`harness`] and [`cli`].

pub mod classes;
pub mod cli;
pub mod cohomology;
pub mod fan;
pub mod harness;
pub mod mirror;
pub mod quad;
pub mod rational;
pub mod series;

pub use cohomology::CohRing;
pub use fan::FanData;
