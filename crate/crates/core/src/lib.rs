//! Spectral machinery for economic networks.
//!
//! Everything is built on dense square matrices over `f64`. The crate is
//! `no_std` (with `alloc`): all operations are pure functions of their
//! inputs, randomness is injected through explicit seeds, and IO lives in
//! the companion `spectral-econ` crate.
//!
//! Module map:
//! - [`matrix`]: the [`SquareMatrix`] carrier and its digraph structure
//!   (strong connectivity, periodicity).
//! - [`spectral`]: spectral radius, Perron pairs, trace-power estimates of
//!   the spectral radius, and resolvent solves `(I - delta*M)^-1 z`.
//! - [`centrality`]: degree, eigenvector, and Katz-Bonacich node scores.
//! - [`degroot`]: averaging opinion dynamics, consensus weights, prominence,
//!   and crowd-wisdom experiments.
//! - [`game`]: linear-quadratic network games (equilibrium, keyness,
//!   welfare, price of anarchy).
//! - [`public_goods`]: benefits matrices, the spectral Pareto test, and
//!   essential-agent analysis.
//! - [`market`]: pricing-game welfare under noisy measurement and robust
//!   intervention design.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod centrality;
pub mod degroot;
pub mod error;
pub mod game;
pub mod linalg;
pub mod market;
pub mod matrix;
pub mod public_goods;
pub mod spectral;
#[doc(hidden)]
pub mod testkit;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use spectral::PerronPair;
