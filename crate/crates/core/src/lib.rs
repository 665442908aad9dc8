//! How well does a shuffled deck of `N = 2dK` cards (K cards in each of 2d
//! suits) simulate a symmetric simple random walk on Z^d?
//!
//! The first card is a fair draw, but every card removed biases the rest of
//! the deal. This crate computes the total-variation distance `d_n(N)`
//! between the n-step deck simulation and the true walk — exactly, in
//! log-space, by its Gaussian limit profile at fixed cards-per-step ratio
//! `c = N/n`, and by seeded Monte Carlo — and answers the sizing questions
//! these numbers raise (smallest deck for a distance budget, longest
//! simulation for a given deck).
//!
//! Module map:
//! - [`combinatorics`]: factorials, multinomials, composition/partition
//!   streams, Stirling asymptotics.
//! - [`exact_tv`]: the two suit-count laws, the likelihood ratio `f`, and
//!   exact/log-space evaluation of `d_n(N)`.
//! - [`profile`]: the limit radius `r(c)`, the Gaussian profile density and
//!   its integral; closed forms for d = 1, 2.
//! - [`planner`]: deck-size and step-count solvers built on the profile with
//!   exact refinement.
//! - [`simulator`]: seeded shuffles, dealt trajectories, Monte-Carlo
//!   estimators and chi-square checks.

pub mod combinatorics;
pub mod error;
pub mod exact_tv;
pub mod planner;
pub mod profile;
pub mod simulator;

pub use combinatorics::{CompositionVec, ExactRational, LogValue};
pub use error::{Error, Result};
pub use exact_tv::{DeckSpec, ErrorBound, TVEstimate, TvMethod, TvMode};
