//! Exact remaining-ball distributions for replacement urn games.
//!
//! A box holds `r` red and `w` white balls. A white draw is discarded; a red
//! draw is put back and a second uniform draw is discarded whatever its
//! colour. Under Rule III the game stops when the reds run out and `k` whites
//! remain; under Rule IV it stops when the whites run out and `k` reds remain.
//!
//! The crate provides:
//!
//! * [`exact_arith`]: big-rational helpers (binomials, factorial ratios,
//!   Pochhammer symbols, terminating hypergeometric sums);
//! * [`closed_form`]: the closed-form pmfs, generating functions, modes and
//!   asymptotics for the plain game, the last-ball game and Rules III/IV;
//! * [`oracles`]: independent dynamic-programming and combinatorial
//!   evaluators used to certify the closed forms;
//! * [`series_verify`]: truncated bivariate series and the second-order
//!   differential operator whose sources the generating functionals satisfy,
//!   plus the finite summation identities behind normalisation;
//! * [`simulator`]: a seeded, stream-partitioned Monte Carlo engine.

pub mod closed_form;
pub mod error;
pub mod exact_arith;
pub mod oracles;
pub mod series_verify;
pub mod simulator;

pub use closed_form::{PmfOverK, Regime, Rule, UrnSpec};
pub use error::{Error, Result};
pub use exact_arith::Rational;
