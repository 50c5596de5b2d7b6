//! Sensor Access Signaling Game: equilibrium analysis and simulation.
//!
//! Mobile applications request access to zero-permission sensors
//! (accelerometer, gyroscope, ...). Some of those applications are honest,
//! some are trying to infer private user data. An on-device defense
//! mechanism sees only the request, classified as suspicious or
//! non-suspicious, and must decide whether to allow or block it without
//! knowing the requester's type. This crate models that interaction as a
//! two-player signaling game and provides:
//!
//! - [`game`]: the stage game: parameters, payoff leaves, expected payoffs;
//! - [`beliefs`]: Bayesian posterior updates, their inversion, and the
//!   defender's best response;
//! - [`equilibria`]: enumeration and verification of perfect Bayesian Nash
//!   equilibria (pooling, hybrid, mixed; separating is shown impossible);
//! - [`simulate`]: seeded Monte Carlo sweeps over Nature's probability and
//!   an infinitely repeated game with reward/punishment strategies;
//! - [`cli`]: config loading and the CSV-writing commands behind the `sasg`
//!   binary.
//!
//! # Quick start
//!
//! ```
//! use sasg::game::{expected_payoffs, GameParameters, StrategyProfile};
//! use sasg::equilibria::{enumerate_pure_pbne, EnumerateOptions};
//!
//! let params = GameParameters::default();
//! assert!(params.validate().is_valid());
//!
//! // Both types pooling on suspicious requests, defender blocking everything.
//! let pool = StrategyProfile { m: 1.0, n: 1.0, y: 1.0, x: 1.0 };
//! let eu = expected_payoffs(&params, &pool);
//! assert_eq!(eu.ma, -params.tau);
//!
//! // That profile is an equilibrium at the default theta = 0.5.
//! let found = enumerate_pure_pbne(&params, &EnumerateOptions::default());
//! assert!(found
//!     .iter()
//!     .any(|e| e.strategy == pool && e.verified));
//! ```

pub mod beliefs;
pub mod cli;
pub mod equilibria;
pub mod game;
pub mod simulate;

/// Default tolerance for indifference comparisons on normalized utilities.
///
/// Exact-equality branches of the equilibrium conditions are measure-zero in
/// floating point, so "equal" means "within this tolerance" throughout. The
/// `SAG_EPS` environment variable overrides it for the CLI.
pub const DEFAULT_EPS: f64 = 1e-9;
