//! Simulation and analysis of quantum bimatrix games in the Marinatto-Weber
//! protocol.
//!
//! Two operator families are provided for `n x m` games: the cyclic shifts
//! `V_k |i> = |i + k mod l>` ([`schemes::gmw_family`]), which reproduce the
//! classical game up to cyclic relabeling for every basis initial state, and
//! the 3x3 transposition set `(I, D, C)` ([`schemes::it3_family`]), which does
//! not. [`analysis`] checks these properties mechanically and computes Nash
//! equilibria of induced games in exact arithmetic.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod game;
pub mod rational;
pub mod schemes;
pub mod state;

pub use error::{Error, Result};
pub use game::{BimatrixGame, PayoffPair};
pub use rational::Rational;
pub use schemes::{InducedGame, MixedStrategy, OperatorFamily};
pub use state::{DensityOperator, PureState};
