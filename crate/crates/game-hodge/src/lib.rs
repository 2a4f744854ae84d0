//! Symbolic differential games, their Helmholtz/Hodge decomposition, and
//! the dynamics of simultaneous gradient ascent.
//!
//! A differential game assigns each player a smooth utility over a shared
//! strategy space; the simultaneous gradient stacks every player's own-block
//! gradient into one vector field. This crate represents utilities as exact
//! symbolic expressions ([`expr`]), derives the gradient field and its
//! Jacobian ([`game`]), splits sampled fields into curl-free and
//! divergence-free parts with a Fourier projection on a periodic box
//! ([`grid`], [`hodge`]), integrates the induced flow and its phase-space
//! volume ([`dynamics`]), and rolls everything into a game taxonomy and an
//! interpolation experiment ([`classify`]).
//!
//! All grid computation uses a periodic box as a finite surrogate for the
//! unbounded strategy space; non-periodic analytic fields are windowed by a
//! compactly supported bump before grid analysis.

pub mod classify;
pub mod dynamics;
pub mod expr;
pub mod game;
pub mod grid;
pub mod hodge;
pub mod sampler;

pub use expr::{parse, Env, EvalError, Expr, Func, ParseError};
pub use game::{DifferentialGame, GameError, JacobianSplit, Player};
pub use grid::{BoxGrid, GridField, GridScalar, GridTwoForm, Scheme};
pub use hodge::{DecompositionConfig, DecompositionResult, ZeroModePolicy};
pub use sampler::{SampleBox, Sampler};
