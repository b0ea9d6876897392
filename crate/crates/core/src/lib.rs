//! Critical transitions in scalar concave nonautonomous ODEs.
//!
//! The crate computes hyperbolic attractor–repeller pairs of
//! `x' = f(t, x)`, the locally pullback attractive and repulsive solutions of
//! the transition equation `x' = f(t, x - Gamma(t))`, classifies the outcome
//! as tracking, tipping or the boundary case, bisects for the critical
//! parameter `lambda*`, and checks sufficient inequality criteria that
//! certify tracking or tipping from the unperturbed pair alone.

pub mod bifurcation;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod fields;
pub mod integrate;
pub mod pullback;

pub use error::{Error, Result};
