//! Explicit solutions of linear control systems on matrix Lie groups and
//! Lie-algebraic controllability diagnostics.
//!
//! A linear control system is `dg/dt = X(g) + sum_j u_j Y_j(g)` on a matrix
//! group, where `X` is a linear vector field (its flow is a one-parameter
//! family of group automorphisms, encoded here by a derivation of the Lie
//! algebra) and the `Y_j` are right-invariant control fields. The crate
//! provides:
//!
//! * [`flows`]: the automorphism flow, the limit-product approximation of the
//!   solution, the closed form `exp(t(X + sum u_j Y_j)) exp(-tX)` for inner
//!   derivations, cocycle concatenation for piecewise-constant controls,
//!   translation of solutions to arbitrary initial points, and an
//!   independent RK4 oracle with an ODE-residual check;
//! * [`controllability`]: the subalgebra generated by the control fields,
//!   its saturation under the derivation, the rank condition, and a verdict
//!   engine;
//! * [`catalog`]: ready-made models (Heisenberg, abelian R^2, SL(2), SU(2),
//!   SO(3), SO(2,1)_0, GL(n)+) with closed-form exponentials for the
//!   three-dimensional groups;
//! * [`io`] and [`cli`]: JSON system documents, CSV trajectories, and the
//!   `liectrl` command-line tool.

pub mod catalog;
pub mod cli;
pub mod controllability;
pub mod error;
pub mod flows;
pub mod io;
pub mod matcore;
pub mod models;

pub use error::{Error, Result};
