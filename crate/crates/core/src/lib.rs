//! Simulation and numerical verification toolkit for the contact process on
//! the hypercubic lattice `Z^d`.
//!
//! The crate is organised around the objects that appear in the high-dimension
//! survival analysis of the contact process:
//!
//! * [`lattice`]: vertices of `Z^d`, periodic tori and hyperoctahedral
//!   canonical classes (plus the symmetry-reduced ball used by the solvers).
//! * [`contact`]: event-driven simulation of the contact process, survival
//!   estimation and the self-duality harness.
//! * [`bcpp`]: the binary contact path process and its coupling with the
//!   contact process.
//! * [`walk`]: simple random walk hitting probability `H(d)`.
//! * [`analytics`]: closed forms (mean-field ODE, gambler's ruin, lower bounds).
//! * [`moments`]: the correlation operator `G`, its eigenvector `L` and the
//!   second-moment bound chain.

// `!(x > 0.0)` is the idiom used to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod bcpp;
pub mod contact;
mod error;
pub mod lattice;
pub mod moments;
mod ode;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{CanonicalVertex, Geometry, Torus, Vertex};
