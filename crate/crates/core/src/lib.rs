//! Coupled-channel scattering with non-conservative supersymmetric transformations.
//!
//! * [`susy`]: factorization solutions, superpotentials, transformed potentials and
//!   Jost-matrix updates for `N` channels.
//! * [`feshbach`]: the exactly solvable two-channel Feshbach-resonance model.
//! * [`scattering`]: S-matrix, eigenphases, phase unwrapping, resonance search.
//! * [`oracle`]: independent radial integrator for cross-checks.
//! * [`source`]: name-selected Jost-matrix routes over a model.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod feshbach;
pub mod jost;
pub mod oracle;
pub mod scattering;
pub mod source;
pub mod susy;

pub use channels::{ChannelMomenta, ChannelSet, Sheet};
pub use error::{Error, Result};
pub use feshbach::{FeshbachParams, ResonancePole};
pub use jost::JostMatrix;
pub use susy::TransformSpec;
