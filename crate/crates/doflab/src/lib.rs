//! # doflab
//!
//! A simulation and analysis library for the degrees of freedom (capacity
//! pre-log) of time-varying wireless networks with relays, feedback,
//! cooperation and full-duplex operation.
//!
//! The crate is organized around six subsystems:
//!
//! - [`network`] — network topologies, message sets, the time-varying channel
//!   process, symbol extension, and a causal forward simulator.
//! - [`transforms`] — instance-to-instance reductions used in converse
//!   arguments: the full-duplex/half-duplex equivalence, cooperation collapse
//!   to a 4-node X network, and message nulling.
//! - [`bounds`] — closed-form DoF formulas and outer-bound regions with exact
//!   rational LP maximization of the total DoF.
//! - [`alignment`] — construction and numerical verification of interference
//!   alignment beamformers over symbol extensions of the K-user full-duplex
//!   network.
//! - [`ratesim`] — zero-forcing receivers, sum-rate computation over an SNR
//!   sweep, pre-log slope regression, and a feedback zero-forcing demo.
//! - [`converse`] — an executable genie-replay check that reconstructs the
//!   received signals of the 4-node X network from side information.
//!
//! Every operation is deterministic given its seeds: identical seeds produce
//! bit-identical gains, transcripts and reports. See the `examples/`
//! directory for one runnable example per capability, and the `doflab`
//! binary for the command-line front end.

pub mod alignment;
pub mod bounds;
pub mod cli;
pub mod converse;
pub mod error;
pub mod network;
pub mod ratesim;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
