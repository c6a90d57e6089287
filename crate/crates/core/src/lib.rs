//! Link-level simulation and closed-form outage analysis for a NOMA downlink
//! in which each cell-edge user is reached through its own intelligent
//! reflecting surface (IRS).
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: small dense complex linear algebra, modified Bessel
//!   functions of the second kind, factorials and reproducible random streams.
//! - [`channel`]: system parameters and one random channel draw.
//! - [`irs_control`]: reflection vectors for the ideal zero-forcing design and
//!   the DFT and on-off codebooks.
//! - [`linkmetrics`]: far-user SINR and the outage predicate.
//! - [`analytics`]: closed-form outage probabilities, their high-SNR forms and
//!   diversity slope extraction.
//! - [`simulator`]: the Monte Carlo engine with Wilson intervals.
//! - [`cli`]: experiment files, presets and CSV output used by the binary.

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod irs_control;
pub mod linkmetrics;
pub mod numerics;
pub mod simulator;

pub use error::{Error, Result};
pub use num_complex::Complex64;
