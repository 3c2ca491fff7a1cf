//! Filtered Fourier pseudospectral solver for one- and two-dimensional
//! hyperbolic conservation laws.
//!
//! Gibbs oscillations are controlled with regularized Shannon kernel (RSK)
//! lowpass filters, applied either as a Fourier multiplier or as a two-step
//! physical-domain convolution, and activated by a total-variation sensor.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod filtering;
pub mod integrate;
pub mod kernels;
pub mod physics;
pub mod reference;
pub mod spectral;

pub use error::{Error, Result};
