//! Wiener integrals of deterministic operator-valued integrands against
//! H-fractional processes from finite Wiener chaos, the fractional Sobolev
//! spaces that carry them, and stochastic convolutions driven by such noise.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos_core;
pub mod convolution_spde;
pub mod error;
pub mod frac_process;
pub mod grid;
pub mod quad;
pub mod rng;
pub mod sobolev;
pub mod special;
pub mod stats;
pub mod wiener_integral;

pub use error::{Error, Result};
pub use frac_process::{FracFamily, FracParams, PathEnsemble};
pub use grid::TimeGrid;
pub use sobolev::{GridFunction, SobolevOrder, StepFunction};
