//! Trend filtering toolkit.
//!
//! L1-penalised trend extraction (slope, level and mixed penalties, univariate
//! and multivariate), the Hodrick-Prescott L2 filter, the procedures that pick
//! the regularisation parameter, seeded regime-switching simulators and a
//! walk-forward momentum backtest driven by the filtered trends.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the `l1trend` companion crate.

#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod banded;
pub mod calibration;
mod error;
pub mod filters;
mod math;
pub mod qp;
pub mod series;
pub mod strategy;
pub mod synth;

pub use banded::{BandedSymMatrix, DiffOperator, DiffOrder, MixedDiffOperator, StencilOperator};
pub use error::{Error, Result};
pub use filters::{FilterKind, FilterResult, Lambda};
pub use qp::{BoxQp, IpmSettings, IpmSolution};
pub use series::{CalendarDate, Series, Stamp};
