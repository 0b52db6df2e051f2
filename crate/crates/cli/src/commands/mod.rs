pub mod backtest;
pub mod calibrate;
pub mod filter;
pub mod simulate;

use l1trend_core::DiffOrder;

use crate::error::{CliError, CliResult};

pub(crate) fn diff_order(k: u8) -> CliResult<DiffOrder> {
    DiffOrder::from_usize(k as usize).map_err(|_| CliError::usage(format!("order must be 1 or 2, got {k}")))
}
