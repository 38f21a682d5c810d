//! Short-term real-time electricity price forecasting built on the spread
//! between day-ahead and real-time locational marginal prices.

pub mod arima;
pub mod backtest;
pub mod correlogram;
pub mod data_io;
pub mod error;
pub mod estimation;
pub mod garch;
pub mod lag;
pub mod presets;
pub mod series;

pub use error::{Error, Result};
