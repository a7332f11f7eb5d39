//! Command-line harness for `blindrec`: code construction, schedule
//! inspection, single sessions, Monte-Carlo sweeps and a two-process TCP
//! mode.

pub mod commands;
pub mod config;
pub mod sweep;

use thiserror::Error;

use blindrec::channel::ChannelError;
use blindrec::ldpc::LdpcError;
use blindrec::metrics::MetricsError;
use blindrec::protocol::ProtocolError;
use blindrec::rate::RateError;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
