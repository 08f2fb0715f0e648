//! Command-line front end for the deltawell solvers: JSON reports for the
//! one- and two-dimensional wells and the verification suites, CSV profiles
//! for plotting.

pub mod commands;
pub mod report;

pub use commands::CommandError;
pub use report::{Entry, Report};
