//! File format, reports and commands behind the `crn` binary.

pub mod commands;
pub mod format;
pub mod report;
