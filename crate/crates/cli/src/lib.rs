//! Configuration, suites, and reports.

pub mod config;
pub mod report;
pub mod run;
pub mod suites;
