//! Experiment harness: configuration, seeded suite execution and reports.

pub mod app;
pub mod checks;
pub mod config;
pub mod report;
pub mod run;
