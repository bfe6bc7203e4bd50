//! Command-line front end for `qlbm-core`: no-go demonstrations, formula
//! tables, window and full-grid runs, and the validation suite.

pub mod canonical;
pub mod checks;
pub mod commands;
pub mod error;
