//! Command-line front end: expression text, problem files, reports and the
//! built-in examples.

pub mod commands;
pub mod expr;
pub mod fixtures;
pub mod problem;
pub mod report;
