//! Command-line front end: expression parsing and subcommands.

pub mod app;
pub mod expr;
