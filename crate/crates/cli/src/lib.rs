//! Command-line front end for the code-analysis library: text grammars for
//! fields, polynomials and matrices, subcommand dispatch, and stable JSON
//! reports suitable for regression testing.

pub mod commands;
pub mod parse;
pub mod printer;

pub use commands::{render_pretty, run, Cli, CliError, Command};
