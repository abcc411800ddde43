//! Command-line front end for `cvres-core`: state parsing, bound reports,
//! figure tables and protocol simulations.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod io;

pub use error::CliError;
