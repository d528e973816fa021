//! Command-line front end: argument types, descriptor and grid parsing,
//! artifact writing and the figure data.

pub mod args;
pub mod error;
pub mod figures;
pub mod inputs;
pub mod output;
pub mod run;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};
