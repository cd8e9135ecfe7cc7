//! Command-line front end for oruga: load declaration files, validate them,
//! print subtype closures, run matches and structure transfers, and export
//! constructions as Graphviz DOT.

pub mod commands;
pub mod dot;

pub use commands::{
    cmd_check, cmd_closure, cmd_export_dot, cmd_match, cmd_transfer, TransferOptions, EXIT_DOMAIN,
    EXIT_OK, EXIT_USAGE_IO,
};
pub use dot::{export_dot, DotOptions};
