//! CLI surface for the exact verification engine: subcommand
//! implementations, the named check registry, the bundled fixture corpus,
//! and machine-readable run reports.

pub mod checks;
pub mod commands;
pub mod fixtures;
pub mod report;
