//! CLI subcommands.

pub mod bench;
pub mod offline;
pub mod online;
pub mod table1;
pub mod validate;
