//! Library side of the `homstar` command-line tool: commands, reports and the seeded
//! self-test suites.

pub mod commands;
pub mod report;
pub mod sample;
pub mod selftest;
