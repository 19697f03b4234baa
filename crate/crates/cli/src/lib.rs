//! Library side of the `loopmod` command: config parsing, task dispatch and
//! report writing.

pub mod config;
pub mod report;
pub mod tasks;
