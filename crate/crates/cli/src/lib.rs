//! Library side of the `heisenberg` command-line tool.

pub mod args;
pub mod jobs;
pub mod report;

pub use jobs::{Failure, Job, Outcome};
