//! Experiment harness: the Deutsch-with-dephasing demo, exact rate tables,
//! configurable scaling sweeps, and shared output plumbing for the `decofree`
//! command-line tool.

pub mod config;
pub mod deutsch;
pub mod output;
pub mod rates;
pub mod sweep;
