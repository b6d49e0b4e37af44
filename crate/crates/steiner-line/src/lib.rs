//! Euclidean Steiner trees with a line: exact small-instance solvers,
//! spanning-tree baselines, and a discretize/solve/contract approximation
//! pipeline for the variants where the tree may also use a zero-cost line.

mod cli;
pub mod esfl;
pub mod esl;
pub mod est;
pub mod geometry;
pub mod io;
pub mod oracles;
pub mod reductions;
pub mod report;

pub use cli::cli_main;
pub use geometry::{Instance, LineSpec, Point, SteinerGraph};
