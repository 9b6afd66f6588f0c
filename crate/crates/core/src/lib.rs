//! Exact solvers for (σ,ρ)-domination problems on graphs of bounded treewidth.

pub mod dpcore;
pub mod error;
pub mod fastconv;
pub mod graphio;
pub mod oracle;
pub mod repsets;
pub mod setspec;
pub mod solver;
pub mod states;
pub mod structured;

pub use error::{Error, Result};
