//! Data preparation, synthetic instruction generation, training-plan
//! emission and evaluation tooling for adapting LLMs to Turkish finance.
//!
//! Each stage is a plain library module; the `finadapt` binary only wires
//! them to a project config. See the crate examples for one runnable
//! program per capability.

pub mod cli;
pub mod client;
pub mod corpus;
pub mod evalbench;
pub mod jsonl;
pub mod judging;
pub mod mock;
pub mod review;
pub mod seeding;
pub mod syngen;
pub mod text;
pub mod trainplan;
