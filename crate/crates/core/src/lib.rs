//! Multi-source neurosymbolic transfer for tabular reinforcement learning on
//! product MDPs built from gridworlds and task automata.

pub mod dfa;
pub mod env;
pub mod metrics;
pub mod product;
pub mod qlearn;
pub mod distill;
pub mod semantic;
pub mod aggregate;
pub mod gating;
pub mod trainer;
pub mod fixtures;
pub mod pipeline;
pub mod llm;

#[cfg(test)]
mod testutil;
