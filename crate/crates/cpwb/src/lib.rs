//! Workbench for Classical Processes.

pub mod denotations;
pub mod harness;
pub mod obs_transform;
pub mod oracle;
pub mod syntax;
pub mod text;
pub mod translation;
pub mod transformers;
pub mod typing;
