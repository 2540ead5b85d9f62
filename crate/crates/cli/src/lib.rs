//! Batch driver for the toolkit: configuration, the end-to-end pipeline,
//! family sweeps and artifact writing.

pub mod config;
pub mod families;
pub mod pipeline;
pub mod sweep;

pub use config::{DomainSpec, PotentialSpec, RunConfig};
pub use pipeline::{run_pipeline, PipelineOutput, VerificationReport};
