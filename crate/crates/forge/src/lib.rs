//! File formats, configuration and stage orchestration around
//! `idiomforge-core`.

pub mod backend;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod jsonl;
pub mod manifest;
pub mod stages;

pub use config::Config;
pub use error::{ForgeError, Result};
pub use manifest::PipelineManifest;
pub use stages::{run_stage, Stage};
