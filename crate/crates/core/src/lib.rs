//! Allocation-only core of the idiom dataset forge.
//!
//! Everything here is pure: sentence segmentation, synonym-substitution
//! triplet generation, quality tiering, annotation agreement, augmentation,
//! context enrichment and STS scoring. File formats, directory walking and the
//! command line live in the `idiomforge` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotation;
pub mod augment;
pub mod corpus;
pub mod enrich;
pub mod error;
pub mod lexicon;
pub mod rng;
pub mod sts;
pub mod text;
pub mod tiering;
pub mod triplet;

pub use error::{Error, Result};
