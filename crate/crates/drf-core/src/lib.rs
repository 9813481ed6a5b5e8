//! Deep radiomic feature (DRF) extraction and analysis.
//!
//! The library converts masked multi-modality 3D brain volumes into a
//! 180-dimensional DRF signature by forwarding tumor ROIs through a small
//! 3D CNN and encoding each activation map with 41 texture quantifiers,
//! then provides the statistical and machine-learning layer (Spearman,
//! Wilcoxon, Holm-Bonferroni, Kaplan-Meier, log-rank, random forests)
//! used to relate the signature to immune cell markers and survival.

pub mod cnn;
pub mod error;
pub mod ml;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod texture;
pub mod volume;

pub use error::{Error, Result};
