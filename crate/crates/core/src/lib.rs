//! Verification and synthesis of stable joint plans for two-agent
//! transition systems.

pub mod crash;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod generators;
pub mod incomplete;
pub mod kstable;
pub mod model;
pub mod stability;
pub mod synth;

pub use error::{Error, Result};
