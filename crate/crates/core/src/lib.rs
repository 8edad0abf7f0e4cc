//! Schema evolution as a chase over s-t tgds, inversion by a second chase (the backchase)
//! with optional provenance, and classification of the reconstruction.

pub mod analysis;
pub mod dependency;
pub mod error;
pub mod pipeline;
pub mod provenance;
pub mod relational;
pub mod smo;

pub use error::{Error, Result};
