//! Hölder pseudo-divergences and proper Hölder divergences between members
//! of exponential families.

pub mod centroid;
pub mod closed_form;
pub mod clustering;
pub mod error;
pub mod family;
pub mod grid;
pub mod linalg;
pub mod mixture;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
pub use family::{DistributionJson, Family, NaturalParameter, SourceParameter};
