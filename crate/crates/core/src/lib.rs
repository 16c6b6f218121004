//! Pseudo-random graphs over prime fields, exact homomorphism counting of
//! small configurations, and VC-dimension search for adjacency functions.

pub mod builders;
pub mod error;
pub mod ffield;
pub mod graph;
pub mod homcount;
pub mod vcdim;

pub use error::{Error, Result};
