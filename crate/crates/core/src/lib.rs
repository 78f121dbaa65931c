//! Exact computable analysis toolkit for Schnorr randomness and Birkhoff
//! typicality on Cantor space and the unit interval.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod isomorphism;
pub mod measures;
pub mod randomness;
pub mod spaces;

pub use error::{Error, Result};
