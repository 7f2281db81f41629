//! Exact representation-theoretic checks for foliations and twisted forms
//! on rational homogeneous varieties.

pub mod charring;
pub mod decomp;
pub mod error;
pub mod expr;
pub mod extalg;
pub mod linalg;
pub mod pencil;
pub mod pforms;
pub mod rootdata;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
pub use rootdata::RootSystem;
pub use weight::Weight;
