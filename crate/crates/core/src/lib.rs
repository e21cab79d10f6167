//! Constructive derivation of a seven-multiplication algorithm for 2×2
//! matrices from a rotation of order three, exact verification of the
//! resulting bilinear identity, and a recursive n×n multiplication engine
//! that consumes any rank-7 decomposition.
//!
//! ```
//! use strassen_core::{construction::derive_standard, field::Field, verify};
//!
//! let dec = derive_standard(Field::Rational).unwrap();
//! assert_eq!(dec.rank(), 7);
//! assert!(verify::verify_bilinear_identity(&dec).unwrap().passed());
//! ```

pub mod cli;
pub mod construction;
pub mod engine;
pub mod error;
pub mod field;
pub mod format;
pub mod linalg;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};
