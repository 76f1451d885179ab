//! Exact verification of perfect isometries between 2-blocks of small groups.
//!
//! Character values live in cyclotomic fields with exact rational
//! coordinates; every "lies in `2^t O`" condition is decided by a valuation
//! at a fixed prime above 2. On top of that sit character tables for the
//! model groups (cyclic, `A4`, `A5` and direct products), 2-block
//! decomposition, two independent perfectness checkers, enumeration of
//! perfect isometries and the index-2 descent machinery.

pub mod blocks;
pub mod chartab;
pub mod cyclotomic;
pub mod descent;
pub mod dvr;
pub mod error;
pub mod intmat;
pub mod isometry;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
